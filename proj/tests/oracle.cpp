// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

std::size_t cells(const GridSpec& g) { return std::size_t{1} << (g.n * g.L); }

Cube cube_of(const GridSpec& g, std::size_t cell, int level) {
  Cube q;
  q.level = level;
  const auto x = cell_coords(g, cell);
  for (int d = 0; d < g.n; ++d) q.idx[d] = x[d] >> (g.L - level);
  return q;
}

std::size_t linear(const Cube& q, int n) {
  std::size_t out = 0;
  for (int d = 0; d < n; ++d) out = (out << q.level) | q.idx[d];
  return out;
}

bool same(const Cube& a, const Cube& b, int n) { return a.level == b.level && contains(a, b, n); }

Cube parent_at(const Cube& q, int level) {
  Cube p = q;
  p.level = level;
  for (auto& i : p.idx) i >>= (q.level - level);
  return p;
}

// Averages of f on every cube at `level`, by direct summation over cells.
std::vector<double> level_averages(const CellFunction& f, int level) {
  const GridSpec& g = f.spec();
  std::vector<double> sum(std::size_t{1} << (g.n * level), 0.0);
  for (std::size_t c = 0; c < cells(g); ++c) sum[linear(cube_of(g, c, level), g.n)] += f[c];
  const double per = static_cast<double>(cells(g) / sum.size());
  for (auto& s : sum) s /= per;
  return sum;
}

// First cell of a cube; Haar functions of coarser cubes are constant on it.
std::size_t first_cell(const GridSpec& g, const Cube& q) {
  std::size_t out = 0;
  for (int d = 0; d < g.n; ++d) out = (out << g.L) | (std::size_t{q.idx[d]} << (g.L - q.level));
  return out;
}

double value_on(const GridSpec& g, const Term& t, const Cube& inner_cube) {
  return haar_at(g, t.q, t.eps, first_cell(g, inner_cube));
}

double scale(const Cube& q, int n, double alpha) { return std::pow(measure(q, n), alpha / n); }

void add_scaled(CellFunction& out, double c, const std::vector<double>& u, const std::vector<double>& v) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * u[i] * v[i];
}

void add_scaled(CellFunction& out, double c, const std::vector<double>& u, const std::vector<double>& v,
                const std::vector<double>& w) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * u[i] * v[i] * w[i];
}

void add_indicator(CellFunction& out, double c, const Cube& q) {
  const GridSpec& g = out.spec();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (cell_in(g, q, i)) out[i] += c;
  }
}

double tail_sum(double alpha, int from_level) {
  double s = 0.0;
  for (int l = from_level;; ++l) {
    const double t = std::exp2(-l * alpha);
    if (t < 1e-18 * std::exp2(-from_level * alpha) && l > from_level) break;
    s += t;
  }
  return s;
}

}  // namespace

std::array<std::uint32_t, 3> cell_coords(const GridSpec& g, std::size_t cell) {
  std::array<std::uint32_t, 3> x{};
  const std::size_t mask = (std::size_t{1} << g.L) - 1;
  for (int d = 0; d < g.n; ++d) x[d] = static_cast<std::uint32_t>((cell >> ((g.n - 1 - d) * g.L)) & mask);
  return x;
}

std::vector<Cube> cubes(const GridSpec& g, int max_level) {
  std::vector<Cube> out;
  for (int l = 0; l <= max_level; ++l) {
    const std::size_t count = std::size_t{1} << (g.n * l);
    const std::size_t mask = (std::size_t{1} << l) - 1;
    for (std::size_t k = 0; k < count; ++k) {
      Cube q;
      q.level = l;
      for (int d = 0; d < g.n; ++d) q.idx[d] = static_cast<std::uint32_t>((k >> ((g.n - 1 - d) * l)) & mask);
      out.push_back(q);
    }
  }
  return out;
}

bool contains(const Cube& big, const Cube& small, int n) {
  if (small.level < big.level) return false;
  for (int d = 0; d < n; ++d) {
    if ((small.idx[d] >> (small.level - big.level)) != big.idx[d]) return false;
  }
  return true;
}

bool strictly_contains(const Cube& big, const Cube& small, int n) {
  return small.level > big.level && contains(big, small, n);
}

double measure(const Cube& q, int n) { return std::ldexp(1.0, -n * q.level); }

bool cell_in(const GridSpec& g, const Cube& q, std::size_t cell) {
  const auto x = cell_coords(g, cell);
  for (int d = 0; d < g.n; ++d) {
    if ((x[d] >> (g.L - q.level)) != q.idx[d]) return false;
  }
  return true;
}

double haar_at(const GridSpec& g, const Cube& q, std::uint32_t eps, std::size_t cell) {
  if (!cell_in(g, q, cell)) return 0.0;
  const auto x = cell_coords(g, cell);
  double s = 1.0;
  for (int d = 0; d < g.n; ++d) {
    const bool oscillating = ((eps >> d) & 1u) == 0;
    const bool upper = ((x[d] >> (g.L - q.level - 1)) & 1u) != 0;
    if (oscillating && upper) s = -s;
  }
  return s / std::sqrt(measure(q, g.n));
}

std::vector<double> haar_vec(const GridSpec& g, const Cube& q, std::uint32_t eps) {
  std::vector<double> h(cells(g));
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = haar_at(g, q, eps, i);
  return h;
}

double inner(const CellFunction& f, const std::vector<double>& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * h[i];
  return s * f.cell_volume();
}

double coeff(const CellFunction& f, const Cube& q, std::uint32_t eps) {
  return inner(f, haar_vec(f.spec(), q, eps));
}

double average(const CellFunction& f, const Cube& q) {
  const GridSpec& g = f.spec();
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (cell_in(g, q, i)) {
      s += f[i];
      ++count;
    }
  }
  return s / static_cast<double>(count);
}

std::vector<Term> expansion(const CellFunction& f) {
  const GridSpec& g = f.spec();
  const std::uint32_t flat = (1u << g.n) - 1u;
  std::vector<Term> out;
  if (g.L == 0) return out;
  for (const Cube& q : cubes(g, g.L - 1)) {
    for (std::uint32_t e = 0; e < flat; ++e) {
      Term t{q, e, 0.0, haar_vec(g, q, e)};
      t.c = inner(f, t.h);
      if (t.c != 0.0) out.push_back(std::move(t));
    }
  }
  return out;
}

CellFunction frac_integral(const CellFunction& f, double alpha) {
  const GridSpec& g = f.spec();
  CellFunction out(g);
  for (int l = 0; l <= g.L; ++l) {
    const auto avg = level_averages(f, l);
    const double w = std::exp2(-l * alpha);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * avg[linear(cube_of(g, c, l), g.n)];
  }
  const double tail = tail_sum(alpha, g.L + 1);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] += tail * f[c];
  return out;
}

CellFunction bifrac_integral(const CellFunction& f1, const CellFunction& f2, double alpha) {
  const GridSpec& g = f1.spec();
  CellFunction out(g);
  for (int l = 0; l <= g.L; ++l) {
    const auto a1 = level_averages(f1, l);
    const auto a2 = level_averages(f2, l);
    const double w = std::exp2(-l * alpha);
    for (std::size_t c = 0; c < out.size(); ++c) {
      const std::size_t k = linear(cube_of(g, c, l), g.n);
      out[c] += w * a1[k] * a2[k];
    }
  }
  const double tail = tail_sum(alpha, g.L + 1);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] += tail * f1[c] * f2[c];
  return out;
}

CellFunction commutator(const CellFunction& b, const CellFunction& f, double alpha, int k) {
  if (k == 0) return frac_integral(f, alpha);
  // C^k f = b C^{k-1} f - C^{k-1}(b f)
  return b * commutator(b, f, alpha, k - 1) - commutator(b, b * f, alpha, k - 1);
}

CellFunction commutator_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha,
                                 int slot) {
  const CellFunction base = b * bifrac_integral(f1, f2, alpha);
  if (slot == 1) return base - bifrac_integral(b * f1, f2, alpha);
  return base - bifrac_integral(f1, b * f2, alpha);
}

CellFunction pi(const CellFunction& b, const CellFunction& f) {
  CellFunction out(b.spec());
  for (const Term& t : expansion(b)) {
    const double a = average(f, t.q);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.c * a * t.h[i];
  }
  return out;
}

CellFunction pi_star(const CellFunction& b, const CellFunction& f) {
  CellFunction out(b.spec());
  const int n = b.spec().n;
  for (const Term& t : expansion(b)) add_indicator(out, t.c * inner(f, t.h) / measure(t.q, n), t.q);
  return out;
}

CellFunction gamma(const CellFunction& b, const CellFunction& f) {
  const GridSpec& g = b.spec();
  CellFunction out(g);
  const std::uint32_t flat = (1u << g.n) - 1u;
  for (const Term& t : expansion(b)) {
    for (std::uint32_t e = 0; e < flat; ++e) {
      if (e == t.eps) continue;
      const auto h = haar_vec(g, t.q, e);
      add_scaled(out, t.c * inner(f, h), t.h, h);
    }
  }
  return out;
}

CellFunction b_shift(const CellFunction& b, const CellFunction& f, int k) {
  const GridSpec& g = b.spec();
  CellFunction out(g);
  const std::uint32_t flat = (1u << g.n) - 1u;
  for (const Term& t : expansion(b)) {
    if (t.q.level < k) continue;
    const Cube a = parent_at(t.q, t.q.level - k);
    for (std::uint32_t e = 0; e < flat; ++e) {
      const auto h = haar_vec(g, a, e);
      add_scaled(out, t.c * inner(f, h), t.h, h);
    }
  }
  return out;
}

CellFunction lambda(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha,
                    LambdaPiece piece) {
  const GridSpec& g = b.spec();
  const int n = g.n;
  CellFunction out(g);
  const auto tb = expansion(b);
  const auto t1 = expansion(f1);
  const auto t2 = expansion(f2);
  for (const Term& P : tb) {
    for (const Term& Q1 : t1) {
      if (!strictly_contains(Q1.q, P.q, n)) continue;
      const double h1 = value_on(g, Q1, P.q);
      for (const Term& Q2 : t2) {
        double cap = 0.0;
        if (contains(Q1.q, Q2.q, n)) {
          cap = measure(Q2.q, n);
        } else if (contains(Q2.q, Q1.q, n)) {
          cap = measure(Q1.q, n);
        } else {
          continue;
        }
        bool keep = true;
        switch (piece) {
          case LambdaPiece::all: break;
          case LambdaPiece::one: keep = strictly_contains(Q2.q, Q1.q, n); break;
          case LambdaPiece::two: keep = same(Q1.q, Q2.q, n); break;
          case LambdaPiece::three_one: keep = same(Q2.q, P.q, n); break;
          case LambdaPiece::three_two: keep = strictly_contains(P.q, Q2.q, n); break;
          case LambdaPiece::three_three:
            keep = strictly_contains(Q2.q, P.q, n) && strictly_contains(Q1.q, Q2.q, n);
            break;
        }
        if (!keep) continue;
        add_scaled(out, P.c * Q1.c * Q2.c * std::pow(cap, alpha / n) * h1, P.h, Q2.h);
      }
    }
  }
  return out;
}

CellFunction delta(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const GridSpec& g = b.spec();
  const int n = g.n;
  CellFunction out(g);
  const auto tb = expansion(b);
  const auto t1 = expansion(f1);
  const auto t2 = expansion(f2);
  for (const Term& P : tb) {
    for (const Term& Q1 : t1) {
      if (!strictly_contains(Q1.q, P.q, n)) continue;
      for (const Term& Q2 : t2) {
        double cap = 0.0;
        if (contains(P.q, Q2.q, n)) {
          cap = measure(Q2.q, n);
        } else if (contains(Q2.q, P.q, n)) {
          cap = measure(P.q, n);
        } else {
          continue;
        }
        add_scaled(out, P.c * Q1.c * Q2.c * std::pow(cap, alpha / n), P.h, Q1.h, Q2.h);
      }
    }
  }
  return out;
}

CellFunction xi(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const GridSpec& g = b.spec();
  const int n = g.n;
  CellFunction out(g);
  const auto t2 = expansion(f2);
  for (const Term& Q1 : expansion(b)) {
    const double a = Q1.c * inner(f1, Q1.h);
    for (const Term& Q2 : t2) {
      if (!strictly_contains(Q2.q, Q1.q, n)) continue;
      const double c = a * Q2.c * scale(Q1.q, n, alpha) * value_on(g, Q2, Q1.q) / measure(Q1.q, n);
      add_indicator(out, c, Q1.q);
    }
  }
  return out;
}

CellFunction theta(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const GridSpec& g = b.spec();
  const int n = g.n;
  CellFunction out(g);
  const auto t2 = expansion(f2);
  for (const Term& Q1 : expansion(b)) {
    const double a = Q1.c * inner(f1, Q1.h);
    for (const Term& Q2 : t2) {
      if (!strictly_contains(Q2.q, Q1.q, n)) continue;
      for (int l = Q2.q.level + 1; l < Q1.q.level; ++l) {
        const Cube Q = parent_at(Q1.q, l);
        const double c = a * Q2.c * value_on(g, Q2, Q) * scale(Q, n, alpha) / measure(Q, n);
        add_indicator(out, c, Q);
      }
    }
  }
  return out;
}

CellFunction lambda1_dual(const CellFunction& gfun, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const GridSpec& g = gfun.spec();
  const int n = g.n;
  CellFunction out(g);
  const auto t1 = expansion(f1);
  for (const Term& P : expansion(gfun)) {
    for (const Term& Q1 : t1) {
      if (!strictly_contains(Q1.q, P.q, n)) continue;
      const double c = P.c * Q1.c * average(f2, Q1.q) * scale(Q1.q, n, alpha) * value_on(g, Q1, P.q);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * P.h[i];
    }
  }
  return out;
}

CellFunction square_function(const CellFunction& f) { return shifted_square_function(f, 0); }

CellFunction shifted_square_function(const CellFunction& f, int k) {
  const GridSpec& g = f.spec();
  CellFunction energy(g);
  for (const Term& t : expansion(f)) {
    if (t.q.level < k) continue;
    const Cube a = parent_at(t.q, t.q.level - k);
    add_indicator(energy, t.c * t.c / measure(a, g.n), a);
  }
  return energy.map([](double v) { return std::sqrt(v); });
}

CellFunction maximal(const CellFunction& f) {
  const GridSpec& g = f.spec();
  const CellFunction a = f.map([](double v) { return std::abs(v); });
  CellFunction out(g);
  for (int l = 0; l <= g.L; ++l) {
    const auto avg = level_averages(a, l);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(out[c], avg[linear(cube_of(g, c, l), g.n)]);
  }
  return out;
}

double a_p(const CellFunction& w, double p) {
  const double pp = p / (p - 1.0);
  const CellFunction dual = w.map([&](double v) { return std::pow(v, 1.0 - pp); });
  double best = 0.0;
  for (const Cube& q : cubes(w.spec(), w.spec().L)) {
    best = std::max(best, average(w, q) * std::pow(average(dual, q), p - 1.0));
  }
  return best;
}

double a_infty(const CellFunction& w) {
  const GridSpec& g = w.spec();
  double best = 0.0;
  for (const Cube& q : cubes(g, g.L)) {
    // M(w 1_Q) on Q only needs subcubes of Q: larger cubes average less.
    double integral_m = 0.0;
    double mass = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (!cell_in(g, q, c)) continue;
      mass += w[c];
      double m = 0.0;
      for (int l = q.level; l <= g.L; ++l) m = std::max(m, average(w, cube_of(g, c, l)));
      integral_m += m;
    }
    best = std::max(best, integral_m / mass);
  }
  return best;
}

double bmo(const CellFunction& b) {
  const GridSpec& g = b.spec();
  double best = 0.0;
  for (const Cube& q : cubes(g, g.L)) {
    const double a = average(b, q);
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < b.size(); ++c) {
      if (!cell_in(g, q, c)) continue;
      s += std::abs(b[c] - a);
      ++count;
    }
    best = std::max(best, s / static_cast<double>(count));
  }
  return best;
}

double bmo_haar2(const CellFunction& b) {
  const GridSpec& g = b.spec();
  const auto terms = expansion(b);
  double best = 0.0;
  for (const Cube& J : cubes(g, g.L)) {
    double s = 0.0;
    for (const Term& t : terms) {
      if (contains(J, t.q, g.n)) s += t.c * t.c;
    }
    best = std::max(best, s / measure(J, g.n));
  }
  return std::sqrt(best);
}

}  // namespace oracle
