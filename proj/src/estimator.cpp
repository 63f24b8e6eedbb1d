// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "dyadic/error.hpp"
#include "dyadic/multiscale.hpp"
#include "dyadic/numerics.hpp"
#include "dyadic/paraproducts.hpp"

namespace dyadic {

namespace {

// Prescreening looks at every cube on the coarsest levels, up to this many.
constexpr std::size_t kScreenCubes = 4096;
// The dense adjoint fallback refuses grids with more cells than this.
constexpr std::size_t kDenseCells = 4096;

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0 && std::isfinite(p))) throw DomainError(std::string(what) + ": exponent must lie in [1, inf)");
}

double power_sum(const CellFunction& f, double p, const Weight* w) {
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = w ? std::abs(f[i]) * (*w)[i] : std::abs(f[i]);
    terms[i] = std::pow(v, p);
  }
  return pairwise_sum(terms) * f.cell_volume();
}

CellFunction constant_like(const GridSpec& spec, double c) { return CellFunction(spec, c); }

CellFunction centered(const CellFunction& b) {
  const double m = integral(b);
  return b.map([m](double v) { return v - m; });
}

// sign(v) |v|^e
double signed_power(double v, double e) {
  if (v == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(v), e), v);
}

std::function<CellFunction(const CellFunction&)> dense_adjoint(const LinearOperator& T, const GridSpec& spec) {
  if (spec.cells() > kDenseCells) throw DomainError("operator has no adjoint and the grid is too large to materialize");
  // column i of the matrix is T(e_i); T* = A^T in the volume-weighted pairing.
  auto columns = std::make_shared<std::vector<CellFunction>>();
  columns->reserve(spec.cells());
  for (std::size_t i = 0; i < spec.cells(); ++i) {
    CellFunction e(spec);
    e[i] = 1.0;
    columns->push_back(T.apply(e));
  }
  return [columns, spec](const CellFunction& g) {
    CellFunction out(spec);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto col = (*columns)[i].values();
      std::vector<double> terms(col.size());
      for (std::size_t x = 0; x < col.size(); ++x) terms[x] = col[x] * g[x];
      out[i] = pairwise_sum(terms);
    }
    return out;
  };
}

CellFunction random_start(const GridSpec& spec, Rng& rng, int kind) {
  switch (kind % 4) {
    case 0: {
      CellFunction f(spec);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
      return f;
    }
    case 1: {
      HaarCoeffs c(spec);
      c.set_mean(rng.uniform(-1.0, 1.0));
      const int S = spec.signatures();
      for (int t = 0; t < 4; ++t) {
        const int l = static_cast<int>(rng.below(static_cast<std::size_t>(spec.L)));
        const std::size_t q = rng.below(spec.cubes_at(l));
        const auto e = static_cast<std::uint32_t>(rng.below(static_cast<std::size_t>(S)));
        c.set(CubeId::from_linear(spec.n, l, q), HaarSignature(e), rng.uniform(-1.0, 1.0));
      }
      return synthesize(c);
    }
    case 2: {
      std::array<double, kMaxDim> freq{}, phase{};
      for (int k = 0; k < spec.n; ++k) {
        freq[k] = static_cast<double>(1 + rng.below(3));
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      const double offset = rng.uniform(-0.5, 0.5);
      CellFunction f(spec);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = cell_center(spec, i);
        double v = 1.0;
        for (int k = 0; k < spec.n; ++k) v *= std::cos(2.0 * std::numbers::pi * freq[k] * x[k] + phase[k]);
        f[i] = v + offset;
      }
      return f;
    }
    default: {
      const int l = static_cast<int>(rng.below(static_cast<std::size_t>(spec.L + 1)));
      return indicator(spec, CubeId::from_linear(spec.n, l, rng.below(spec.cubes_at(l))));
    }
  }
}

std::vector<CubeId> screening_cubes(const GridSpec& spec) {
  std::vector<CubeId> out;
  for (int l = 0; l <= spec.L; ++l) {
    if (out.size() + spec.cubes_at(l) > kScreenCubes) break;
    for (std::size_t q = 0; q < spec.cubes_at(l); ++q) out.push_back(CubeId::from_linear(spec.n, l, q));
  }
  return out;
}

// Index of the largest value; the lowest index wins ties.
std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Indices of the k largest values, ties broken by index.
std::vector<std::size_t> top_k(const std::vector<double>& v, int k) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(k, 0))));
  return idx;
}

struct Ascent {
  std::vector<CellFunction> best;
  double value = 0.0;
  int steps = 0;
  bool hit_limit = false;
};

}  // namespace

double weighted_norm(const CellFunction& f, double p, const Weight& w) {
  require_exponent(p, "weighted_norm");
  if (!(f.spec() == w.spec())) throw DomainError("weighted_norm: function and weight live on different grids");
  return std::pow(power_sum(f, p, &w), 1.0 / p);
}

double lp_norm(const CellFunction& f, double p) {
  require_exponent(p, "lp_norm");
  return std::pow(power_sum(f, p, nullptr), 1.0 / p);
}

double rayleigh_quotient(const LinearOperator& T, const CellFunction& f, const Exponents& ex, const Weight& mu,
                         const Weight& lambda) {
  const double den = weighted_norm(f, ex.p, mu);
  if (den == 0.0) return 0.0;
  return weighted_norm(T.apply(f), ex.q, lambda) / den;
}

double rayleigh_quotient(const BilinearOperator& T, const CellFunction& f1, const CellFunction& f2,
                         const BilinearExponents& ex) {
  const double den = lp_norm(f1, ex.p1) * lp_norm(f2, ex.p2);
  if (den == 0.0) return 0.0;
  return lp_norm(T.apply(f1, f2), ex.q) / den;
}

NormEstimate norm_estimate(const LinearOperator& T, const GridSpec& spec, const Exponents& ex, const Weight& mu,
                           const Weight& lambda, const Budget& budget, std::uint64_t seed) {
  if (!T.apply) throw DomainError("norm_estimate: operator has no apply");
  if (!(mu.spec() == spec && lambda.spec() == spec)) throw DomainError("norm_estimate: weights live on another grid");
  require_exponent(ex.p, "norm_estimate");
  require_exponent(ex.q, "norm_estimate");
  if (!(ex.p > 1.0)) throw DomainError("norm_estimate: p must exceed 1");
  const auto adjoint = T.adjoint ? T.adjoint : dense_adjoint(T, spec);

  auto normalize = [&](CellFunction f) {
    const double nrm = weighted_norm(f, ex.p, mu);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
  };

  // Indicators of coarse cubes.
  const std::vector<CubeId> cubes = screening_cubes(spec);
  std::vector<double> screen(cubes.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    screen[i] = rayleigh_quotient(T, indicator(spec, cubes[i]), ex, mu, lambda);
  }

  std::vector<CellFunction> starts{constant_like(spec, 1.0)};
  for (int s = 0; s < budget.pool; ++s) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
    starts.push_back(random_start(spec, rng, s));
  }
  for (std::size_t i : top_k(screen, budget.screened)) starts.push_back(indicator(spec, cubes[i]));

  std::vector<Ascent> runs(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Ascent& run = runs[s];
    CellFunction f = normalize(starts[s]);
    double value = rayleigh_quotient(T, f, ex, mu, lambda);
    run.best = {f};
    run.value = value;
    bool converged = false;
    for (int it = 0; it < budget.iterations; ++it) {
      const CellFunction g = T.apply(f);
      CellFunction d(spec);
      for (std::size_t x = 0; x < d.size(); ++x) d[x] = signed_power(g[x], ex.q - 1.0) * std::pow(lambda[x], ex.q);
      const CellFunction u = adjoint(d);
      if (max_abs(u) == 0.0) {
        converged = true;
        break;
      }
      CellFunction next(spec);
      for (std::size_t x = 0; x < next.size(); ++x) {
        next[x] = signed_power(u[x] * std::pow(mu[x], -ex.p), 1.0 / (ex.p - 1.0));
      }
      next = normalize(std::move(next));
      const double v = rayleigh_quotient(T, next, ex, mu, lambda);
      ++run.steps;
      if (v > run.value) {
        run.value = v;
        run.best = {next};
      }
      f = std::move(next);
      if (v - value <= budget.tolerance * std::max(1.0, value)) {
        converged = true;
        break;
      }
      value = v;
    }
    run.hit_limit = !converged && budget.iterations > 0;
  }

  NormEstimate est;
  est.seed = seed;
  est.budget = budget;
  const std::size_t best_screen = screen.empty() ? 0 : argmax(screen);
  if (!screen.empty()) {
    est.value = screen[best_screen];
    est.witness = {indicator(spec, cubes[best_screen])};
  }
  for (std::size_t s = 0; s < runs.size(); ++s) {
    est.iterations += runs[s].steps;
    est.budget_exhausted = est.budget_exhausted || runs[s].hit_limit;
    if (runs[s].value > est.value || est.witness.empty()) {
      est.value = runs[s].value;
      est.witness = runs[s].best;
      est.best_start = static_cast<int>(s);
    }
  }
  if (est.value == 0.0) {
    est.zero_operator = true;
    est.witness = {normalize(starts.front())};
    est.best_start = 0;
  } else {
    // Recompute from the reported witness so the value is exactly its quotient.
    est.value = rayleigh_quotient(T, est.witness.front(), ex, mu, lambda);
  }
  return est;
}

NormEstimate norm_estimate(const BilinearOperator& T, const GridSpec& spec, const BilinearExponents& ex,
                           const Budget& budget, std::uint64_t seed) {
  if (!T.apply) throw DomainError("norm_estimate: operator has no apply");
  require_exponent(ex.q, "norm_estimate");
  if (!(ex.p1 > 1.0 && ex.p2 > 1.0 && std::isfinite(ex.p1) && std::isfinite(ex.p2))) {
    throw DomainError("norm_estimate: p1 and p2 must lie in (1, inf)");
  }
  auto adjoint = T.adjoint;
  if (!adjoint) {
    adjoint = [&T, spec](int slot, const CellFunction& other, const CellFunction& g) {
      LinearOperator partial;
      partial.apply = [&T, &other, slot](const CellFunction& f) {
        return slot == 1 ? T.apply(f, other) : T.apply(other, f);
      };
      return dense_adjoint(partial, spec)(g);
    };
  }

  auto normalize = [](CellFunction f, double p) {
    const double nrm = lp_norm(f, p);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
  };

  const std::vector<CubeId> cubes = screening_cubes(spec);
  std::vector<double> screen(cubes.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const CellFunction e = indicator(spec, cubes[i]);
    screen[i] = rayleigh_quotient(T, e, e, ex);
  }

  using Pair = std::vector<CellFunction>;
  std::vector<Pair> starts{{constant_like(spec, 1.0), constant_like(spec, 1.0)}};
  for (int s = 0; s < budget.pool; ++s) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
    CellFunction a = random_start(spec, rng, s);
    CellFunction b = random_start(spec, rng, s + 1);
    starts.push_back({std::move(a), std::move(b)});
  }
  for (std::size_t i : top_k(screen, budget.screened)) {
    const CellFunction e = indicator(spec, cubes[i]);
    starts.push_back({e, e});
  }

  std::vector<Ascent> runs(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Ascent& run = runs[s];
    CellFunction f1 = normalize(starts[s][0], ex.p1);
    CellFunction f2 = normalize(starts[s][1], ex.p2);
    double value = rayleigh_quotient(T, f1, f2, ex);
    run.best = {f1, f2};
    run.value = value;
    bool converged = false;
    for (int it = 0; it < budget.iterations; ++it) {
      bool stalled = false;
      for (int slot = 1; slot <= 2; ++slot) {
        const CellFunction g = T.apply(f1, f2);
        const CellFunction d = g.map([&ex](double v) { return signed_power(v, ex.q - 1.0); });
        const CellFunction u = adjoint(slot, slot == 1 ? f2 : f1, d);
        if (max_abs(u) == 0.0) {
          stalled = true;
          break;
        }
        const double p = slot == 1 ? ex.p1 : ex.p2;
        CellFunction next = normalize(u.map([p](double v) { return signed_power(v, 1.0 / (p - 1.0)); }), p);
        (slot == 1 ? f1 : f2) = std::move(next);
      }
      if (stalled) {
        converged = true;
        break;
      }
      const double v = rayleigh_quotient(T, f1, f2, ex);
      ++run.steps;
      if (v > run.value) {
        run.value = v;
        run.best = {f1, f2};
      }
      if (v - value <= budget.tolerance * std::max(1.0, value)) {
        converged = true;
        break;
      }
      value = v;
    }
    run.hit_limit = !converged && budget.iterations > 0;
  }

  NormEstimate est;
  est.seed = seed;
  est.budget = budget;
  if (!screen.empty()) {
    const std::size_t i = argmax(screen);
    const CellFunction e = indicator(spec, cubes[i]);
    est.value = screen[i];
    est.witness = {e, e};
  }
  for (std::size_t s = 0; s < runs.size(); ++s) {
    est.iterations += runs[s].steps;
    est.budget_exhausted = est.budget_exhausted || runs[s].hit_limit;
    if (runs[s].value > est.value || est.witness.empty()) {
      est.value = runs[s].value;
      est.witness = runs[s].best;
      est.best_start = static_cast<int>(s);
    }
  }
  if (est.value == 0.0) {
    est.zero_operator = true;
    est.witness = {normalize(starts.front()[0], ex.p1), normalize(starts.front()[1], ex.p2)};
    est.best_start = 0;
  } else {
    est.value = rayleigh_quotient(T, est.witness[0], est.witness[1], ex);
  }
  return est;
}

LinearOperator identity_operator() {
  auto id = [](const CellFunction& f) { return f; };
  return {id, id};
}

LinearOperator frac_operator(const FracParams& fp) {
  auto I = [fp](const CellFunction& f) { return frac_integral(f, fp); };
  return {I, I};
}

LinearOperator commutator_operator(const CellFunction& b, const FracParams& fp, int k) {
  if (k < 1) throw DomainError("commutator order k must be at least 1");
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return {[b, fp, k](const CellFunction& f) { return commutator_linear(b, f, fp, k); },
          [b, fp, k, sign](const CellFunction& g) { return sign * commutator_linear(b, g, fp, k); }};
}

BilinearOperator bilinear_commutator_operator(const CellFunction& b, const FracParams& fp, int slot) {
  if (slot != 1 && slot != 2) throw DomainError("commutator slot must be 1 or 2");
  const CellFunction bt = centered(b);
  BilinearOperator T;
  T.apply = [bt, fp, slot](const CellFunction& f1, const CellFunction& f2) {
    return commutator_bilinear(bt, f1, f2, fp, slot);
  };
  // I(., h) is symmetric for every fixed h, which gives each adjoint in closed form.
  T.adjoint = [bt, fp, slot](int var, const CellFunction& other, const CellFunction& g) -> CellFunction {
    if (var == slot) {
      return var == 1 ? -1.0 * commutator_bilinear(bt, g, other, fp, 1)
                      : -1.0 * commutator_bilinear(bt, other, g, fp, 2);
    }
    if (slot == 1) return bifrac_integral(other, bt * g, fp) - bifrac_integral(bt * other, g, fp);
    return bifrac_integral(bt * g, other, fp) - bifrac_integral(g, bt * other, fp);
  };
  return T;
}

CellFunction cauchy_commutator(const CellFunction& b, const CellFunction& f, const FracParams& fp,
                               const ContourSpec& contour) {
  if (!(b.spec() == f.spec())) throw DomainError("cauchy_commutator: inputs live on different grids");
  if (contour.order < 0) throw DomainError("cauchy_commutator: derivative order must be non-negative");
  if (contour.nodes < 1 || contour.nodes < 4 * contour.order) throw DomainError("insufficient quadrature nodes");
  if (!(contour.radius > 0.0 && std::isfinite(contour.radius))) {
    throw DomainError("cauchy_commutator: radius must be positive");
  }
  const GridSpec& spec = f.spec();
  const CellFunction bt = centered(b);
  const int M = contour.nodes;
  const int k = contour.order;
  const double r = contour.radius;

  std::vector<CellFunction> parts(static_cast<std::size_t>(M));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / M;
    const std::complex<double> z = std::polar(r, theta);
    CellFunction re(spec), im(spec);
    for (std::size_t x = 0; x < f.size(); ++x) {
      const std::complex<double> v = std::exp(-bt[x] * z) * f[x];
      re[x] = v.real();
      im[x] = v.imag();
    }
    const CellFunction Tre = commutator_linear(bt, re, fp, 1);
    const CellFunction Tim = commutator_linear(bt, im, fp, 1);
    const std::complex<double> zk = std::pow(z, -k);
    CellFunction out(spec);
    for (std::size_t x = 0; x < f.size(); ++x) {
      const std::complex<double> v = std::exp(bt[x] * z) * std::complex<double>(Tre[x], Tim[x]) * zk;
      out[x] = v.real();
    }
    parts[static_cast<std::size_t>(j)] = std::move(out);
  }

  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  CellFunction sum(spec);
  std::vector<double> column(static_cast<std::size_t>(M));
  for (std::size_t x = 0; x < sum.size(); ++x) {
    for (int j = 0; j < M; ++j) column[static_cast<std::size_t>(j)] = parts[static_cast<std::size_t>(j)][x];
    sum[x] = factorial / M * pairwise_sum(column);
  }
  return sum;
}

double cauchy_radius(const CellFunction& b, const Weight& mu, const Weight& lambda, double p, double q, double c) {
  if (!(c > 0.0)) throw DomainError("cauchy_radius: constant must be positive");
  const double osc = bmo(b);
  if (!(osc > 1e-14 * std::max(1.0, max_abs(b)))) throw DomainError("cauchy_radius: b is constant");
  const Exponents ex = Exponents::free(p, q);
  const double q0 = ex.q0();
  const double a_mu = a_infty_pair(mu.pow(q), q0);
  const double a_lambda = a_infty_pair(lambda.pow(q), q0);
  return c / (osc * std::max(a_mu, a_lambda));
}

ProbeResult lower_bound_probe(const CellFunction& b, double alpha, double p1, double p2, std::optional<double> q) {
  const GridSpec& spec = b.spec();
  const double scale = bmo_haar2(b);
  if (!(scale > 0.0)) throw DomainError("lower_bound_probe: b has no oscillation");
  double qq = 0.0;
  if (q) {
    qq = *q;
    require_exponent(qq, "lower_bound_probe");
    if (!(p1 > 1.0 && p2 > 1.0)) throw DomainError("lower_bound_probe: p1 and p2 must exceed 1");
  } else {
    qq = BilinearExponents::scaling(p1, p2, alpha, spec.n).q;
  }
  const CellFunction bn = (1.0 / scale) * b;
  const kernels::Levels energy = local_energy(bn);

  ProbeResult res;
  res.q = qq;
  res.energy = -1.0;
  for (int l = 0; l < spec.L; ++l) {
    for (std::size_t i = 0; i < energy[l].size(); ++i) {
      if (energy[l][i] > res.energy) {
        res.energy = energy[l][i];
        res.cube = CubeId::from_linear(spec.n, l, i);
      }
    }
  }

  const CellFunction e = indicator(spec, res.cube);
  const CellFunction C = commutator_bilinear(bn, e, e, alpha, 1);
  const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
  res.value = lp_norm(C * e, qq) / std::pow(res.cube.measure(spec.n), 1.0 / p);
  return res;
}

}  // namespace dyadic
