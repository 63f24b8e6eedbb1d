// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dyadic/error.hpp"
#include "dyadic/multiscale.hpp"
#include "dyadic/numerics.hpp"

namespace dyadic {

namespace {

// Level-`level` array seen from every cell.
std::vector<double> to_cells(const GridSpec& spec, int level, std::vector<double> v) {
  for (int l = level; l < spec.L; ++l) v = kernels::omp::prolong(spec, l, v);
  return v;
}

// int_Q g for every level-`level` cube, from cell values.
std::vector<double> cube_integrals(const GridSpec& spec, int level, std::vector<double> cells) {
  for (int l = spec.L - 1; l >= level; --l) cells = kernels::omp::restrict_sum(spec, l, cells);
  const double vol = spec.cell_volume();
  for (double& v : cells) v *= vol;
  return cells;
}

double max_over_cubes(const kernels::Levels& levels) {
  double m = 0.0;
  for (const auto& lvl : levels) {
    for (double v : lvl) m = std::max(m, v);
  }
  return m;
}

void require_p(double p) {
  if (!(p > 1.0 && std::isfinite(p))) throw DomainError("exponent must lie in (1, inf)");
}

// sup_Q of <w^s1>^t1 <w^s2>^t2
double two_average_sup(const Weight& w, double s1, double t1, double s2, double t2) {
  const kernels::Levels a = w.pow(s1).averages();
  const kernels::Levels b = w.pow(s2).averages();
  double m = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    for (std::size_t q = 0; q < a[l].size(); ++q) {
      m = std::max(m, std::pow(a[l][q], t1) * std::pow(b[l][q], t2));
    }
  }
  return m;
}

}  // namespace

Weight::Weight(CellFunction base) : base_(std::move(base)) {
  for (double v : base_.values()) {
    if (!(v > 0.0)) throw DomainError("weights must be strictly positive");
  }
  averages_ = average_pyramid(base_);
}

Weight Weight::constant(const GridSpec& spec, double c) { return Weight(CellFunction(spec, c)); }

Weight Weight::pow(double s) const {
  return Weight(base_.map([s](double v) { return std::pow(v, s); }));
}

double conjugate(double p) {
  require_p(p);
  return p / (p - 1.0);
}

Exponents Exponents::free(double p, double q) {
  require_p(p);
  require_p(q);
  return {p, q};
}

Exponents Exponents::scaling(double p, double alpha, int n) {
  require_p(p);
  const double inv_q = 1.0 / p - alpha / n;
  if (!(inv_q > 0.0 && inv_q < 1.0)) {
    throw DomainError("scaling law 1/q = 1/p - alpha/n gives q outside (1, inf)");
  }
  return {p, 1.0 / inv_q};
}

BilinearExponents BilinearExponents::scaling(double p1, double p2, double alpha, int n) {
  require_p(p1);
  require_p(p2);
  const double inv_q = 1.0 / p1 + 1.0 / p2 - alpha / n;
  if (!(inv_q > 0.0 && inv_q < 1.0)) {
    throw DomainError("scaling law 1/q = 1/p1 + 1/p2 - alpha/n gives q outside (1, inf)");
  }
  return {p1, p2, 1.0 / inv_q};
}

double a_p_constant(const Weight& w, double p) {
  const double pp = conjugate(p);
  return two_average_sup(w, 1.0, 1.0, 1.0 - pp, p - 1.0);
}

double a_pq_constant(const Weight& w, double p, double q) {
  require_p(q);
  const double pp = conjugate(p);
  return two_average_sup(w, q, 1.0 / q, -pp, 1.0 / pp);
}

double a_q0_of_power(const Weight& w, double p, double q) {
  require_p(q);
  const Exponents e{p, q};
  return a_p_constant(w.pow(q), e.q0());
}

double a_infty_constant(const Weight& w) {
  const GridSpec& spec = w.spec();
  const auto& avg = w.averages();
  // running[x] = max of <w>_R over R with x in R and level(R) >= l.
  std::vector<double> running(w.base().values().begin(), w.base().values().end());
  double best = 0.0;
  for (int l = spec.L; l >= 0; --l) {
    const std::vector<double> here = to_cells(spec, l, avg[l]);
    for (std::size_t x = 0; x < running.size(); ++x) running[x] = std::max(running[x], here[x]);
    const std::vector<double> integral = cube_integrals(spec, l, running);
    for (std::size_t q = 0; q < integral.size(); ++q) best = std::max(best, integral[q] / w.mass(l, q));
  }
  return best;
}

double a_infty_pair(const Weight& w, double p) {
  return std::max(a_infty_constant(w), a_infty_constant(w.pow(1.0 - conjugate(p))));
}

Weight bloom_weight(const Weight& mu, const Weight& lambda, double p, BloomFlavor flavor) {
  if (!(mu.spec() == lambda.spec())) throw DomainError("bloom_weight: weights live on different grids");
  if (flavor == BloomFlavor::p_root) require_p(p);
  const double s = flavor == BloomFlavor::ratio ? 1.0 : 1.0 / p;
  CellFunction nu(mu.spec());
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = std::pow(mu[i] / lambda[i], s);
  return Weight(std::move(nu));
}

namespace {

// sup_Q w(Q)^{-1} int_Q |b - <b>_Q|^r u dx, with u = 1 when absent.
double oscillation_sup(const CellFunction& b, const Weight& w, double r, const CellFunction* u) {
  if (!(b.spec() == w.spec())) throw DomainError("BMO: function and weight live on different grids");
  const GridSpec& spec = b.spec();
  const kernels::Levels avg = average_pyramid(b);
  double best = 0.0;
  for (int l = 0; l < spec.L; ++l) {
    std::vector<double> dev = to_cells(spec, l, avg[l]);
    for (std::size_t x = 0; x < dev.size(); ++x) {
      const double d = std::abs(b[x] - dev[x]);
      dev[x] = (r == 1.0 ? d : std::pow(d, r)) * (u ? (*u)[x] : 1.0);
    }
    const std::vector<double> integral = cube_integrals(spec, l, std::move(dev));
    for (std::size_t q = 0; q < integral.size(); ++q) best = std::max(best, integral[q] / w.mass(l, q));
  }
  return best;
}

}  // namespace

double bmo_weighted(const CellFunction& b, const Weight& w) { return oscillation_sup(b, w, 1.0, nullptr); }

double bmo(const CellFunction& b) { return bmo_weighted(b, Weight::constant(b.spec())); }

kernels::Levels local_energy(const CellFunction& b) {
  const GridSpec& spec = b.spec();
  const HaarCoeffs c = analyze(b);
  const int S = spec.signatures();
  kernels::Levels e(spec.L + 1);
  for (int l = 0; l < spec.L; ++l) {
    e[l].assign(spec.cubes_at(l), 0.0);
    const auto lvl = c.level(l);
    for (std::size_t q = 0; q < e[l].size(); ++q) {
      for (int s = 0; s < S; ++s) e[l][q] += lvl[q * S + s] * lvl[q * S + s];
    }
  }
  e[spec.L].assign(spec.cells(), 0.0);
  kernels::Levels out = kernels::omp::sum_up(spec, e);
  for (int l = 0; l <= spec.L; ++l) {
    const double inv = 1.0 / spec.measure_at(l);
    for (double& v : out[l]) v *= inv;
  }
  return out;
}

double bmo_haar2(const CellFunction& b) { return std::sqrt(max_over_cubes(local_energy(b))); }

double bmo_haar2(const CellFunction& b, const Weight& w, double r, double p) {
  if (!(r >= 1.0)) throw DomainError("BMO^r needs r >= 1");
  const Weight dual = w.pow(1.0 - conjugate(p));
  return std::pow(oscillation_sup(b, w, r, &dual.base()), 1.0 / r);
}

Weight power_weight(const GridSpec& spec, double beta, std::span<const double> x0) {
  if (static_cast<int>(x0.size()) < spec.n) throw DomainError("power_weight: centre has too few coordinates");
  if (!std::isfinite(beta)) throw DomainError("power_weight: beta must be finite");
  const double floor = 0.5 * std::ldexp(1.0, -spec.L);
  CellFunction w(spec);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto x = cell_center(spec, i);
    double d2 = 0.0;
    for (int k = 0; k < spec.n; ++k) d2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    w[i] = std::pow(std::max(std::sqrt(d2), floor), beta);
  }
  return Weight(std::move(w));
}

Weight exp_bmo(double delta, const CellFunction& b0) {
  if (!std::isfinite(delta)) throw DomainError("exp_bmo: delta must be finite");
  return Weight(b0.map([delta](double v) { return std::exp(delta * v); }));
}

CellFunction haar_random(const GridSpec& spec, std::uint64_t seed, double packing, int depth) {
  if (!(packing > 0.0 && packing <= 1.0)) throw DomainError("haar_random: packing must lie in (0, 1]");
  const int top = depth < 0 ? spec.L : std::min(depth, spec.L);
  HaarCoeffs c(spec);
  const int S = spec.signatures();
  for (int l = 0; l < top; ++l) {
    auto& lvl = c.levels()[l];
    const double root = std::sqrt(spec.measure_at(l));
    for (std::size_t q = 0; q < spec.cubes_at(l); ++q) {
      const std::uint64_t key = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(l)), q);
      for (int e = 0; e < S; ++e) {
        const double u = to_unit_interval(mix_seed(key, static_cast<std::uint64_t>(e)));
        lvl[q * S + e] = packing * (2.0 * u - 1.0) * root;
      }
    }
  }
  return synthesize(c);
}

CellFunction uniform_random(const GridSpec& spec, std::uint64_t seed, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("uniform_random: empty range");
  Rng rng(seed);
  CellFunction f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(lo, hi);
  return f;
}

}  // namespace dyadic
