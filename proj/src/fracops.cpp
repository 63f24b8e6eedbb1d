// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/fracops.hpp"

#include <cmath>
#include <string>

#include "dyadic/error.hpp"
#include "dyadic/kernels.hpp"
#include "dyadic/multiscale.hpp"

namespace dyadic {

namespace {

void check_order(double alpha, double upper, bool closed, const char* what) {
  if (!(alpha > 0.0 && (alpha < upper || (closed && alpha == upper)))) {
    throw DomainError(std::string(what) + ": alpha must lie in (0, " + std::to_string(upper) + (closed ? "]" : ")"));
  }
}

// terms[l][Q] = 2^{-l alpha} * weight(l, Q), summed down to cells, plus the
// geometric tail below resolution applied to `tail_values`.
CellFunction accumulate_with_tail(const GridSpec& spec, kernels::Levels terms, const FracParams& fp,
                                  std::span<const double> tail_values) {
  for (int l = 0; l <= spec.L; ++l) {
    const double s = std::exp2(-l * fp.alpha);
    for (double& v : terms[l]) v *= s;
  }
  std::vector<double> out = kernels::omp::accumulate_down(spec, terms);
  const double tail = std::exp2(-spec.L * fp.alpha) * fp.c;
  for (std::size_t x = 0; x < out.size(); ++x) out[x] += tail * tail_values[x];
  return CellFunction(spec, std::move(out));
}

}  // namespace

double c_alpha(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("c_alpha needs alpha > 0");
  return 1.0 / (std::exp2(alpha) - 1.0);
}

CellFunction frac_integral(const CellFunction& f, const FracParams& fp) {
  check_order(fp.alpha, f.spec().n, true, "frac_integral");
  return accumulate_with_tail(f.spec(), average_pyramid(f), fp, f.values());
}

CellFunction frac_integral(const CellFunction& f, double alpha) { return frac_integral(f, FracParams(alpha)); }

CellFunction bifrac_integral(const CellFunction& f1, const CellFunction& f2, const FracParams& fp) {
  if (!(f1.spec() == f2.spec())) throw DomainError("bifrac_integral: inputs live on different grids");
  check_order(fp.alpha, 2.0 * f1.spec().n, false, "bifrac_integral");
  kernels::Levels a1 = average_pyramid(f1);
  const kernels::Levels a2 = average_pyramid(f2);
  for (std::size_t l = 0; l < a1.size(); ++l) {
    for (std::size_t q = 0; q < a1[l].size(); ++q) a1[l][q] *= a2[l][q];
  }
  const CellFunction prod = f1 * f2;
  return accumulate_with_tail(f1.spec(), std::move(a1), fp, prod.values());
}

CellFunction bifrac_integral(const CellFunction& f1, const CellFunction& f2, double alpha) {
  return bifrac_integral(f1, f2, FracParams(alpha));
}

CellFunction frac_maximal(std::span<const CellFunction> fs, double alpha) {
  const int m = static_cast<int>(fs.size());
  if (m < 1 || m > 2) throw DomainError("frac_maximal supports one or two functions");
  const GridSpec& spec = fs[0].spec();
  for (const auto& f : fs) {
    if (!(f.spec() == spec)) throw DomainError("frac_maximal: inputs live on different grids");
  }
  if (!(alpha >= 0.0 && alpha < m * spec.n)) throw DomainError("frac_maximal: alpha must lie in [0, mn)");
  kernels::Levels terms = average_pyramid(fs[0].map([](double v) { return std::abs(v); }));
  for (int i = 1; i < m; ++i) {
    const kernels::Levels other = average_pyramid(fs[i].map([](double v) { return std::abs(v); }));
    for (std::size_t l = 0; l < terms.size(); ++l) {
      for (std::size_t q = 0; q < terms[l].size(); ++q) terms[l][q] *= other[l][q];
    }
  }
  // prod_i |Q|^{alpha/(mn)} = 2^{-l alpha} at level l.
  for (int l = 0; l <= spec.L; ++l) {
    const double s = std::exp2(-l * alpha);
    for (double& v : terms[l]) v *= s;
  }
  return CellFunction(spec, std::move(kernels::omp::prefix_max_down(spec, terms)[spec.L]));
}

namespace {

// E[l][Q] = sum_e |<f, h_Q^e>|^2 for l < L.
kernels::Levels coefficient_energy(const HaarCoeffs& c) {
  const GridSpec& spec = c.spec();
  const int S = spec.signatures();
  kernels::Levels e(spec.L + 1);
  for (int l = 0; l < spec.L; ++l) {
    const auto& lvl = c.level(l);
    e[l].assign(spec.cubes_at(l), 0.0);
    for (std::size_t q = 0; q < e[l].size(); ++q) {
      double acc = 0.0;
      for (int s = 0; s < S; ++s) acc += lvl[q * S + s] * lvl[q * S + s];
      e[l][q] = acc;
    }
  }
  return e;
}

CellFunction root_of_density(const GridSpec& spec, kernels::Levels terms) {
  for (int l = 0; l <= spec.L; ++l) {
    const double inv = 1.0 / spec.measure_at(l);
    for (double& v : terms[l]) v *= inv;
  }
  std::vector<double> out = kernels::omp::accumulate_down(spec, terms);
  for (double& v : out) v = std::sqrt(v);
  return CellFunction(spec, std::move(out));
}

}  // namespace

CellFunction square_function(const CellFunction& f) {
  return root_of_density(f.spec(), coefficient_energy(analyze(f)));
}

CellFunction shifted_square_function(const CellFunction& f, int k) {
  if (k < 0) throw DomainError("shifted_square_function: k must be non-negative");
  const GridSpec& spec = f.spec();
  const kernels::Levels energy = coefficient_energy(analyze(f));
  kernels::Levels charged(spec.L + 1);
  for (int j = 0; j + k < spec.L; ++j) {
    // Sum the energies exactly k generations below each level-j cube.
    std::vector<double> acc = energy[j + k];
    for (int l = j + k - 1; l >= j; --l) acc = kernels::omp::restrict_sum(spec, l, acc);
    charged[j] = std::move(acc);
  }
  return root_of_density(spec, std::move(charged));
}

}  // namespace dyadic
