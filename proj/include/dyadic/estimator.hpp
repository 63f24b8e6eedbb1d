// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dyadic/cell_function.hpp"
#include "dyadic/fracops.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

/// (sum_cells |f|^p w^p vol)^{1/p}, the norm of L^p(w^p).
double weighted_norm(const CellFunction& f, double p, const Weight& w);
/// Unweighted L^p norm on the unit cube.
double lp_norm(const CellFunction& f, double p);

/// Real-linear map on cell functions. `adjoint` is taken with respect to
/// the volume-weighted inner product; when empty the estimator falls back to
/// materializing the matrix.
struct LinearOperator {
  std::function<CellFunction(const CellFunction&)> apply;
  std::function<CellFunction(const CellFunction&)> adjoint;
};

/// Bilinear map. adjoint(slot, other, g) is the adjoint of the linear map
/// f_slot -> T(f1, f2) with the remaining argument fixed to `other`.
struct BilinearOperator {
  std::function<CellFunction(const CellFunction&, const CellFunction&)> apply;
  std::function<CellFunction(int, const CellFunction&, const CellFunction&)> adjoint;
};

struct Budget {
  int pool = 8;          ///< random starts
  int iterations = 40;   ///< ascent steps per start
  int screened = 2;      ///< best indicator candidates promoted to ascent
  double tolerance = 1e-10;
};

struct NormEstimate {
  double value = 0.0;                 ///< certified lower bound
  std::vector<CellFunction> witness;  ///< one input (linear) or two (bilinear)
  int iterations = 0;                 ///< ascent steps spent in total
  int best_start = -1;                ///< index in the start list, -1 for a screened indicator
  std::uint64_t seed = 0;
  Budget budget;
  bool budget_exhausted = false;      ///< some ascent stopped on the step limit
  bool zero_operator = false;         ///< every start mapped to zero
};

/// Quotient ||T f||_{L^q(lambda^q)} / ||f||_{L^p(mu^p)}.
double rayleigh_quotient(const LinearOperator& T, const CellFunction& f, const Exponents& ex, const Weight& mu,
                         const Weight& lambda);
/// ||T(f1, f2)||_q / (||f1||_{p1} ||f2||_{p2}), unweighted.
double rayleigh_quotient(const BilinearOperator& T, const CellFunction& f1, const CellFunction& f2,
                         const BilinearExponents& ex);

/// Lower estimate for the L^p(mu^p) -> L^q(lambda^q) norm. Deterministic in
/// (seed, budget) regardless of the thread count.
NormEstimate norm_estimate(const LinearOperator& T, const GridSpec& spec, const Exponents& ex, const Weight& mu,
                           const Weight& lambda, const Budget& budget, std::uint64_t seed);
NormEstimate norm_estimate(const BilinearOperator& T, const GridSpec& spec, const BilinearExponents& ex,
                           const Budget& budget, std::uint64_t seed);

LinearOperator identity_operator();
LinearOperator frac_operator(const FracParams& fp);
/// C_b^k(I_alpha); adjoint (-1)^k C_b^k.
LinearOperator commutator_operator(const CellFunction& b, const FracParams& fp, int k);
/// [b, I_alpha]_slot on pairs.
BilinearOperator bilinear_commutator_operator(const CellFunction& b, const FracParams& fp, int slot = 1);

/// Circle |z| = radius sampled at `nodes` equispaced points; `order` is the
/// derivative order k of the Cauchy formula.
struct ContourSpec {
  double radius = 0.5;
  int nodes = 128;
  int order = 0;
};

/// Trapezoidal Cauchy integral of F(z) = e^{bz} [b, I_alpha] e^{-bz} f,
/// which reproduces C_b^{order+1}(I_alpha) f.
CellFunction cauchy_commutator(const CellFunction& b, const CellFunction& f, const FracParams& fp,
                               const ContourSpec& contour);

/// c / (||b||_BMO max{(mu^q)_{A_q0}, (lambda^q)_{A_q0}}), using
/// (w)_{A_s} = max{[w]_{A_inf}, [w^{1-s'}]_{A_inf}}.
double cauchy_radius(const CellFunction& b, const Weight& mu, const Weight& lambda, double p, double q,
                     double c = 1.0);

struct ProbeResult {
  double value = 0.0;
  CubeId cube;          ///< J
  double energy = 0.0;  ///< |J|^{-1} sum_{I in J} |<b', h_I>|^2 after normalization
  double q = 0.0;
};

/// Normalizes b to ||b||_{BMO^2} = 1, picks the cube J of largest local
/// energy (coarsest on ties) and returns ||1_J [b', I]_1(1_J, 1_J)||_q / |J|^{1/p}
/// with b' the part of b supported on cubes inside J. q defaults to the
/// bilinear scaling law.
ProbeResult lower_bound_probe(const CellFunction& b, double alpha, double p1, double p2,
                              std::optional<double> q = std::nullopt);

}  // namespace dyadic
