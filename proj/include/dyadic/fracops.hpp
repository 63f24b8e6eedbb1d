// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "dyadic/cell_function.hpp"

namespace dyadic {

/// 1 / (2^alpha - 1), the sum of 2^{-k alpha} over k >= 1.
double c_alpha(double alpha);

/// Order alpha and the tail constant used below resolution. The constant is
/// c_alpha(alpha) unless a caller deliberately perturbs it.
struct FracParams {
  double alpha = 0.5;
  double c = 0.0;

  FracParams() = default;
  explicit FracParams(double a) : alpha(a), c(c_alpha(a)) {}
  FracParams(double a, double tail) : alpha(a), c(tail) {}
};

/// Linear dyadic fractional integral, 0 < alpha <= n. The cubes below level
/// L are summed in closed form, so I(h_Q^e) = c_alpha |Q|^{alpha/n} h_Q^e
/// holds exactly for every Haar function on the grid.
CellFunction frac_integral(const CellFunction& f, const FracParams& fp);
CellFunction frac_integral(const CellFunction& f, double alpha);

/// Bilinear version, 0 < alpha < 2n.
CellFunction bifrac_integral(const CellFunction& f1, const CellFunction& f2, const FracParams& fp);
CellFunction bifrac_integral(const CellFunction& f1, const CellFunction& f2, double alpha);

/// sup over grid cubes Q containing x of prod_i |Q|^{alpha/(mn)} <|f_i|>_Q,
/// m = fs.size() in {1, 2}, 0 <= alpha < mn.
CellFunction frac_maximal(std::span<const CellFunction> fs, double alpha);

/// (sum over Q containing x, e of |<f, h_Q^e>|^2 / |Q|)^{1/2}.
CellFunction square_function(const CellFunction& f);

/// Square function with every coefficient of I charged to its k-th ancestor.
CellFunction shifted_square_function(const CellFunction& f, int k);

}  // namespace dyadic
