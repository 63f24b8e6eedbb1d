// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "dyadic/cell_function.hpp"
#include "dyadic/fracops.hpp"

// Every operator here reads only the cancellative Haar coefficients of b, so
// adding a constant to b never changes the output.

namespace dyadic {

/// sum_{Q,e} <b, h_Q^e> <f>_Q h_Q^e
CellFunction pi(const CellFunction& b, const CellFunction& f);
/// sum_{Q,e} <b, h_Q^e> <f, h_Q^e> 1_Q / |Q|, the adjoint of pi(b, .).
CellFunction pi_star(const CellFunction& b, const CellFunction& f);
/// sum_Q sum_{e != h} <b, h_Q^e> <f, h_Q^h> |Q|^{-1/2} h_Q^{e+h}; zero for n = 1.
CellFunction gamma(const CellFunction& b, const CellFunction& f);

enum class ShiftMode { b_first, f_first };

/// B_k(b, f) = sum_Q sum_{e,h} <b, h_Q^e> <f, h_{Q^(k)}^h> h_{Q^(k)}^h h_Q^e,
/// over cubes with level >= k. f_first evaluates B_k(f, b).
CellFunction b_shift(const CellFunction& b, const CellFunction& f, int k, ShiftMode mode = ShiftMode::b_first);

/// sum_{k >= 1} 2^{-k alpha} B_k(b, g), evaluated in one pass.
CellFunction shift_series(const CellFunction& b, const CellFunction& g, double alpha);

/// k-th order commutator sum_j C(k,j) (-1)^{k-j} b^j I(b^{k-j} f), k >= 1.
CellFunction commutator_linear(const CellFunction& b, const CellFunction& f, const FracParams& fp, int k);
CellFunction commutator_linear(const CellFunction& b, const CellFunction& f, double alpha, int k);

/// The four composed paraproducts whose signed sum is [b, I]f.
///
/// On the finite tree the identity also needs `mean_term` = -<f> I(b - <b>),
/// which vanishes for mean-zero f. The B_k series carries 2^{-k alpha}:
/// |Q^(k)|^{alpha/n} / |Q|^{alpha/n} = 2^{k alpha} in every dimension.
struct LinearDecomposition {
  CellFunction pi_after_I;       ///< Pi_b(I f)
  CellFunction I_after_pi_star;  ///< I(Pi*_b f)
  CellFunction pi_star_after_I;  ///< Pi*_b(I f)
  CellFunction shift_series;     ///< sum_k 2^{-k alpha} B_k(b, I f)
  CellFunction mean_term;
  std::array<double, 4> signs{+1.0, -1.0, +1.0, -1.0};

  std::array<const CellFunction*, 4> terms() const {
    return {&pi_after_I, &I_after_pi_star, &pi_star_after_I, &shift_series};
  }
  CellFunction combined() const;
};

LinearDecomposition decompose_linear(const CellFunction& b, const CellFunction& f, const FracParams& fp);

enum class BilinearTerm { Lambda, Delta, Xi, Theta };

/// The internal splitting of Lambda_b. lambda33 equals lambda1 with f1 and
/// f2 exchanged.
struct LambdaParts {
  CellFunction lambda1;
  CellFunction lambda2;
  CellFunction lambda31_eq;
  CellFunction lambda31_ne;
  CellFunction lambda32;
  CellFunction lambda33;

  CellFunction sum() const;
};

/// Delta_b = delta1 + delta2 + delta3 with delta1 = Lambda^{3,1} and
/// delta3 = Lambda^{3,2}.
struct DeltaParts {
  CellFunction delta1;
  CellFunction delta2;
  CellFunction delta3;

  CellFunction sum() const;
};

LambdaParts lambda_parts(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha);
DeltaParts delta_parts(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha);

CellFunction bilinear_paraproduct(BilinearTerm which, const CellFunction& b, const CellFunction& f1,
                                  const CellFunction& f2, double alpha);

/// [b, I]_1(f1, f2) = b I(f1, f2) - I(b f1, f2), or the slot-2 analogue.
CellFunction commutator_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2,
                                 const FracParams& fp, int slot = 1);
CellFunction commutator_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha,
                                 int slot = 1);

/// c Lambda - c Delta - Xi - Theta plus the finite-tree mean part, which is
/// zero when f1 and f2 have mean zero.
struct BilinearDecomposition {
  CellFunction lambda;
  CellFunction delta;
  CellFunction xi;
  CellFunction theta;
  CellFunction mean_term;
  std::array<double, 4> coefficients{};

  std::array<const CellFunction*, 4> terms() const { return {&lambda, &delta, &xi, &theta}; }
  CellFunction combined() const;
};

BilinearDecomposition decompose_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2,
                                         const FracParams& fp);

/// Test function Phi with <Lambda^1_b(f1, f2), g> = <b, Phi>, built with the
/// full averages <f2>_Q.
CellFunction lambda1_dual(const CellFunction& g, const CellFunction& f1, const CellFunction& f2, double alpha);

}  // namespace dyadic
