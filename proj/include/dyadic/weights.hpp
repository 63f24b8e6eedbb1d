// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "dyadic/cell_function.hpp"
#include "dyadic/kernels.hpp"

namespace dyadic {

/// Strictly positive cell function with its cube averages cached.
class Weight {
 public:
  Weight() = default;
  /// Throws DomainError unless every value is positive.
  explicit Weight(CellFunction base);
  static Weight constant(const GridSpec& spec, double c = 1.0);

  const GridSpec& spec() const { return base_.spec(); }
  const CellFunction& base() const { return base_; }
  double operator[](std::size_t i) const { return base_[i]; }
  /// <w>_Q for levels 0..L.
  const kernels::Levels& averages() const { return averages_; }
  /// w(Q) = |Q| <w>_Q
  double mass(int level, std::size_t q) const { return averages_[level][q] * spec().measure_at(level); }

  Weight pow(double s) const;

 private:
  CellFunction base_;
  kernels::Levels averages_;
};

/// p' = p / (p - 1)
double conjugate(double p);

/// Linear exponents: 1/q = 1/p - alpha/n, and q0 = 1 + q/p'.
struct Exponents {
  double p = 2.0;
  double q = 2.0;

  double p_prime() const { return conjugate(p); }
  double q0() const { return 1.0 + q / p_prime(); }

  /// Validates p, q in (1, inf) without any scaling relation.
  static Exponents free(double p, double q);
  /// q from the scaling law; throws DomainError if q is not in (1, inf).
  static Exponents scaling(double p, double alpha, int n);
};

/// Bilinear exponents: 1/q = 1/p1 + 1/p2 - alpha/n.
struct BilinearExponents {
  double p1 = 4.0;
  double p2 = 4.0;
  double q = 2.0;

  /// 1/p = 1/p1 + 1/p2
  double p() const { return 1.0 / (1.0 / p1 + 1.0 / p2); }
  static BilinearExponents scaling(double p1, double p2, double alpha, int n);
};

/// sup_Q <w>_Q <w^{1-p'}>_Q^{p-1}
double a_p_constant(const Weight& w, double p);
/// sup_Q <w^q>_Q^{1/q} <w^{-p'}>_Q^{1/p'}
double a_pq_constant(const Weight& w, double p, double q);
/// [w^q]_{A_{q0}} with q0 = 1 + q/p'. Equals a_pq_constant(w, p, q)^q.
double a_q0_of_power(const Weight& w, double p, double q);
/// Fujii-Wilson constant sup_Q w(Q)^{-1} int_Q M(w 1_Q) with the dyadic maximal function.
double a_infty_constant(const Weight& w);
/// max{[w]_{A_inf}, [w^{1-p'}]_{A_inf}}
double a_infty_pair(const Weight& w, double p);

enum class BloomFlavor { ratio, p_root };

/// ratio: mu / lambda; p_root: mu^{1/p} lambda^{-1/p}.
Weight bloom_weight(const Weight& mu, const Weight& lambda, double p, BloomFlavor flavor);

/// sup_Q w(Q)^{-1} int_Q |b - <b>_Q| dx
double bmo_weighted(const CellFunction& b, const Weight& w);
/// Dyadic BMO (w = 1).
double bmo(const CellFunction& b);
/// sup_J (|J|^{-1} sum_{I in J, e} |<b, h_I^e>|^2)^{1/2}
double bmo_haar2(const CellFunction& b);
/// (sup_Q w(Q)^{-1} int_Q |b - <b>_Q|^r w^{1-p'} dx)^{1/r}
double bmo_haar2(const CellFunction& b, const Weight& w, double r, double p);

/// |J|^{-1} sum_{I in J, e} |<b, h_I^e>|^2 for every cube J, levels 0..L.
kernels::Levels local_energy(const CellFunction& b);

/// dist(x, x0)^beta at cell centres, with the distance clamped below at half a cell width.
Weight power_weight(const GridSpec& spec, double beta, std::span<const double> x0);
/// e^{delta b0}
Weight exp_bmo(double delta, const CellFunction& b0);
/// <b, h_I^e> = sigma |I|^{1/2} with sigma uniform in [-packing, packing],
/// for levels below min(L, depth) (depth < 0 means L). sigma is a keyed hash
/// of (seed, cube, signature), so the function does not depend on L once
/// L >= depth.
CellFunction haar_random(const GridSpec& spec, std::uint64_t seed, double packing, int depth = -1);
/// Independent uniform cell values in [lo, hi).
CellFunction uniform_random(const GridSpec& spec, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

}  // namespace dyadic
