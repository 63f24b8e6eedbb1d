// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "dyadic/cell_function.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/kernels.hpp"

namespace dyadic {

/// Haar expansion of a CellFunction: the top-cube mean plus one coefficient
/// per (cube, cancellative signature) at levels 0..L-1.
///
/// Storage is dense per level; level l holds cubes_at(l) * (2^n - 1)
/// entries, signature fastest.
class HaarCoeffs {
 public:
  HaarCoeffs() = default;
  /// All-zero expansion.
  explicit HaarCoeffs(const GridSpec& spec);
  HaarCoeffs(const GridSpec& spec, double mean, kernels::Levels levels);

  const GridSpec& spec() const { return spec_; }
  double mean() const { return mean_; }
  void set_mean(double m) { mean_ = m; }

  /// Throws DomainError for non-cancellative signatures or cubes at level >= L.
  double at(const CubeId& q, HaarSignature eps) const;
  void set(const CubeId& q, HaarSignature eps, double value);

  const kernels::Levels& levels() const { return levels_; }
  kernels::Levels& levels() { return levels_; }
  std::span<const double> level(int l) const { return levels_[l]; }

  /// Sum of squared cancellative coefficients.
  double energy() const;

 private:
  std::size_t slot(const CubeId& q, HaarSignature eps) const;

  GridSpec spec_;
  double mean_ = 0.0;
  kernels::Levels levels_;
};

HaarCoeffs analyze(const CellFunction& f);
CellFunction synthesize(const HaarCoeffs& c);

/// <f>_Q for every cube, levels 0..L.
kernels::Levels average_pyramid(const CellFunction& f);
/// Analysis from a precomputed pyramid (saves one pass when both are needed).
HaarCoeffs analyze(const CellFunction& f, const kernels::Levels& pyramid);

double cube_average(const CellFunction& f, const CubeId& q);
/// <f>_Q rebuilt from the expansion: mean + sum over strict ancestors P of q
/// of <f, h_P^e> h_P^e(q).
double average_from_coefficients(const HaarCoeffs& c, const CubeId& q);

/// Pyramid of mean-removed averages together with the jumps
/// <f>_Q - <f>_{parent(Q)} (zero at the top cube). Used by every collapsed
/// paraproduct form.
struct AverageData {
  kernels::Levels avg;    ///< <f>_Q - <f>_top
  kernels::Levels delta;  ///< <f>_Q - <f>_{parent(Q)}
  double mean = 0.0;
};

AverageData average_data(const CellFunction& f);

}  // namespace dyadic
