// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dyadic/grid.hpp"

namespace dyadic {

/// A function on [0,1)^n that is constant on every level-L cell.
class CellFunction {
 public:
  CellFunction() = default;
  explicit CellFunction(const GridSpec& spec, double fill = 0.0);
  /// Throws DomainError on length mismatch or non-finite values.
  CellFunction(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const { return spec_.cell_volume(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  template <class F>
  CellFunction map(F&& f) const {
    CellFunction out(spec_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
    return out;
  }

  CellFunction& operator+=(const CellFunction& o);
  CellFunction& operator-=(const CellFunction& o);
  CellFunction& operator*=(const CellFunction& o);
  CellFunction& operator*=(double s);

  friend CellFunction operator+(CellFunction a, const CellFunction& b) { return a += b; }
  friend CellFunction operator-(CellFunction a, const CellFunction& b) { return a -= b; }
  /// Pointwise product.
  friend CellFunction operator*(CellFunction a, const CellFunction& b) { return a *= b; }
  friend CellFunction operator*(double s, CellFunction a) { return a *= s; }
  friend CellFunction operator*(CellFunction a, double s) { return a *= s; }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

double integral(const CellFunction& f);
double inner(const CellFunction& f, const CellFunction& g);
double max_abs(const CellFunction& f);
double max_abs_diff(const CellFunction& f, const CellFunction& g);
/// max|f - g| / max|g|, with max|f - g| returned when g vanishes.
double relative_residual(const CellFunction& f, const CellFunction& g);

CellFunction indicator(const GridSpec& spec, const CubeId& q);
CellFunction haar_function(const GridSpec& spec, const CubeId& q, HaarSignature eps);
/// Coordinates of the centre of `cell`.
std::array<double, kMaxDim> cell_center(const GridSpec& spec, std::size_t cell);

/// Replicate a coarser function onto a finer grid of the same dimension.
CellFunction refine(const CellFunction& f, int level);

/// CSV exchange format: first line "n,L", then one value per line in
/// row-major cell order, printed with 17 significant digits.
void write_csv(std::ostream& os, const CellFunction& f);
CellFunction read_csv(std::istream& is);

}  // namespace dyadic
