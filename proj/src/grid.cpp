// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/grid.hpp"

#include <cmath>
#include <string>

#include "dyadic/error.hpp"

namespace dyadic {

GridSpec::GridSpec(int dim, int level) : n(dim), L(level) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (level < 0 || dim * level > 28) {
    throw DomainError("grid level must satisfy 0 <= L and n*L <= 28");
  }
}

double GridSpec::measure_at(int level) const { return std::ldexp(1.0, -n * level); }

CubeId CubeId::from_linear(int n, int level, std::size_t linear) {
  CubeId q;
  q.level = level;
  const std::size_t mask = (std::size_t{1} << level) - 1;
  for (int i = n - 1; i >= 0; --i) {
    q.index[i] = static_cast<std::uint32_t>(linear & mask);
    linear >>= level;
  }
  return q;
}

std::size_t CubeId::linear(int n) const {
  std::size_t out = 0;
  for (int i = 0; i < n; ++i) out = (out << level) | index[i];
  return out;
}

double CubeId::measure(int n) const { return std::ldexp(1.0, -n * level); }

bool CubeId::contains(const CubeId& other, int n) const {
  if (other.level < level) return false;
  const int shift = other.level - level;
  for (int i = 0; i < n; ++i) {
    if ((other.index[i] >> shift) != index[i]) return false;
  }
  return true;
}

CubeId ancestor(const CubeId& q, int k) {
  if (k < 0 || k > q.level) throw DomainError("no such ancestor inside the top cube");
  CubeId a = q;
  a.level = q.level - k;
  for (auto& i : a.index) i >>= k;
  return a;
}

double intersect_measure(int n, const CubeId& q1, const CubeId& q2) {
  if (q1.contains(q2, n)) return q2.measure(n);
  if (q2.contains(q1, n)) return q1.measure(n);
  return 0.0;
}

double haar_eval(int n, const CubeId& q, HaarSignature eps, std::span<const double> x) {
  if (static_cast<int>(x.size()) < n) throw DomainError("point has fewer coordinates than the grid dimension");
  for (int i = 0; i < n; ++i) {
    if (!(x[i] >= 0.0 && x[i] < 1.0)) throw DomainError("point outside the unit cube");
  }
  const double side = std::ldexp(1.0, -q.level);
  double value = 1.0;
  for (int i = 0; i < n; ++i) {
    const double lo = q.index[i] * side;
    if (x[i] < lo || x[i] >= lo + side) return 0.0;
    if (!eps.bit(i) && x[i] >= lo + 0.5 * side) value = -value;
  }
  return value / std::sqrt(q.measure(n));
}

HaarProduct haar_product(int n, HaarSignature eps, HaarSignature eta) {
  const std::uint32_t mask = (1u << n) - 1u;
  return {-0.5, HaarSignature(~(eps.bits() ^ eta.bits()) & mask)};
}

std::size_t cube_of_cell(const GridSpec& spec, std::size_t cell, int level) {
  if (spec.n == 1) return cell >> (spec.L - level);
  const CubeId c = CubeId::from_linear(spec.n, spec.L, cell);
  return ancestor(c, spec.L - level).linear(spec.n);
}

ChildLayout::ChildLayout(int dim, int parent_level) : n(dim), level(parent_level) {
  const int child_level = parent_level + 1;
  for (std::uint32_t c = 0; c < (1u << dim); ++c) {
    std::size_t off = 0;
    for (int i = 0; i < dim; ++i) off = (off << child_level) | ((c >> i) & 1u);
    offset[c] = off;
  }
}

std::size_t ChildLayout::base(std::size_t parent) const {
  if (n == 1) return parent << 1;
  const std::size_t mask = (std::size_t{1} << level) - 1;
  const int child_level = level + 1;
  std::size_t out = 0;
  for (int i = 0; i < n; ++i) {
    const int shift = level * (n - 1 - i);
    const std::size_t k = (parent >> shift) & mask;
    out = (out << child_level) | (k << 1);
  }
  return out;
}

CubeId locate(const GridSpec& spec, int level, std::span<const double> x) {
  if (static_cast<int>(x.size()) < spec.n) throw DomainError("point has fewer coordinates than the grid dimension");
  CubeId q;
  q.level = level;
  const double scale = std::ldexp(1.0, level);
  for (int i = 0; i < spec.n; ++i) {
    if (!(x[i] >= 0.0 && x[i] < 1.0)) throw DomainError("point outside the unit cube");
    q.index[i] = static_cast<std::uint32_t>(std::floor(x[i] * scale));
  }
  return q;
}

}  // namespace dyadic
