// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace dyadic {

inline constexpr int kMaxDim = 3;

/// Finite dyadic tree on the unit cube [0,1)^n, resolved down to level L.
///
/// Cubes at level l are indexed row-major over their index vector
/// (dimension 0 varies slowest); level L cubes are the cells that carry
/// function values.
struct GridSpec {
  int n = 1;
  int L = 0;

  GridSpec() = default;
  GridSpec(int dim, int level);

  std::size_t cells() const { return std::size_t{1} << (n * L); }
  std::size_t cubes_at(int level) const { return std::size_t{1} << (n * level); }
  int children() const { return 1 << n; }
  /// Number of cancellative signatures per cube, 2^n - 1.
  int signatures() const { return (1 << n) - 1; }
  double measure_at(int level) const;
  double cell_volume() const { return measure_at(L); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Signature bit vector; bit i is the choice of 1-D profile in dimension i
/// (0 = oscillating, 1 = flat).
class HaarSignature {
 public:
  constexpr HaarSignature() = default;
  constexpr explicit HaarSignature(std::uint32_t bits) : bits_(bits) {}

  static constexpr HaarSignature flat(int n) { return HaarSignature((1u << n) - 1u); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool bit(int i) const { return ((bits_ >> i) & 1u) != 0; }
  constexpr bool cancellative(int n) const { return bits_ != flat(n).bits_; }

  friend constexpr bool operator==(HaarSignature, HaarSignature) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Q = prod_i [k_i 2^-l, (k_i + 1) 2^-l). Unused trailing index slots are 0.
struct CubeId {
  int level = 0;
  std::array<std::uint32_t, kMaxDim> index{};

  static CubeId top() { return {}; }
  static CubeId from_linear(int n, int level, std::size_t linear);
  std::size_t linear(int n) const;
  double measure(int n) const;
  /// True iff other is a (not necessarily strict) subcube of *this.
  bool contains(const CubeId& other, int n) const;

  friend bool operator==(const CubeId&, const CubeId&) = default;
};

CubeId ancestor(const CubeId& q, int k);

/// |q1 ∩ q2|; dyadic cubes are nested or disjoint.
double intersect_measure(int n, const CubeId& q1, const CubeId& q2);

/// Pointwise value of h_Q^eps at x in [0,1)^n.
double haar_eval(int n, const CubeId& q, HaarSignature eps, std::span<const double> x);

struct HaarProduct {
  /// h_Q^e h_Q^h = |Q|^{scale_exponent} h_Q^{signature}
  double scale_exponent = -0.5;
  HaarSignature signature;
};

HaarProduct haar_product(int n, HaarSignature eps, HaarSignature eta);

/// Sign of h_Q^eps on child c of Q, where bit i of c selects the upper half
/// in dimension i. The magnitude is |Q|^{-1/2}.
constexpr int haar_child_sign(int n, std::uint32_t eps, std::uint32_t child) {
  const std::uint32_t mask = (1u << n) - 1u;
  return (__builtin_popcount(child & ~eps & mask) & 1) ? -1 : 1;
}

/// Linear index of the level-`level` ancestor of `cell` (a level-L index).
std::size_t cube_of_cell(const GridSpec& spec, std::size_t cell, int level);

/// Linear index at level + 1 of the child with bit pattern 0 (lower corner),
/// and the offset to add for child pattern c.
struct ChildLayout {
  int n = 1;
  int level = 0;
  std::array<std::size_t, 1 << kMaxDim> offset{};

  ChildLayout(int dim, int parent_level);
  std::size_t base(std::size_t parent) const;
};

/// Cell containing x (left-closed convention).
CubeId locate(const GridSpec& spec, int level, std::span<const double> x);

}  // namespace dyadic
