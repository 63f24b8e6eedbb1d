// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadic/cell_function.hpp"
#include "dyadic/numerics.hpp"
#include "oracle.hpp"

namespace testing_support {

inline dyadic::CellFunction random_function(const dyadic::GridSpec& g, std::uint64_t seed, double lo = -1.0,
                                            double hi = 1.0) {
  dyadic::Rng rng(seed);
  std::vector<double> v(g.cells());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return dyadic::CellFunction(g, std::move(v));
}

inline dyadic::CellFunction mean_zero(dyadic::CellFunction f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
  s /= static_cast<double>(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= s;
  return f;
}

inline double max_diff(const dyadic::CellFunction& a, const dyadic::CellFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double peak(const dyadic::CellFunction& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

/// max |a - b| / max(max |b|, tiny)
inline double rel_diff(const dyadic::CellFunction& a, const dyadic::CellFunction& b) {
  return max_diff(a, b) / std::max(peak(b), 1e-300);
}

inline oracle::Cube as_oracle(const dyadic::CubeId& q) {
  oracle::Cube c;
  c.level = q.level;
  for (int d = 0; d < 3; ++d) c.idx[d] = q.index[d];
  return c;
}

}  // namespace testing_support
