// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "dyadic/error.hpp"

namespace dyadic::kernels {

namespace {

// Loops shorter than this stay on the calling thread.
constexpr std::int64_t kParallelThreshold = 2048;

void require_cells(const GridSpec& spec, std::span<const double> cells) {
  if (cells.size() != spec.cells()) throw DomainError("cell array length does not match the grid");
}

void require_terms(const GridSpec& spec, const Levels& terms, int last, int per_cube) {
  if (static_cast<int>(terms.size()) != last + 1) throw DomainError("per-level array has the wrong depth");
  for (int l = 0; l <= last; ++l) {
    const auto& t = terms[l];
    if (!t.empty() && t.size() != spec.cubes_at(l) * per_cube) {
      throw DomainError("per-level array has the wrong width at level " + std::to_string(l));
    }
  }
}

double at(const std::vector<double>& v, std::size_t i) { return v.empty() ? 0.0 : v[i]; }

// Balanced sum of 2^k values, so children of a constant sum exactly.
double tree_sum(const double* v, int count) {
  if (count == 1) return v[0];
  const int half = count / 2;
  return tree_sum(v, half) + tree_sum(v + half, half);
}

// Child pattern of the level-(level+1) cube containing `cell` inside its
// level-`level` ancestor.
std::uint32_t child_pattern(const GridSpec& spec, const CubeId& cell, int level) {
  const int shift = spec.L - level - 1;
  std::uint32_t c = 0;
  for (int i = 0; i < spec.n; ++i) c |= ((cell.index[i] >> shift) & 1u) << i;
  return c;
}

}  // namespace

Levels make_levels(const GridSpec& spec, int last, int per_cube) {
  Levels out(last + 1);
  for (int l = 0; l <= last; ++l) out[l].assign(spec.cubes_at(l) * per_cube, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Reference kernels

namespace serial {

Levels average_pyramid(const GridSpec& spec, std::span<const double> cells) {
  require_cells(spec, cells);
  Levels out = make_levels(spec, spec.L);
  for (int l = 0; l <= spec.L; ++l) {
    for (std::size_t x = 0; x < cells.size(); ++x) out[l][cube_of_cell(spec, x, l)] += cells[x];
    const double per_cube = std::ldexp(1.0, -spec.n * (spec.L - l));
    for (double& v : out[l]) v *= per_cube;
  }
  return out;
}

Levels analyze(const GridSpec& spec, std::span<const double> cells) {
  require_cells(spec, cells);
  const int S = spec.signatures();
  if (spec.L == 0) return {};
  Levels out = make_levels(spec, spec.L - 1, S);
  const double vol = spec.cell_volume();
  for (std::size_t x = 0; x < cells.size(); ++x) {
    const CubeId cell = CubeId::from_linear(spec.n, spec.L, x);
    for (int l = 0; l < spec.L; ++l) {
      const std::size_t q = cube_of_cell(spec, x, l);
      const std::uint32_t c = child_pattern(spec, cell, l);
      const double scale = vol / std::sqrt(spec.measure_at(l));
      for (int e = 0; e < S; ++e) {
        out[l][q * S + e] += cells[x] * haar_child_sign(spec.n, e, c) * scale;
      }
    }
  }
  return out;
}

std::vector<double> synthesize(const GridSpec& spec, double mean, const Levels& coeffs) {
  const int S = spec.signatures();
  if (spec.L > 0) require_terms(spec, coeffs, spec.L - 1, S);
  std::vector<double> out(spec.cells(), mean);
  for (std::size_t x = 0; x < out.size(); ++x) {
    const CubeId cell = CubeId::from_linear(spec.n, spec.L, x);
    for (int l = 0; l < spec.L; ++l) {
      if (coeffs[l].empty()) continue;
      const std::size_t q = cube_of_cell(spec, x, l);
      const std::uint32_t c = child_pattern(spec, cell, l);
      const double scale = 1.0 / std::sqrt(spec.measure_at(l));
      for (int e = 0; e < S; ++e) out[x] += coeffs[l][q * S + e] * haar_child_sign(spec.n, e, c) * scale;
    }
  }
  return out;
}

Levels prefix_down(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out = make_levels(spec, spec.L);
  for (int l = 0; l <= spec.L; ++l) {
    for (std::size_t q = 0; q < out[l].size(); ++q) {
      const CubeId cube = CubeId::from_linear(spec.n, l, q);
      double acc = 0.0;
      for (int j = 0; j <= l; ++j) acc += at(terms[j], ancestor(cube, l - j).linear(spec.n));
      out[l][q] = acc;
    }
  }
  return out;
}

std::vector<double> accumulate_down(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  std::vector<double> out(spec.cells(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    for (int l = 0; l <= spec.L; ++l) out[x] += at(terms[l], cube_of_cell(spec, x, l));
  }
  return out;
}

Levels sum_up(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out = make_levels(spec, spec.L);
  for (int j = 0; j <= spec.L; ++j) {
    if (terms[j].empty()) continue;
    for (std::size_t r = 0; r < terms[j].size(); ++r) {
      const CubeId cube = CubeId::from_linear(spec.n, j, r);
      for (int l = 0; l <= j; ++l) out[l][ancestor(cube, j - l).linear(spec.n)] += terms[j][r];
    }
  }
  return out;
}

Levels prefix_max_down(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out = make_levels(spec, spec.L);
  for (int l = 0; l <= spec.L; ++l) {
    for (std::size_t q = 0; q < out[l].size(); ++q) {
      const CubeId cube = CubeId::from_linear(spec.n, l, q);
      double m = at(terms[0], 0);
      for (int j = 1; j <= l; ++j) m = std::max(m, at(terms[j], ancestor(cube, l - j).linear(spec.n)));
      out[l][q] = m;
    }
  }
  return out;
}

std::vector<double> prolong(const GridSpec& spec, int parent_level, std::span<const double> coarse) {
  std::vector<double> out(spec.cubes_at(parent_level + 1));
  for (std::size_t q = 0; q < out.size(); ++q) {
    const CubeId child = CubeId::from_linear(spec.n, parent_level + 1, q);
    out[q] = coarse[ancestor(child, 1).linear(spec.n)];
  }
  return out;
}

std::vector<double> restrict_sum(const GridSpec& spec, int parent_level, std::span<const double> fine) {
  std::vector<double> out(spec.cubes_at(parent_level), 0.0);
  for (std::size_t q = 0; q < fine.size(); ++q) {
    const CubeId child = CubeId::from_linear(spec.n, parent_level + 1, q);
    out[ancestor(child, 1).linear(spec.n)] += fine[q];
  }
  return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// Fast kernels

namespace omp {

Levels average_pyramid(const GridSpec& spec, std::span<const double> cells) {
  require_cells(spec, cells);
  Levels out(spec.L + 1);
  out[spec.L].assign(cells.begin(), cells.end());
  const int C = spec.children();
  const double inv = 1.0 / C;
  for (int l = spec.L - 1; l >= 0; --l) {
    const ChildLayout layout(spec.n, l);
    const auto& fine = out[l + 1];
    auto& coarse = out[l];
    coarse.assign(spec.cubes_at(l), 0.0);
    const auto count = static_cast<std::int64_t>(coarse.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      double v[1 << kMaxDim];
      for (int c = 0; c < C; ++c) v[c] = fine[base + layout.offset[c]];
      coarse[p] = tree_sum(v, C) * inv;
    }
  }
  return out;
}

Levels analyze_pyramid(const GridSpec& spec, const Levels& pyramid) {
  require_terms(spec, pyramid, spec.L, 1);
  if (spec.L == 0) return {};
  const int S = spec.signatures();
  const int C = spec.children();
  Levels out(spec.L);
  for (int l = 0; l < spec.L; ++l) {
    const ChildLayout layout(spec.n, l);
    const auto& fine = pyramid[l + 1];
    auto& coeff = out[l];
    coeff.assign(spec.cubes_at(l) * S, 0.0);
    const double scale = std::sqrt(spec.measure_at(l)) / C;
    const auto count = static_cast<std::int64_t>(spec.cubes_at(l));
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      double v[1 << kMaxDim];
      double signed_v[1 << kMaxDim];
      for (int c = 0; c < C; ++c) v[c] = at(fine, base + layout.offset[c]);
      for (int e = 0; e < S; ++e) {
        for (int c = 0; c < C; ++c) signed_v[c] = haar_child_sign(spec.n, e, c) * v[c];
        coeff[p * S + e] = tree_sum(signed_v, C) * scale;
      }
    }
  }
  return out;
}

Levels analyze(const GridSpec& spec, std::span<const double> cells) {
  return analyze_pyramid(spec, average_pyramid(spec, cells));
}

std::vector<double> synthesize(const GridSpec& spec, double mean, const Levels& coeffs) {
  const int S = spec.signatures();
  const int C = spec.children();
  if (spec.L > 0) require_terms(spec, coeffs, spec.L - 1, S);
  std::vector<double> current{mean};
  for (int l = 0; l < spec.L; ++l) {
    const ChildLayout layout(spec.n, l);
    std::vector<double> next(spec.cubes_at(l + 1));
    const auto& coeff = coeffs[l];
    const double scale = 1.0 / std::sqrt(spec.measure_at(l));
    const auto count = static_cast<std::int64_t>(current.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        if (!coeff.empty()) {
          for (int e = 0; e < S; ++e) acc += haar_child_sign(spec.n, e, c) * coeff[p * S + e];
        }
        next[base + layout.offset[c]] = current[p] + acc * scale;
      }
    }
    current = std::move(next);
  }
  return current;
}

Levels prefix_down(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out(spec.L + 1);
  out[0] = {at(terms[0], 0)};
  const int C = spec.children();
  for (int l = 0; l < spec.L; ++l) {
    const ChildLayout layout(spec.n, l);
    out[l + 1].assign(spec.cubes_at(l + 1), 0.0);
    const auto& parent = out[l];
    auto& child = out[l + 1];
    const auto& t = terms[l + 1];
    const auto count = static_cast<std::int64_t>(parent.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      for (int c = 0; c < C; ++c) {
        const std::size_t q = base + layout.offset[c];
        child[q] = parent[p] + at(t, q);
      }
    }
  }
  return out;
}

std::vector<double> accumulate_down(const GridSpec& spec, const Levels& terms) {
  return std::move(prefix_down(spec, terms)[spec.L]);
}

Levels sum_up(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out(spec.L + 1);
  out[spec.L] = terms[spec.L].empty() ? std::vector<double>(spec.cells(), 0.0) : terms[spec.L];
  const int C = spec.children();
  for (int l = spec.L - 1; l >= 0; --l) {
    const ChildLayout layout(spec.n, l);
    out[l].assign(spec.cubes_at(l), 0.0);
    const auto& fine = out[l + 1];
    auto& coarse = out[l];
    const auto& t = terms[l];
    const auto count = static_cast<std::int64_t>(coarse.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      double v[1 << kMaxDim];
      for (int c = 0; c < C; ++c) v[c] = fine[base + layout.offset[c]];
      coarse[p] = tree_sum(v, C) + at(t, static_cast<std::size_t>(p));
    }
  }
  return out;
}

Levels prefix_max_down(const GridSpec& spec, const Levels& terms) {
  require_terms(spec, terms, spec.L, 1);
  Levels out(spec.L + 1);
  out[0] = {at(terms[0], 0)};
  const int C = spec.children();
  for (int l = 0; l < spec.L; ++l) {
    const ChildLayout layout(spec.n, l);
    out[l + 1].assign(spec.cubes_at(l + 1), 0.0);
    const auto& parent = out[l];
    auto& child = out[l + 1];
    const auto& t = terms[l + 1];
    const auto count = static_cast<std::int64_t>(parent.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
    for (std::int64_t p = 0; p < count; ++p) {
      const std::size_t base = layout.base(static_cast<std::size_t>(p));
      for (int c = 0; c < C; ++c) {
        const std::size_t q = base + layout.offset[c];
        child[q] = std::max(parent[p], at(t, q));
      }
    }
  }
  return out;
}

std::vector<double> prolong(const GridSpec& spec, int parent_level, std::span<const double> coarse) {
  const ChildLayout layout(spec.n, parent_level);
  std::vector<double> out(spec.cubes_at(parent_level + 1));
  const int C = spec.children();
  const auto count = static_cast<std::int64_t>(coarse.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
  for (std::int64_t p = 0; p < count; ++p) {
    const std::size_t base = layout.base(static_cast<std::size_t>(p));
    for (int c = 0; c < C; ++c) out[base + layout.offset[c]] = coarse[p];
  }
  return out;
}

std::vector<double> restrict_sum(const GridSpec& spec, int parent_level, std::span<const double> fine) {
  const ChildLayout layout(spec.n, parent_level);
  std::vector<double> out(spec.cubes_at(parent_level));
  const int C = spec.children();
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
  for (std::int64_t p = 0; p < count; ++p) {
    const std::size_t base = layout.base(static_cast<std::size_t>(p));
    double v[1 << kMaxDim];
    for (int c = 0; c < C; ++c) v[c] = fine[base + layout.offset[c]];
    out[p] = tree_sum(v, C);
  }
  return out;
}

}  // namespace omp

}  // namespace dyadic::kernels
