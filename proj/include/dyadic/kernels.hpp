// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "dyadic/grid.hpp"

// Tree kernels shared by every operator in the library.
//
// Per-level data is stored as Levels: entry l holds one value per level-l
// cube (row-major), or one value per (cube, cancellative signature) pair for
// coefficient arrays, signature fastest. An empty level in an input stands
// for all zeros.
//
// serial:: kernels evaluate each output straight from its definition by
// walking cells and ancestors (O(N L) or worse). They are the reference the
// omp:: kernels are tested and benchmarked against. omp:: kernels use the
// O(N) parent/child recursions and parallelise over cubes within a level;
// every output is written by exactly one iteration, so results do not depend
// on the thread count.

namespace dyadic::kernels {

using Levels = std::vector<std::vector<double>>;

/// Zero-filled Levels for levels 0..last with `per_cube` slots per cube.
Levels make_levels(const GridSpec& spec, int last, int per_cube = 1);

namespace serial {

/// Averages <f>_Q for all cubes at levels 0..L.
Levels average_pyramid(const GridSpec& spec, std::span<const double> cells);
/// <f, h_Q^e> for levels 0..L-1 from cell values.
Levels analyze(const GridSpec& spec, std::span<const double> cells);
std::vector<double> synthesize(const GridSpec& spec, double mean, const Levels& coeffs);
/// out[l][Q] = sum over ancestors R of Q (levels 0..l, including Q) of terms[level(R)][R].
Levels prefix_down(const GridSpec& spec, const Levels& terms);
/// Level-L slice of prefix_down: sum_Q terms[Q] 1_Q evaluated on cells.
std::vector<double> accumulate_down(const GridSpec& spec, const Levels& terms);
/// out[l][Q] = sum over subcubes R of Q (levels l..L, including Q) of terms[level(R)][R].
Levels sum_up(const GridSpec& spec, const Levels& terms);
/// out[l][Q] = max over ancestors R of Q (including Q) of terms[level(R)][R].
Levels prefix_max_down(const GridSpec& spec, const Levels& terms);
/// Level-(parent_level+1) array whose entries copy their parent's value.
std::vector<double> prolong(const GridSpec& spec, int parent_level, std::span<const double> coarse);
/// Level-parent_level array of child sums.
std::vector<double> restrict_sum(const GridSpec& spec, int parent_level, std::span<const double> fine);

}  // namespace serial

namespace omp {

Levels average_pyramid(const GridSpec& spec, std::span<const double> cells);
/// Coefficients from an average pyramid (one Walsh step per parent).
Levels analyze_pyramid(const GridSpec& spec, const Levels& pyramid);
Levels analyze(const GridSpec& spec, std::span<const double> cells);
std::vector<double> synthesize(const GridSpec& spec, double mean, const Levels& coeffs);
Levels prefix_down(const GridSpec& spec, const Levels& terms);
std::vector<double> accumulate_down(const GridSpec& spec, const Levels& terms);
Levels sum_up(const GridSpec& spec, const Levels& terms);
Levels prefix_max_down(const GridSpec& spec, const Levels& terms);
std::vector<double> prolong(const GridSpec& spec, int parent_level, std::span<const double> coarse);
std::vector<double> restrict_sum(const GridSpec& spec, int parent_level, std::span<const double> fine);

}  // namespace omp

}  // namespace dyadic::kernels
