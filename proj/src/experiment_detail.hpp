// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyadic/experiment.hpp"

namespace dyadic::experiment::detail {

struct NormPoint {
  double alpha = 0.0;
  int k = 1;
  std::size_t w = 0;
  std::size_t b = 0;
  int L = 0;
};

struct NormRow {
  NormPoint point;
  double p = 0.0;
  double q = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::optional<double> a_pq_mu;
  std::optional<double> a_pq_lambda;
  double bmo_nu = 0.0;
  double bmo = 0.0;
  NormEstimate est;
  std::optional<double> ratio;
  std::optional<double> probe;
};

Exponents linear_exponents(const Config& cfg, double alpha);
BilinearExponents bilinear_exponents(const Config& cfg, double alpha);
void validate_exponents(const Config& cfg);

/// Cartesian product in the order alpha, k, weight pair, b, L (L fastest).
std::vector<NormPoint> norm_points(const Config& cfg);
NormRow compute_norm_row(const Config& cfg, const NormPoint& pt, std::uint64_t seed, std::uint64_t stream);
std::vector<NormRow> compute_norm_rows(const Config& cfg, std::uint64_t seed);
std::string norm_header(const Config& cfg);
std::string norm_csv_line(const Config& cfg, const NormRow& r);

}  // namespace dyadic::experiment::detail
