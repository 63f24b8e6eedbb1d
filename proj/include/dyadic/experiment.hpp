// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/cell_function.hpp"
#include "dyadic/estimator.hpp"
#include "dyadic/weights.hpp"

namespace dyadic::experiment {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;

/// Recipe for a cell function or weight. Which fields matter depends on `type`:
///   constant(value), haar(level, index, signature, value), haar_random(packing, depth, seed),
///   uniform(lo, hi, seed), exp_bmo(delta), power(beta, x0), file(path).
struct GeneratorSpec {
  std::string type = "constant";
  double value = 1.0;
  int level = 0;
  std::size_t index = 0;
  std::uint32_t signature = 0;
  double packing = 1.0;
  int depth = -1;
  std::optional<std::uint64_t> seed;
  double lo = -1.0;
  double hi = 1.0;
  double delta = 0.0;
  double beta = 0.0;
  std::vector<double> x0;
  std::string path;
};

struct WeightPair {
  GeneratorSpec mu;
  GeneratorSpec lambda;
};

struct ContourConfig {
  std::vector<int> k{1, 2};
  std::vector<int> nodes{8, 128};
  std::optional<double> radius;  ///< overrides cauchy_radius
  double radius_constant = 1.0;  ///< c in cauchy_radius
  double weight_constant = 1.0;  ///< c' in the weight-uniformity report
  int weight_samples = 4;
  double max_rel_err = 1e-3;
};

struct Config {
  std::string text;  ///< raw file contents, hashed into the metadata line
  std::string mode = "linear";
  int n = 1;
  std::vector<int> L{5};
  std::vector<double> alpha{0.5};
  std::vector<int> k{1};
  double p = 2.0;
  std::optional<double> q;
  double p1 = 4.0;
  double p2 = 4.0;
  bool scaling = true;
  std::vector<GeneratorSpec> b;
  std::optional<GeneratorSpec> b0;
  std::vector<WeightPair> weights;
  std::uint64_t seed = 1;
  int trials = 25;
  Budget budget;
  ContourConfig contour;
  bool plots = true;
  double c_alpha_scale = 1.0;  ///< test hook: perturbs the tail constant in verify
};

/// Parses JSON text; errors carry line/column or the offending field name.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int cmd_verify(const Config& cfg, const RunOptions& opt, std::ostream& report);
int cmd_norms(const Config& cfg, const RunOptions& opt, std::ostream& report);
int cmd_cauchy(const Config& cfg, const RunOptions& opt, std::ostream& report);
int cmd_sweep(const Config& cfg, const RunOptions& opt, std::ostream& report);

/// Loads the config, dispatches, and converts errors to exit codes.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                std::ostream& out, std::ostream& err);

std::uint64_t fnv1a64(std::string_view bytes);
/// 17 significant digits, independent of the locale.
std::string format_double(double v);
std::string metadata_line(const Config& cfg, std::uint64_t seed);

/// Materializes a generator on `spec`. `b0` feeds exp_bmo weights.
CellFunction make_function(const GeneratorSpec& g, const GridSpec& spec, std::uint64_t seed);
Weight make_weight(const GeneratorSpec& g, const GridSpec& spec, const CellFunction& b0, std::uint64_t seed);

}  // namespace dyadic::experiment
