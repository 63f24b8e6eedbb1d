// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyadic/experiment.hpp"

namespace {

std::optional<int> env_threads() {
  const char* v = std::getenv("DYADIC_LAB_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) return std::nullopt;
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic fractional integrals, paraproducts and commutators on finite dyadic trees"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  for (const char* name : {"verify", "norms", "cauchy", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for CSV files");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--threads", threads, "OpenMP threads (DYADIC_LAB_THREADS overrides)")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dyadic::experiment::kExitConfig;
  }

  if (const auto t = env_threads()) threads = t;
  if (threads) omp_set_num_threads(*threads);
  // Outer loops own the threads; inner kernels run serially inside them.
  omp_set_max_active_levels(1);

  dyadic::experiment::RunOptions opt;
  opt.out_dir = out_dir;
  opt.seed = seed;
  const std::string command = app.get_subcommands().front()->get_name();
  return dyadic::experiment::run_command(command, config, opt, std::cout, std::cerr);
}
