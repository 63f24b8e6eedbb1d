// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against the OpenMP recursions, plus the
// operators built on top of them. Arguments are (n, L).

#include <benchmark/benchmark.h>

#include "dyadic/fracops.hpp"
#include "dyadic/kernels.hpp"
#include "dyadic/multiscale.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/weights.hpp"

namespace {

using namespace dyadic;

CellFunction sample(const benchmark::State& state) {
  const GridSpec spec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  return uniform_random(spec, 42);
}

void set_items(benchmark::State& state, const CellFunction& f) {
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(f.size()));
}

template <class Fn>
void run(benchmark::State& state, Fn fn) {
  const CellFunction f = sample(state);
  for (auto _ : state) benchmark::DoNotOptimize(fn(f));
  set_items(state, f);
}

void BM_serial_average_pyramid(benchmark::State& s) {
  run(s, [](const CellFunction& f) { return kernels::serial::average_pyramid(f.spec(), f.values()); });
}
void BM_omp_average_pyramid(benchmark::State& s) {
  run(s, [](const CellFunction& f) { return kernels::omp::average_pyramid(f.spec(), f.values()); });
}
void BM_serial_analyze(benchmark::State& s) {
  run(s, [](const CellFunction& f) { return kernels::serial::analyze(f.spec(), f.values()); });
}
void BM_omp_analyze(benchmark::State& s) {
  run(s, [](const CellFunction& f) { return kernels::omp::analyze(f.spec(), f.values()); });
}

void BM_serial_synthesize(benchmark::State& s) {
  const CellFunction f = sample(s);
  const auto c = kernels::omp::analyze(f.spec(), f.values());
  for (auto _ : s) benchmark::DoNotOptimize(kernels::serial::synthesize(f.spec(), 0.0, c));
  set_items(s, f);
}
void BM_omp_synthesize(benchmark::State& s) {
  const CellFunction f = sample(s);
  const auto c = kernels::omp::analyze(f.spec(), f.values());
  for (auto _ : s) benchmark::DoNotOptimize(kernels::omp::synthesize(f.spec(), 0.0, c));
  set_items(s, f);
}

void BM_serial_accumulate_down(benchmark::State& s) {
  const CellFunction f = sample(s);
  const auto t = kernels::omp::average_pyramid(f.spec(), f.values());
  for (auto _ : s) benchmark::DoNotOptimize(kernels::serial::accumulate_down(f.spec(), t));
  set_items(s, f);
}
void BM_omp_accumulate_down(benchmark::State& s) {
  const CellFunction f = sample(s);
  const auto t = kernels::omp::average_pyramid(f.spec(), f.values());
  for (auto _ : s) benchmark::DoNotOptimize(kernels::omp::accumulate_down(f.spec(), t));
  set_items(s, f);
}

void BM_frac_integral(benchmark::State& s) {
  run(s, [](const CellFunction& f) { return frac_integral(f, 0.5); });
}
void BM_bilinear_commutator(benchmark::State& s) {
  const CellFunction b = sample(s);
  run(s, [&b](const CellFunction& f) { return commutator_bilinear(b, f, f, 0.5, 1); });
}
void BM_bilinear_decomposition(benchmark::State& s) {
  const CellFunction b = sample(s);
  run(s, [&b](const CellFunction& f) { return decompose_bilinear(b, f, f, FracParams(0.5)).combined(); });
}

void grid_args(benchmark::internal::Benchmark* b) {
  for (int L : {8, 12, 16}) b->Args({1, L});
  for (int L : {5, 7, 9}) b->Args({2, L});
}

}  // namespace

BENCHMARK(BM_serial_average_pyramid)->Apply(grid_args);
BENCHMARK(BM_omp_average_pyramid)->Apply(grid_args);
BENCHMARK(BM_serial_analyze)->Apply(grid_args);
BENCHMARK(BM_omp_analyze)->Apply(grid_args);
BENCHMARK(BM_serial_synthesize)->Apply(grid_args);
BENCHMARK(BM_omp_synthesize)->Apply(grid_args);
BENCHMARK(BM_serial_accumulate_down)->Apply(grid_args);
BENCHMARK(BM_omp_accumulate_down)->Apply(grid_args);
BENCHMARK(BM_frac_integral)->Apply(grid_args);
BENCHMARK(BM_bilinear_commutator)->Apply(grid_args);
BENCHMARK(BM_bilinear_decomposition)->Apply(grid_args);

BENCHMARK_MAIN();
