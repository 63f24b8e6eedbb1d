// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/multiscale.hpp"

#include <cmath>
#include <vector>

#include "dyadic/error.hpp"
#include "dyadic/numerics.hpp"

namespace dyadic {

HaarCoeffs::HaarCoeffs(const GridSpec& spec) : spec_(spec) {
  if (spec.L > 0) levels_ = kernels::make_levels(spec, spec.L - 1, spec.signatures());
}

HaarCoeffs::HaarCoeffs(const GridSpec& spec, double mean, kernels::Levels levels)
    : spec_(spec), mean_(mean), levels_(std::move(levels)) {
  if (static_cast<int>(levels_.size()) != spec.L) throw DomainError("coefficient array has the wrong depth");
  for (int l = 0; l < spec.L; ++l) {
    if (levels_[l].size() != spec.cubes_at(l) * spec.signatures()) {
      throw DomainError("coefficient array has the wrong width");
    }
  }
}

std::size_t HaarCoeffs::slot(const CubeId& q, HaarSignature eps) const {
  if (q.level < 0 || q.level >= spec_.L) throw DomainError("Haar coefficients live at levels 0..L-1");
  if (!eps.cancellative(spec_.n) || eps.bits() >= static_cast<std::uint32_t>(spec_.children())) {
    throw DomainError("only cancellative signatures carry coefficients");
  }
  return q.linear(spec_.n) * spec_.signatures() + eps.bits();
}

double HaarCoeffs::at(const CubeId& q, HaarSignature eps) const { return levels_[q.level][slot(q, eps)]; }

void HaarCoeffs::set(const CubeId& q, HaarSignature eps, double value) { levels_[q.level][slot(q, eps)] = value; }

double HaarCoeffs::energy() const {
  double e = 0.0;
  for (const auto& lvl : levels_) {
    std::vector<double> sq(lvl.size());
    for (std::size_t i = 0; i < lvl.size(); ++i) sq[i] = lvl[i] * lvl[i];
    e += pairwise_sum(sq);
  }
  return e;
}

kernels::Levels average_pyramid(const CellFunction& f) {
  return kernels::omp::average_pyramid(f.spec(), f.values());
}

HaarCoeffs analyze(const CellFunction& f, const kernels::Levels& pyramid) {
  return HaarCoeffs(f.spec(), pyramid[0][0], kernels::omp::analyze_pyramid(f.spec(), pyramid));
}

HaarCoeffs analyze(const CellFunction& f) { return analyze(f, average_pyramid(f)); }

CellFunction synthesize(const HaarCoeffs& c) {
  return CellFunction(c.spec(), kernels::omp::synthesize(c.spec(), c.mean(), c.levels()));
}

double cube_average(const CellFunction& f, const CubeId& q) {
  const GridSpec& spec = f.spec();
  if (q.level > spec.L) throw DomainError("cube is finer than the grid resolution");
  const int depth = spec.L - q.level;
  const std::size_t side = std::size_t{1} << depth;
  const std::size_t count = std::size_t{1} << (spec.n * depth);
  std::vector<double> vals(count);
  for (std::size_t s = 0; s < count; ++s) {
    CubeId cell;
    cell.level = spec.L;
    std::size_t rest = s;
    for (int i = spec.n - 1; i >= 0; --i) {
      cell.index[i] = static_cast<std::uint32_t>((q.index[i] << depth) + rest % side);
      rest /= side;
    }
    vals[s] = f[cell.linear(spec.n)];
  }
  return pairwise_sum(vals) / static_cast<double>(count);
}

double average_from_coefficients(const HaarCoeffs& c, const CubeId& q) {
  const GridSpec& spec = c.spec();
  if (q.level > spec.L) throw DomainError("cube is finer than the grid resolution");
  double acc = c.mean();
  for (int l = 0; l < q.level; ++l) {
    const CubeId p = ancestor(q, q.level - l);
    const CubeId child = ancestor(q, q.level - l - 1);
    std::uint32_t pattern = 0;
    for (int i = 0; i < spec.n; ++i) pattern |= (child.index[i] & 1u) << i;
    const double scale = 1.0 / std::sqrt(p.measure(spec.n));
    for (int e = 0; e < spec.signatures(); ++e) {
      acc += c.at(p, HaarSignature(e)) * haar_child_sign(spec.n, e, pattern) * scale;
    }
  }
  return acc;
}

AverageData average_data(const CellFunction& f) {
  const GridSpec& spec = f.spec();
  AverageData d;
  d.avg = average_pyramid(f);
  d.mean = d.avg[0][0];
  for (auto& lvl : d.avg) {
    for (double& v : lvl) v -= d.mean;
  }
  d.delta.resize(spec.L + 1);
  d.delta[0] = {0.0};
  for (int l = 0; l < spec.L; ++l) {
    d.delta[l + 1] = kernels::omp::prolong(spec, l, d.avg[l]);
    auto& dl = d.delta[l + 1];
    for (std::size_t q = 0; q < dl.size(); ++q) dl[q] = d.avg[l + 1][q] - dl[q];
  }
  return d;
}

}  // namespace dyadic
