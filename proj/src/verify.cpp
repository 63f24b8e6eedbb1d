// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dyadic/experiment.hpp"
#include "dyadic/fracops.hpp"
#include "dyadic/multiscale.hpp"
#include "dyadic/numerics.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/weights.hpp"

namespace dyadic::experiment {

namespace {

struct Check {
  std::string name;
  double tolerance = 0.0;
  double residual = 0.0;
};

class Checks {
 public:
  void record(const std::string& name, double tolerance, double residual) {
    if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
    for (Check& c : list_) {
      if (c.name == name) {
        c.residual = std::max(c.residual, residual);
        return;
      }
    }
    list_.push_back({name, tolerance, residual});
  }
  const std::vector<Check>& list() const { return list_; }

 private:
  std::vector<Check> list_;
};

// Cube of level in [lo, hi] drawn uniformly.
CubeId random_cube(const GridSpec& spec, Rng& rng, int lo, int hi) {
  const int l = lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
  return CubeId::from_linear(spec.n, l, rng.below(spec.cubes_at(l)));
}

HaarSignature random_signature(const GridSpec& spec, Rng& rng) {
  return HaarSignature(static_cast<std::uint32_t>(rng.below(static_cast<std::size_t>(spec.signatures()))));
}

double relative_to(double diff, double scale) { return scale > 0.0 ? diff / scale : diff; }

double l2_weighted_sq(const CellFunction& f, const Weight& w) {
  std::vector<double> t(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) t[i] = f[i] * f[i] * w[i];
  return pairwise_sum(t) * f.cell_volume();
}

void haar_suites(const GridSpec& spec, const CellFunction& f, Rng& rng, Checks& checks) {
  const HaarCoeffs c = analyze(f);
  checks.record("haar reconstruction", 1e-12, relative_residual(synthesize(c), f));
  const double norm2 = inner(f, f);
  checks.record("parseval", 1e-12, relative_to(std::abs(norm2 - (c.mean() * c.mean() + c.energy())), norm2));
  for (int s = 0; s < 8; ++s) {
    const CubeId q = random_cube(spec, rng, 0, spec.L);
    const double direct = cube_average(f, q);
    checks.record("average formula", 1e-12,
                  relative_to(std::abs(average_from_coefficients(c, q) - direct), std::max(1.0, std::abs(direct))));
  }
}

void linear_suites(const GridSpec& spec, const CellFunction& b, const CellFunction& f, double alpha,
                   const FracParams& fp, Rng& rng, Checks& checks) {
  const double c = c_alpha(alpha);

  // Eigenrelation on sampled Haar functions at every level.
  for (int l = 0; l < spec.L; ++l) {
    for (int t = 0; t < 3; ++t) {
      const CubeId q = CubeId::from_linear(spec.n, l, rng.below(spec.cubes_at(l)));
      const HaarSignature e = random_signature(spec, rng);
      const CellFunction h = haar_function(spec, q, e);
      const CellFunction expected = (c * std::exp2(-l * alpha)) * h;
      checks.record("eigenrelation", 1e-12, relative_residual(frac_integral(h, fp), expected));
    }
  }

  // Haar coefficients and averages of I f.
  const CellFunction If = frac_integral(f, fp);
  const HaarCoeffs cf = analyze(f);
  const HaarCoeffs cIf = analyze(If);
  double diff = 0.0, scale = 0.0;
  for (int l = 0; l < spec.L; ++l) {
    const double s = c * std::exp2(-l * alpha);
    for (std::size_t i = 0; i < cf.level(l).size(); ++i) {
      diff = std::max(diff, std::abs(cIf.level(l)[i] - s * cf.level(l)[i]));
      scale = std::max(scale, std::abs(s * cf.level(l)[i]));
    }
  }
  checks.record("haar coefficients of I f", 1e-12, relative_to(diff, scale));

  HaarCoeffs scaled(spec);
  scaled.set_mean((1.0 + c) * cf.mean());
  for (int l = 0; l < spec.L; ++l) {
    const double s = c * std::exp2(-l * alpha);
    for (std::size_t i = 0; i < cf.level(l).size(); ++i) scaled.levels()[l][i] = s * cf.level(l)[i];
  }
  const auto pyr = average_pyramid(If);
  diff = 0.0;
  scale = 0.0;
  for (int t = 0; t < 8; ++t) {
    const CubeId q = random_cube(spec, rng, 0, spec.L);
    const double direct = pyr[q.level][q.linear(spec.n)];
    diff = std::max(diff, std::abs(average_from_coefficients(scaled, q) - direct));
    scale = std::max(scale, std::abs(direct));
  }
  checks.record("averages of I f", 1e-12, relative_to(diff, scale));

  // Commutator decomposition into four composed paraproducts.
  const CellFunction comm = commutator_linear(b, f, fp, 1);
  checks.record("commutator decomposition residual", 1e-10, relative_residual(decompose_linear(b, f, fp).combined(), comm));

  // Single-pair case: f = h_I, b = h_J with J strictly inside I.
  if (spec.L >= 2) {
    const CubeId I = random_cube(spec, rng, 0, spec.L - 2);
    const int lj = I.level + 1 + static_cast<int>(rng.below(static_cast<std::size_t>(spec.L - 1 - I.level)));
    CubeId J = I;
    J.level = lj;
    for (int d = 0; d < spec.n; ++d) {
      const int shift = lj - I.level;
      J.index[d] = (I.index[d] << shift) + static_cast<std::uint32_t>(rng.below(std::size_t{1} << shift));
    }
    const HaarSignature e = random_signature(spec, rng);
    const HaarSignature h = random_signature(spec, rng);
    std::array<double, kMaxDim> centre{};
    const double side = std::ldexp(1.0, -J.level);
    for (int d = 0; d < spec.n; ++d) centre[d] = (J.index[d] + 0.5) * side;
    const double hI_on_J = haar_eval(spec.n, I, e, centre);
    const CellFunction hJ = haar_function(spec, J, h);
    const CellFunction expected =
        (c * hI_on_J * (std::exp2(-I.level * alpha) - std::exp2(-J.level * alpha))) * hJ;
    checks.record("single-pair commutator formula", 1e-10,
                  relative_residual(commutator_linear(hJ, haar_function(spec, I, e), fp, 1), expected));
  }

  // Nested commutators.
  const CellFunction nested = b * comm - commutator_linear(b, b * f, fp, 1);
  checks.record("second-order commutator", 1e-10, relative_residual(commutator_linear(b, f, fp, 2), nested));

  // B_0 identity, Gamma for n = 1.
  const CellFunction ps = pi_star(b, f);
  const CellFunction gm = gamma(b, f);
  checks.record("B_0 identity", 1e-12, relative_residual(b_shift(b, f, 0), ps + gm));
  if (spec.n == 1) checks.record("Gamma vanishes for n = 1", 1e-12, max_abs(gm));
}

void bilinear_suites(const GridSpec& spec, const CellFunction& b, const CellFunction& f1, const CellFunction& f2,
                     const CellFunction& g, double alpha, const FracParams& fp, Checks& checks) {
  const double c = c_alpha(alpha);
  const CellFunction one(spec, 1.0);
  Rng rng(mix_seed(0x9e37, static_cast<std::uint64_t>(alpha * 1e6)));
  for (int l = 0; l < spec.L; ++l) {
    const CubeId q = CubeId::from_linear(spec.n, l, rng.below(spec.cubes_at(l)));
    const CellFunction h = haar_function(spec, q, random_signature(spec, rng));
    checks.record("bilinear eigenrelation", 1e-12,
                  relative_residual(bifrac_integral(one, h, fp), (c * std::exp2(-l * alpha)) * h));
  }
  const CellFunction comm = commutator_bilinear(b, f1, f2, fp, 1);
  checks.record("bilinear decomposition residual", 1e-10,
                relative_residual(decompose_bilinear(b, f1, f2, fp).combined(), comm));
  checks.record("slot symmetry", 1e-12,
                relative_residual(commutator_bilinear(b, f1, f2, fp, 2), commutator_bilinear(b, f2, f1, fp, 1)));

  // Pointwise domination of the dual function of Lambda^1.
  const CellFunction phi = lambda1_dual(g, f1, f2, alpha);
  const CellFunction sp = square_function(phi);
  const CellFunction sg = square_function(g);
  const CellFunction m = bifrac_integral(f1.map([](double v) { return std::abs(v); }),
                                         f2.map([](double v) { return std::abs(v); }), alpha);
  const double C = static_cast<double>(spec.signatures()) * spec.signatures();
  double excess = 0.0, scale = 0.0;
  for (std::size_t x = 0; x < sp.size(); ++x) {
    const double rhs = C * sg[x] * sg[x] * m[x] * m[x];
    excess = std::max(excess, sp[x] * sp[x] - rhs);
    scale = std::max(scale, rhs);
  }
  checks.record("Lambda^1 domination", 1e-12, relative_to(std::max(excess, 0.0), scale));
}

void invariance_suite(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha,
                      Checks& checks) {
  const int n = b.spec().n;
  const CellFunction bc = b + CellFunction(b.spec(), 3.25);
  double worst = 0.0;
  auto cmp = [&worst](const CellFunction& x, const CellFunction& y) {
    worst = std::max(worst, relative_residual(x, y));
  };
  cmp(pi(bc, f1), pi(b, f1));
  cmp(pi_star(bc, f1), pi_star(b, f1));
  cmp(gamma(bc, f1), gamma(b, f1));
  cmp(b_shift(bc, f1, 1), b_shift(b, f1, 1));
  cmp(b_shift(bc, f1, 1, ShiftMode::f_first), b_shift(b, f1, 1, ShiftMode::f_first));
  cmp(shift_series(bc, f1, alpha), shift_series(b, f1, alpha));
  if (alpha <= n) {
    cmp(commutator_linear(bc, f1, alpha, 1), commutator_linear(b, f1, alpha, 1));
    cmp(commutator_linear(bc, f1, alpha, 2), commutator_linear(b, f1, alpha, 2));
  }
  for (int slot = 1; slot <= 2; ++slot) {
    cmp(commutator_bilinear(bc, f1, f2, alpha, slot), commutator_bilinear(b, f1, f2, alpha, slot));
  }
  for (BilinearTerm t : {BilinearTerm::Lambda, BilinearTerm::Delta, BilinearTerm::Xi, BilinearTerm::Theta}) {
    cmp(bilinear_paraproduct(t, bc, f1, f2, alpha), bilinear_paraproduct(t, b, f1, f2, alpha));
  }
  checks.record("b + c invariance", 1e-12, worst);
}

void square_function_suite(const GridSpec& spec, const CellFunction& b, const CellFunction& f, Rng& rng,
                           int trial, Checks& checks) {
  Weight w;
  if (trial % 2 == 0) {
    w = exp_bmo(rng.uniform(-1.0, 1.0), b);
  } else {
    std::array<double, kMaxDim> x0{};
    for (int d = 0; d < spec.n; ++d) x0[d] = rng.uniform();
    w = power_weight(spec, rng.uniform(-0.9, 0.9) * spec.n, std::span<const double>(x0.data(), spec.n));
  }
  const double a2 = a_p_constant(w, 2.0);
  const double base = l2_weighted_sq(square_function(f), w);
  for (int k = 0; k <= 4; ++k) {
    const double lhs = l2_weighted_sq(shifted_square_function(f, k), w);
    const double bound = std::ldexp(1.0, spec.n * k) * a2 * base;
    checks.record("S_k chain", 1e-12, std::max(0.0, relative_to(lhs - bound, bound)));
  }
}

}  // namespace

int cmd_verify(const Config& cfg, const RunOptions& opt, std::ostream& report) {
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  Checks checks;
  for (int L : cfg.L) {
    const GridSpec spec(cfg.n, L);
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t ts = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(L)), static_cast<std::uint64_t>(t));
      Rng rng(mix_seed(ts, 7));
      const CellFunction b = (t % 2 == 0) ? haar_random(spec, mix_seed(ts, 1), 1.0) + CellFunction(spec, 0.4)
                                          : uniform_random(spec, mix_seed(ts, 1));
      const CellFunction f1 = uniform_random(spec, mix_seed(ts, 2));
      const CellFunction f2 = uniform_random(spec, mix_seed(ts, 3));
      const CellFunction g = uniform_random(spec, mix_seed(ts, 4));
      haar_suites(spec, f1, rng, checks);
      for (double alpha : cfg.alpha) {
        const FracParams fp(alpha, c_alpha(alpha) * cfg.c_alpha_scale);
        if (alpha <= cfg.n) linear_suites(spec, b, f1, alpha, fp, rng, checks);
        bilinear_suites(spec, b, f1, f2, g, alpha, fp, checks);
        invariance_suite(b, f1, f2, alpha, checks);
      }
      square_function_suite(spec, b, f1, rng, t, checks);
    }
  }

  int failures = 0;
  std::string csv = "check,max_residual,tolerance,status\n";
  for (const Check& c : checks.list()) {
    const bool ok = c.residual <= c.tolerance;
    if (!ok) ++failures;
    report << (ok ? "PASS" : "FAIL") << "  " << c.name << "  max_residual=" << format_double(c.residual)
           << "  tol=" << format_double(c.tolerance) << "\n";
    csv += "\"" + c.name + "\"," + format_double(c.residual) + "," + format_double(c.tolerance) + "," +
           (ok ? "pass" : "fail") + "\n";
  }
  csv += metadata_line(cfg, seed);
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  std::ofstream out(std::filesystem::path(opt.out_dir) / "verify.csv", std::ios::binary);
  if (!out) throw ConfigError("cannot write verify.csv in '" + opt.out_dir + "'");
  out << csv;
  report << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
  return failures == 0 ? kExitPass : kExitCheckFailed;
}

}  // namespace dyadic::experiment
