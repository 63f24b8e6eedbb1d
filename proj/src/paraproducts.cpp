// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/paraproducts.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "dyadic/error.hpp"
#include "dyadic/kernels.hpp"
#include "dyadic/multiscale.hpp"

namespace dyadic {

using kernels::Levels;

namespace {

void same_grid(const CellFunction& a, const CellFunction& b) {
  if (!(a.spec() == b.spec())) throw DomainError("inputs live on different grids");
}

double level_scale(int l, double alpha) { return std::exp2(-l * alpha); }

std::uint32_t sum_signature(int n, int e, int h) {
  return haar_product(n, HaarSignature(e), HaarSignature(h)).signature.bits();
}

CellFunction synth(const GridSpec& spec, const Levels& coeffs) {
  return CellFunction(spec, kernels::omp::synthesize(spec, 0.0, coeffs));
}

// sum over cubes of terms[l][Q] 1_Q / |Q|; missing trailing levels are zero.
CellFunction density(const GridSpec& spec, Levels terms) {
  terms.resize(spec.L + 1);
  for (int l = 0; l <= spec.L; ++l) {
    const double inv = 1.0 / spec.measure_at(l);
    for (double& v : terms[l]) v *= inv;
  }
  return CellFunction(spec, kernels::omp::accumulate_down(spec, terms));
}

// Values of a level-`from` array seen from every cube at level `to` >= from.
std::vector<double> lift(const GridSpec& spec, int from, int to, std::vector<double> v) {
  for (int l = from; l < to; ++l) v = kernels::omp::prolong(spec, l, v);
  return v;
}

// t[l+1][child] = child_factor[l+1][child] * parent_value[l][parent] * scale(l),
// then summed down the tree. This is the G(child) = G(parent) + ... recursion
// shared by the Lambda splittings.
Levels parent_recursion(const GridSpec& spec, const Levels& child_factor, const Levels& parent_value,
                        const std::function<double(int)>& scale) {
  Levels t(spec.L + 1);
  t[0] = {0.0};
  for (int l = 0; l < spec.L; ++l) {
    std::vector<double> up = kernels::omp::prolong(spec, l, parent_value[l]);
    const double s = scale(l);
    for (std::size_t q = 0; q < up.size(); ++q) up[q] *= child_factor[l + 1][q] * s;
    t[l + 1] = std::move(up);
  }
  return kernels::omp::prefix_down(spec, t);
}

// coeff[l][Q, e] = base[l][Q, e] * per_cube[l][Q] * scale(l)
Levels scale_coefficients(const GridSpec& spec, const Levels& base, const Levels& per_cube,
                          const std::function<double(int)>& scale) {
  const int S = spec.signatures();
  Levels out(spec.L);
  for (int l = 0; l < spec.L; ++l) {
    out[l].resize(base[l].size());
    const double s = scale(l);
    for (std::size_t q = 0; q < spec.cubes_at(l); ++q) {
      const double w = per_cube[l][q] * s;
      for (int e = 0; e < S; ++e) out[l][q * S + e] = base[l][q * S + e] * w;
    }
  }
  return out;
}

// T[l][Q] = sum_e a[l][Q, e] c[l][Q, e]
Levels diagonal_pairing(const GridSpec& spec, const Levels& a, const Levels& c) {
  const int S = spec.signatures();
  Levels out(spec.L + 1);
  for (int l = 0; l < spec.L; ++l) {
    out[l].assign(spec.cubes_at(l), 0.0);
    for (std::size_t q = 0; q < out[l].size(); ++q) {
      double acc = 0.0;
      for (int e = 0; e < S; ++e) acc += a[l][q * S + e] * c[l][q * S + e];
      out[l][q] = acc;
    }
  }
  return out;
}

// Off-diagonal pairing: out[l][Q, e+h] += a[Q, e] c[Q, h] |Q|^{-1/2} w[l][Q] for e != h.
Levels off_diagonal_pairing(const GridSpec& spec, const Levels& a, const Levels& c, const Levels* weight) {
  const int S = spec.signatures();
  Levels out = kernels::make_levels(spec, spec.L - 1, S);
  for (int l = 0; l < spec.L; ++l) {
    const double root = 1.0 / std::sqrt(spec.measure_at(l));
    for (std::size_t q = 0; q < spec.cubes_at(l); ++q) {
      const double w = root * (weight ? (*weight)[l][q] : 1.0);
      for (int e = 0; e < S; ++e) {
        for (int h = 0; h < S; ++h) {
          if (e == h) continue;
          out[l][q * S + sum_signature(spec.n, e, h)] += a[l][q * S + e] * c[l][q * S + h] * w;
        }
      }
    }
  }
  return out;
}

CellFunction centered(const CellFunction& b) {
  const double m = average_pyramid(b)[0][0];
  return b.map([m](double v) { return v - m; });
}

CellFunction constant_like(const CellFunction& f, double c) { return CellFunction(f.spec(), c); }

// Linear fractional integral for any alpha in (0, 2n): I(g) = I(g, 1).
CellFunction linear_part(const CellFunction& g, const FracParams& fp) {
  return bifrac_integral(g, constant_like(g, 1.0), fp);
}

}  // namespace

CellFunction pi(const CellFunction& b, const CellFunction& f) {
  same_grid(b, f);
  const GridSpec& spec = b.spec();
  if (spec.L == 0) return CellFunction(spec);
  return synth(spec, scale_coefficients(spec, analyze(b).levels(), average_pyramid(f), [](int) { return 1.0; }));
}

CellFunction pi_star(const CellFunction& b, const CellFunction& f) {
  same_grid(b, f);
  const GridSpec& spec = b.spec();
  if (spec.L == 0) return CellFunction(spec);
  return density(spec, diagonal_pairing(spec, analyze(b).levels(), analyze(f).levels()));
}

CellFunction gamma(const CellFunction& b, const CellFunction& f) {
  same_grid(b, f);
  const GridSpec& spec = b.spec();
  if (spec.L == 0) return CellFunction(spec);
  return synth(spec, off_diagonal_pairing(spec, analyze(b).levels(), analyze(f).levels(), nullptr));
}

CellFunction b_shift(const CellFunction& b, const CellFunction& f, int k, ShiftMode mode) {
  same_grid(b, f);
  if (k < 0) throw DomainError("b_shift: k must be non-negative");
  const CellFunction& first = mode == ShiftMode::b_first ? b : f;
  const CellFunction& second = mode == ShiftMode::b_first ? f : b;
  const GridSpec& spec = b.spec();
  if (spec.L == 0) return CellFunction(spec);
  const int S = spec.signatures();
  const Levels c1 = analyze(first).levels();

  if (k == 0) {
    // Same-cube pairs: equal signatures give 1_Q/|Q|, distinct ones a Haar function.
    const Levels c2 = analyze(second).levels();
    Levels diag(spec.L + 1);
    Levels off = kernels::make_levels(spec, spec.L - 1, S);
    for (int l = 0; l < spec.L; ++l) {
      diag[l].assign(spec.cubes_at(l), 0.0);
      const double root = 1.0 / std::sqrt(spec.measure_at(l));
      for (std::size_t q = 0; q < spec.cubes_at(l); ++q) {
        for (int e = 0; e < S; ++e) {
          for (int h = 0; h < S; ++h) {
            const double v = c1[l][q * S + e] * c2[l][q * S + h];
            if (e == h) {
              diag[l][q] += v;
            } else {
              off[l][q * S + sum_signature(spec.n, e, h)] += v * root;
            }
          }
        }
      }
    }
    return synth(spec, off) + density(spec, std::move(diag));
  }

  // sum_h <g, h_{Q^(k)}^h> h_{Q^(k)}^h(Q) = <g>_{Q^(k-1)} - <g>_{Q^(k)}
  const Levels avg = average_pyramid(second);
  Levels coeff = kernels::make_levels(spec, spec.L - 1, S);
  for (int l = k; l < spec.L; ++l) {
    const std::vector<double> near = lift(spec, l - k + 1, l, avg[l - k + 1]);
    const std::vector<double> far = lift(spec, l - k, l, avg[l - k]);
    for (std::size_t q = 0; q < spec.cubes_at(l); ++q) {
      const double jump = near[q] - far[q];
      for (int e = 0; e < S; ++e) coeff[l][q * S + e] = c1[l][q * S + e] * jump;
    }
  }
  return synth(spec, coeff);
}

CellFunction shift_series(const CellFunction& b, const CellFunction& g, double alpha) {
  same_grid(b, g);
  const GridSpec& spec = b.spec();
  if (spec.L == 0) return CellFunction(spec);
  // For Q at level l: sum_{k=1..l} 2^{-k alpha} jump(Q^(k-1)), where the
  // ancestor R = Q^(k-1) sits at level j = l-k+1, so the weight factors as
  // 2^{-(l+1) alpha} 2^{j alpha}.
  const AverageData ad = average_data(g);
  Levels t(spec.L + 1);
  for (int j = 0; j <= spec.L; ++j) {
    t[j] = ad.delta[j];
    const double s = std::exp2(j * alpha);
    for (double& v : t[j]) v *= s;
  }
  const Levels acc = kernels::omp::prefix_down(spec, t);
  return synth(spec, scale_coefficients(spec, analyze(b).levels(), acc,
                                        [alpha](int l) { return std::exp2(-(l + 1) * alpha); }));
}

CellFunction commutator_linear(const CellFunction& b, const CellFunction& f, const FracParams& fp, int k) {
  same_grid(b, f);
  if (k < 1) throw DomainError("commutator order k must be at least 1");
  if (!(fp.alpha > 0.0 && fp.alpha <= f.spec().n)) throw DomainError("commutator_linear: alpha must lie in (0, n]");
  const CellFunction bt = centered(b);
  // powers[j] = bt^j
  std::vector<CellFunction> powers{constant_like(f, 1.0)};
  for (int j = 1; j <= k; ++j) powers.push_back(powers.back() * bt);
  CellFunction out(f.spec());
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) binom = binom * (k - j + 1) / j;
    const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
    out += (sign * binom) * (powers[j] * frac_integral(powers[k - j] * f, fp));
  }
  return out;
}

CellFunction commutator_linear(const CellFunction& b, const CellFunction& f, double alpha, int k) {
  return commutator_linear(b, f, FracParams(alpha), k);
}

CellFunction LinearDecomposition::combined() const {
  CellFunction out = mean_term;
  const auto t = terms();
  for (std::size_t i = 0; i < t.size(); ++i) out += signs[i] * *t[i];
  return out;
}

LinearDecomposition decompose_linear(const CellFunction& b, const CellFunction& f, const FracParams& fp) {
  same_grid(b, f);
  const CellFunction If = frac_integral(f, fp);
  LinearDecomposition d;
  d.pi_after_I = pi(b, If);
  d.I_after_pi_star = frac_integral(pi_star(b, f), fp);
  d.pi_star_after_I = pi_star(b, If);
  d.shift_series = shift_series(b, If, fp.alpha);
  d.mean_term = (-average_pyramid(f)[0][0]) * frac_integral(centered(b), fp);
  return d;
}

// ---------------------------------------------------------------------------
// Bilinear paraproducts

namespace {

struct BilinearInputs {
  GridSpec spec;
  Levels cb, c1, c2;
  AverageData ab, a1, a2;
  double alpha = 0.0;
};

BilinearInputs prepare(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  same_grid(b, f1);
  same_grid(b, f2);
  if (!(alpha > 0.0 && alpha < 2.0 * b.spec().n)) throw DomainError("bilinear paraproduct: alpha must lie in (0, 2n)");
  BilinearInputs in;
  in.spec = b.spec();
  in.alpha = alpha;
  in.ab = average_data(b);
  in.a1 = average_data(f1);
  in.a2 = average_data(f2);
  in.cb = analyze(b).levels();
  in.c1 = analyze(f1).levels();
  in.c2 = analyze(f2).levels();
  return in;
}

BilinearInputs swapped(const BilinearInputs& in) {
  BilinearInputs s = in;
  std::swap(s.c1, s.c2);
  std::swap(s.a1, s.a2);
  return s;
}

// sum_{P strictly inside Q1} <b,h_P> <f1,h_Q1> <f2>_Q1 |Q1|^{a/n} h_Q1(P) h_P
CellFunction lambda1(const BilinearInputs& in) {
  const double a = in.alpha;
  const Levels g = parent_recursion(in.spec, in.a1.delta, in.a2.avg, [a](int l) { return level_scale(l, a); });
  return synth(in.spec, scale_coefficients(in.spec, in.cb, g, [](int) { return 1.0; }));
}

// Q1 = Q2 strictly above P.
CellFunction lambda2(const BilinearInputs& in) {
  Levels prod(in.spec.L + 1);
  prod[0] = {0.0};
  for (int l = 1; l <= in.spec.L; ++l) {
    prod[l] = in.a1.delta[l];
    for (std::size_t q = 0; q < prod[l].size(); ++q) prod[l][q] *= in.a2.delta[l][q];
  }
  Levels ones(in.spec.L + 1);
  for (int l = 0; l <= in.spec.L; ++l) ones[l].assign(in.spec.cubes_at(l), 1.0);
  const double a = in.alpha;
  const Levels g = parent_recursion(in.spec, prod, ones, [a](int l) { return level_scale(l, a); });
  return synth(in.spec, scale_coefficients(in.spec, in.cb, g, [](int) { return 1.0; }));
}

// Q2 = P, equal signatures: sum_P <f1>_P |P|^{a/n} (sum_h <b,h_P^h><f2,h_P^h>) 1_P/|P|
CellFunction lambda31_eq(const BilinearInputs& in) {
  Levels t = diagonal_pairing(in.spec, in.cb, in.c2);
  for (int l = 0; l < in.spec.L; ++l) {
    const double s = level_scale(l, in.alpha);
    for (std::size_t q = 0; q < t[l].size(); ++q) t[l][q] *= in.a1.avg[l][q] * s;
  }
  return density(in.spec, std::move(t));
}

// Q2 = P, distinct signatures.
CellFunction lambda31_ne(const BilinearInputs& in) {
  Levels w(in.spec.L);
  for (int l = 0; l < in.spec.L; ++l) {
    w[l] = in.a1.avg[l];
    const double s = level_scale(l, in.alpha);
    for (double& v : w[l]) v *= s;
  }
  return synth(in.spec, off_diagonal_pairing(in.spec, in.cb, in.c2, &w));
}

// Q2 strictly inside P strictly inside Q1:
// coefficient of h_Q2 is <f2,h_Q2> |Q2|^{a/n} sum_{P > Q2} <f1>_P sum_h <b,h_P^h> h_P^h(Q2).
CellFunction lambda32(const BilinearInputs& in) {
  const Levels g = parent_recursion(in.spec, in.ab.delta, in.a1.avg, [](int) { return 1.0; });
  const double a = in.alpha;
  return synth(in.spec, scale_coefficients(in.spec, in.c2, g, [a](int l) { return level_scale(l, a); }));
}

// P strictly inside Q2: sum_P <b,h_P> |P|^{a/n} <f1>_P <f2>_P h_P
CellFunction delta2(const BilinearInputs& in) {
  Levels w(in.spec.L);
  for (int l = 0; l < in.spec.L; ++l) {
    w[l] = in.a1.avg[l];
    for (std::size_t q = 0; q < w[l].size(); ++q) w[l][q] *= in.a2.avg[l][q];
  }
  const double a = in.alpha;
  return synth(in.spec, scale_coefficients(in.spec, in.cb, w, [a](int l) { return level_scale(l, a); }));
}

// sum_Q |Q|^{a/n} <f2>_Q D(Q) 1_Q/|Q| with D(Q) the sum of
// sum_e <b,h_Q1^e><f1,h_Q1^e> over cubes Q1 strictly inside Q.
CellFunction theta(const BilinearInputs& in) {
  const Levels pair = diagonal_pairing(in.spec, in.cb, in.c1);
  Levels terms(in.spec.L + 1);
  for (int l = 0; l <= in.spec.L; ++l) {
    terms[l] = pair[l].empty() ? std::vector<double>(in.spec.cubes_at(l), 0.0) : pair[l];
  }
  Levels sub = kernels::omp::sum_up(in.spec, terms);
  for (int l = 0; l <= in.spec.L; ++l) {
    const double s = level_scale(l, in.alpha);
    for (std::size_t q = 0; q < sub[l].size(); ++q) {
      sub[l][q] = (sub[l][q] - terms[l][q]) * in.a2.avg[l][q] * s;
    }
  }
  return density(in.spec, std::move(sub));
}

}  // namespace

CellFunction LambdaParts::sum() const {
  return lambda1 + lambda2 + lambda31_eq + lambda31_ne + lambda32 + lambda33;
}

CellFunction DeltaParts::sum() const { return delta1 + delta2 + delta3; }

LambdaParts lambda_parts(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const BilinearInputs in = prepare(b, f1, f2, alpha);
  if (in.spec.L == 0) {
    const CellFunction z(in.spec);
    return {z, z, z, z, z, z};
  }
  LambdaParts p;
  p.lambda1 = lambda1(in);
  p.lambda2 = lambda2(in);
  p.lambda31_eq = lambda31_eq(in);
  p.lambda31_ne = lambda31_ne(in);
  p.lambda32 = lambda32(in);
  p.lambda33 = lambda1(swapped(in));
  return p;
}

DeltaParts delta_parts(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha) {
  const BilinearInputs in = prepare(b, f1, f2, alpha);
  if (in.spec.L == 0) {
    const CellFunction z(in.spec);
    return {z, z, z};
  }
  DeltaParts p;
  p.delta1 = lambda31_eq(in) + lambda31_ne(in);
  p.delta2 = delta2(in);
  p.delta3 = lambda32(in);
  return p;
}

CellFunction bilinear_paraproduct(BilinearTerm which, const CellFunction& b, const CellFunction& f1,
                                  const CellFunction& f2, double alpha) {
  const BilinearInputs in = prepare(b, f1, f2, alpha);
  if (in.spec.L == 0) return CellFunction(in.spec);
  switch (which) {
    case BilinearTerm::Lambda:
      return lambda_parts(b, f1, f2, alpha).sum();
    case BilinearTerm::Delta:
      return delta_parts(b, f1, f2, alpha).sum();
    case BilinearTerm::Xi:
      return lambda31_eq(swapped(in));
    case BilinearTerm::Theta:
      return theta(in);
  }
  throw DomainError("unknown bilinear paraproduct");
}

CellFunction commutator_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2,
                                 const FracParams& fp, int slot) {
  same_grid(b, f1);
  same_grid(b, f2);
  if (slot != 1 && slot != 2) throw DomainError("commutator slot must be 1 or 2");
  const CellFunction bt = centered(b);
  if (slot == 1) return bt * bifrac_integral(f1, f2, fp) - bifrac_integral(bt * f1, f2, fp);
  return bt * bifrac_integral(f1, f2, fp) - bifrac_integral(f1, bt * f2, fp);
}

CellFunction commutator_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2, double alpha,
                                 int slot) {
  return commutator_bilinear(b, f1, f2, FracParams(alpha), slot);
}

CellFunction BilinearDecomposition::combined() const {
  CellFunction out = mean_term;
  const auto t = terms();
  for (std::size_t i = 0; i < t.size(); ++i) out += coefficients[i] * *t[i];
  return out;
}

BilinearDecomposition decompose_bilinear(const CellFunction& b, const CellFunction& f1, const CellFunction& f2,
                                         const FracParams& fp) {
  const BilinearInputs in = prepare(b, f1, f2, fp.alpha);
  BilinearDecomposition d;
  d.coefficients = {fp.c, -fp.c, -1.0, -1.0};
  if (in.spec.L == 0) {
    const CellFunction z(in.spec);
    d.lambda = d.delta = d.xi = d.theta = z;
  } else {
    d.lambda = lambda_parts(b, f1, f2, fp.alpha).sum();
    d.delta = delta_parts(b, f1, f2, fp.alpha).sum();
    d.xi = lambda31_eq(swapped(in));
    d.theta = theta(in);
  }
  // Contributions of the constant parts of f1 and f2.
  const double m1 = in.a1.mean;
  const double m2 = in.a2.mean;
  const CellFunction bt = centered(b);
  const CellFunction g1 = f1.map([m1](double v) { return v - m1; });
  const CellFunction g2 = f2.map([m2](double v) { return v - m2; });
  CellFunction mean(in.spec);
  if (m1 != 0.0) mean += m1 * (bt * linear_part(g2, fp) - bifrac_integral(bt, g2, fp));
  if (m2 != 0.0) mean += m2 * (bt * linear_part(g1, fp) - linear_part(bt * g1, fp));
  if (m1 != 0.0 && m2 != 0.0) {
    mean += (m1 * m2) * (bt * linear_part(constant_like(b, 1.0), fp) - linear_part(bt, fp));
  }
  d.mean_term = std::move(mean);
  return d;
}

CellFunction lambda1_dual(const CellFunction& g, const CellFunction& f1, const CellFunction& f2, double alpha) {
  BilinearInputs in = prepare(g, f1, f2, alpha);
  if (in.spec.L == 0) return CellFunction(in.spec);
  for (auto& lvl : in.a2.avg) {
    for (double& v : lvl) v += in.a2.mean;
  }
  return lambda1(in);
}

}  // namespace dyadic
