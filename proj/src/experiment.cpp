// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dyadic/error.hpp"
#include "dyadic/numerics.hpp"
#include "dyadic/paraproducts.hpp"
#include "experiment_detail.hpp"

#ifndef DYADIC_LAB_VERSION
#define DYADIC_LAB_VERSION "0.0.0"
#endif

namespace dyadic::experiment {

using json = nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(field, "expected a finite number");
  return v;
}

long long get_integer(const json& j, const std::string& field) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  field_error(field, "expected an integer");
}

std::uint64_t get_seed(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = get_integer(j, field);
  if (v < 0) field_error(field, "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) field_error(field, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get<std::string>();
}

// A scalar or a list; an empty list is rejected.
template <class T, class Get>
std::vector<T> get_axis(const json& j, const std::string& field, Get get) {
  std::vector<T> out;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError("config field '" + field + "': empty sweep axis");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get(j[i], field + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(get(j, field));
  }
  return out;
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) {
      field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
    }
  }
}

GeneratorSpec parse_generator(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object with a \"type\"");
  check_keys(j, field,
             {"type", "value", "level", "index", "signature", "packing", "depth", "seed", "lo", "hi", "delta", "beta",
              "x0", "path"});
  GeneratorSpec g;
  if (!j.contains("type")) field_error(field + ".type", "missing");
  g.type = get_string(j["type"], field + ".type");
  static const std::set<std::string> types{"constant", "haar", "haar_random", "uniform", "exp_bmo", "power", "file"};
  if (!types.contains(g.type)) field_error(field + ".type", "unknown generator \"" + g.type + "\"");
  if (j.contains("value")) g.value = get_number(j["value"], field + ".value");
  if (j.contains("level")) g.level = static_cast<int>(get_integer(j["level"], field + ".level"));
  if (j.contains("index")) {
    const long long v = get_integer(j["index"], field + ".index");
    if (v < 0) field_error(field + ".index", "expected a non-negative integer");
    g.index = static_cast<std::size_t>(v);
  }
  if (j.contains("signature")) {
    const long long v = get_integer(j["signature"], field + ".signature");
    if (v < 0) field_error(field + ".signature", "expected a non-negative integer");
    g.signature = static_cast<std::uint32_t>(v);
  }
  if (j.contains("packing")) g.packing = get_number(j["packing"], field + ".packing");
  if (j.contains("depth")) g.depth = static_cast<int>(get_integer(j["depth"], field + ".depth"));
  if (j.contains("seed")) g.seed = get_seed(j["seed"], field + ".seed");
  if (j.contains("lo")) g.lo = get_number(j["lo"], field + ".lo");
  if (j.contains("hi")) g.hi = get_number(j["hi"], field + ".hi");
  if (j.contains("delta")) g.delta = get_number(j["delta"], field + ".delta");
  if (j.contains("beta")) g.beta = get_number(j["beta"], field + ".beta");
  if (j.contains("x0")) {
    if (!j["x0"].is_array()) field_error(field + ".x0", "expected a list of coordinates");
    for (std::size_t i = 0; i < j["x0"].size(); ++i) {
      g.x0.push_back(get_number(j["x0"][i], field + ".x0[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("path")) g.path = get_string(j["path"], field + ".path");
  if (g.type == "file" && g.path.empty()) field_error(field + ".path", "required for file generators");
  return g;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out << content;
}

bool is_unit_weight(const GeneratorSpec& g) { return g.type == "constant" && g.value == 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config:" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error: " +
                      e.what());
  }
  if (!j.is_object()) throw ConfigError("config:1:1: top level must be a JSON object");
  check_keys(j, "",
             {"description", "mode", "n", "L", "alpha", "k", "p", "q", "p1", "p2", "scaling", "b", "b0", "mu", "lambda",
              "weights", "seed", "trials", "budget", "contour", "plots", "test_hooks"});

  Config cfg;
  cfg.text = text;
  if (j.contains("mode")) {
    cfg.mode = get_string(j["mode"], "mode");
    if (cfg.mode != "linear" && cfg.mode != "bilinear") field_error("mode", "expected \"linear\" or \"bilinear\"");
  }
  if (j.contains("n")) cfg.n = static_cast<int>(get_integer(j["n"], "n"));
  if (cfg.n < 1 || cfg.n > 3) field_error("n", "dimension must be 1, 2 or 3");
  auto as_int = [](const json& v, const std::string& f) { return static_cast<int>(get_integer(v, f)); };
  if (j.contains("L")) cfg.L = get_axis<int>(j["L"], "L", as_int);
  for (int L : cfg.L) {
    if (L < 2) throw ConfigError("config field 'L': L must be ≥ 2 for commutator suites");
    if (cfg.n * L > 28) field_error("L", "n*L must not exceed 28");
  }
  if (j.contains("alpha")) cfg.alpha = get_axis<double>(j["alpha"], "alpha", get_number);
  for (double a : cfg.alpha) {
    if (!(a > 0.0)) field_error("alpha", "alpha must be positive");
    if (!(a < 2.0 * cfg.n)) field_error("alpha", "alpha must be below 2n");
  }
  if (j.contains("k")) cfg.k = get_axis<int>(j["k"], "k", as_int);
  for (int k : cfg.k) {
    if (k < 1) field_error("k", "commutator order must be at least 1");
  }
  if (j.contains("p")) cfg.p = get_number(j["p"], "p");
  if (j.contains("q")) cfg.q = get_number(j["q"], "q");
  if (j.contains("p1")) cfg.p1 = get_number(j["p1"], "p1");
  if (j.contains("p2")) cfg.p2 = get_number(j["p2"], "p2");
  if (j.contains("scaling")) cfg.scaling = get_bool(j["scaling"], "scaling");
  if (!cfg.scaling && !cfg.q) field_error("q", "required when scaling is false");

  if (j.contains("b")) {
    if (j["b"].is_array()) {
      if (j["b"].empty()) throw ConfigError("config field 'b': empty sweep axis");
      for (std::size_t i = 0; i < j["b"].size(); ++i) {
        cfg.b.push_back(parse_generator(j["b"][i], "b[" + std::to_string(i) + "]"));
      }
    } else {
      cfg.b.push_back(parse_generator(j["b"], "b"));
    }
  } else {
    GeneratorSpec g;
    g.type = "haar_random";
    cfg.b.push_back(g);
  }
  for (const auto& g : cfg.b) {
    if (g.type == "exp_bmo" || g.type == "power") field_error("b", "\"" + g.type + "\" is a weight generator");
  }
  if (j.contains("b0")) cfg.b0 = parse_generator(j["b0"], "b0");

  if (j.contains("weights") && (j.contains("mu") || j.contains("lambda"))) {
    field_error("weights", "give either a weights list or mu/lambda, not both");
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (!w.is_array()) field_error("weights", "expected a list of {mu, lambda} pairs");
    if (w.empty()) throw ConfigError("config field 'weights': empty sweep axis");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string f = "weights[" + std::to_string(i) + "]";
      if (!w[i].is_object()) field_error(f, "expected an object");
      check_keys(w[i], f, {"mu", "lambda"});
      WeightPair pair;
      if (w[i].contains("mu")) pair.mu = parse_generator(w[i]["mu"], f + ".mu");
      if (w[i].contains("lambda")) pair.lambda = parse_generator(w[i]["lambda"], f + ".lambda");
      cfg.weights.push_back(pair);
    }
  } else {
    WeightPair pair;
    if (j.contains("mu")) pair.mu = parse_generator(j["mu"], "mu");
    if (j.contains("lambda")) pair.lambda = parse_generator(j["lambda"], "lambda");
    cfg.weights.push_back(pair);
  }
  for (const auto& pair : cfg.weights) {
    for (const GeneratorSpec* g : {&pair.mu, &pair.lambda}) {
      if (g->type == "haar" || g->type == "haar_random") field_error("weights", "\"" + g->type + "\" is not a weight");
    }
    if (cfg.mode == "bilinear" && !(is_unit_weight(pair.mu) && is_unit_weight(pair.lambda))) {
      field_error("weights", "bilinear mode is unweighted; mu and lambda must be the constant 1");
    }
  }

  if (j.contains("seed")) cfg.seed = get_seed(j["seed"], "seed");
  if (j.contains("trials")) cfg.trials = static_cast<int>(get_integer(j["trials"], "trials"));
  if (cfg.trials < 1) field_error("trials", "expected at least one trial");

  if (j.contains("budget")) {
    const json& b = j["budget"];
    if (!b.is_object()) field_error("budget", "expected an object");
    check_keys(b, "budget", {"pool", "iterations", "screened", "tolerance"});
    if (b.contains("pool")) cfg.budget.pool = static_cast<int>(get_integer(b["pool"], "budget.pool"));
    if (b.contains("iterations")) {
      cfg.budget.iterations = static_cast<int>(get_integer(b["iterations"], "budget.iterations"));
    }
    if (b.contains("screened")) cfg.budget.screened = static_cast<int>(get_integer(b["screened"], "budget.screened"));
    if (b.contains("tolerance")) cfg.budget.tolerance = get_number(b["tolerance"], "budget.tolerance");
    if (cfg.budget.pool < 0 || cfg.budget.iterations < 0 || cfg.budget.screened < 0) {
      field_error("budget", "pool, iterations and screened must be non-negative");
    }
  }

  if (j.contains("contour")) {
    const json& c = j["contour"];
    if (!c.is_object()) field_error("contour", "expected an object");
    check_keys(c, "contour", {"k", "M", "radius", "radius_constant", "weight_constant", "weight_samples", "max_rel_err"});
    if (c.contains("k")) cfg.contour.k = get_axis<int>(c["k"], "contour.k", as_int);
    for (int k : cfg.contour.k) {
      if (k < 1) field_error("contour.k", "commutator order must be at least 1");
    }
    if (c.contains("M")) cfg.contour.nodes = get_axis<int>(c["M"], "contour.M", as_int);
    for (int M : cfg.contour.nodes) {
      if (M < 1) field_error("contour.M", "expected a positive node count");
    }
    if (c.contains("radius") && !c["radius"].is_null()) {
      cfg.contour.radius = get_number(c["radius"], "contour.radius");
      if (!(*cfg.contour.radius > 0.0)) field_error("contour.radius", "expected a positive radius");
    }
    if (c.contains("radius_constant")) {
      cfg.contour.radius_constant = get_number(c["radius_constant"], "contour.radius_constant");
    }
    if (c.contains("weight_constant")) {
      cfg.contour.weight_constant = get_number(c["weight_constant"], "contour.weight_constant");
    }
    if (c.contains("weight_samples")) {
      cfg.contour.weight_samples = as_int(c["weight_samples"], "contour.weight_samples");
    }
    if (c.contains("max_rel_err")) cfg.contour.max_rel_err = get_number(c["max_rel_err"], "contour.max_rel_err");
  }

  if (j.contains("plots")) cfg.plots = get_bool(j["plots"], "plots");
  if (j.contains("test_hooks")) {
    const json& h = j["test_hooks"];
    if (!h.is_object()) field_error("test_hooks", "expected an object");
    check_keys(h, "test_hooks", {"c_alpha_scale"});
    if (h.contains("c_alpha_scale")) cfg.c_alpha_scale = get_number(h["c_alpha_scale"], "test_hooks.c_alpha_scale");
  }
  return cfg;
}

Config load_config(const std::string& path) { return parse_config(read_file(path)); }

// ---------------------------------------------------------------------------
// Formatting

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string metadata_line(const Config& cfg, std::uint64_t seed) {
  char hex[17];
  const auto res = std::to_chars(hex, hex + 16, fnv1a64(cfg.text), 16);
  std::string h(hex, res.ptr);
  h.insert(0, 16 - h.size(), '0');
  return "# config_hash=" + h + " seed=" + std::to_string(seed) + " version=" + DYADIC_LAB_VERSION + "\n";
}

// ---------------------------------------------------------------------------
// Generators

CellFunction make_function(const GeneratorSpec& g, const GridSpec& spec, std::uint64_t seed) {
  const std::uint64_t s = g.seed.value_or(seed);
  if (g.type == "constant") return CellFunction(spec, g.value);
  if (g.type == "haar") {
    if (g.level < 0 || g.level >= spec.L) throw ConfigError("haar generator: level must lie in [0, L)");
    if (g.index >= spec.cubes_at(g.level)) throw ConfigError("haar generator: cube index out of range");
    if (!HaarSignature(g.signature).cancellative(spec.n) || g.signature >= (1u << spec.n)) {
      throw ConfigError("haar generator: signature must be cancellative");
    }
    return g.value * haar_function(spec, CubeId::from_linear(spec.n, g.level, g.index), HaarSignature(g.signature));
  }
  if (g.type == "haar_random") return haar_random(spec, s, g.packing, g.depth);
  if (g.type == "uniform") return uniform_random(spec, s, g.lo, g.hi);
  if (g.type == "file") {
    std::ifstream in(g.path);
    if (!in) throw ConfigError("cannot open function file '" + g.path + "'");
    CellFunction f = read_csv(in);
    if (f.spec().n != spec.n || f.spec().L > spec.L) {
      throw ConfigError("function file '" + g.path + "' does not fit the configured grid");
    }
    return f.spec().L == spec.L ? f : refine(f, spec.L);
  }
  throw ConfigError("generator \"" + g.type + "\" does not produce a function");
}

Weight make_weight(const GeneratorSpec& g, const GridSpec& spec, const CellFunction& b0, std::uint64_t seed) {
  const std::uint64_t s = g.seed.value_or(seed);
  if (g.type == "constant") {
    if (!(g.value > 0.0)) throw ConfigError("constant weight must be positive");
    return Weight::constant(spec, g.value);
  }
  if (g.type == "exp_bmo") return exp_bmo(g.delta, b0);
  if (g.type == "power") {
    std::vector<double> x0 = g.x0;
    x0.resize(static_cast<std::size_t>(spec.n), 0.5);
    return power_weight(spec, g.beta, x0);
  }
  if (g.type == "uniform") {
    if (!(g.lo > 0.0)) throw ConfigError("uniform weight needs lo > 0");
    return Weight(uniform_random(spec, s, g.lo, g.hi));
  }
  if (g.type == "file") return Weight(make_function(g, spec, s));
  throw ConfigError("generator \"" + g.type + "\" does not produce a weight");
}

// ---------------------------------------------------------------------------
// Norm rows

namespace detail {

Exponents linear_exponents(const Config& cfg, double alpha) {
  try {
    if (cfg.scaling) {
      Exponents e = Exponents::scaling(cfg.p, alpha, cfg.n);
      if (cfg.q) {
        if (std::abs(*cfg.q - e.q) > 1e-9 * e.q) {
          throw ConfigError("config field 'q': q = " + format_double(*cfg.q) +
                            " violates the scaling law (expected " + format_double(e.q) + ")");
        }
        e.q = *cfg.q;
      }
      return e;
    }
    return Exponents::free(cfg.p, *cfg.q);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config field 'p': ") + e.what());
  }
}

BilinearExponents bilinear_exponents(const Config& cfg, double alpha) {
  try {
    if (cfg.scaling) {
      BilinearExponents e = BilinearExponents::scaling(cfg.p1, cfg.p2, alpha, cfg.n);
      if (cfg.q) {
        if (std::abs(*cfg.q - e.q) > 1e-9 * e.q) {
          throw ConfigError("config field 'q': q = " + format_double(*cfg.q) +
                            " violates the scaling law (expected " + format_double(e.q) + ")");
        }
        e.q = *cfg.q;
      }
      return e;
    }
    if (!(cfg.p1 > 1.0 && cfg.p2 > 1.0)) throw ConfigError("config fields 'p1', 'p2': must exceed 1");
    if (!(*cfg.q > 1.0)) throw ConfigError("config field 'q': q must exceed 1");
    return {cfg.p1, cfg.p2, *cfg.q};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config fields 'p1', 'p2': ") + e.what());
  }
}

void validate_exponents(const Config& cfg) {
  for (double a : cfg.alpha) {
    if (cfg.mode == "linear") {
      if (a > cfg.n) field_error("alpha", "linear mode needs alpha <= n");
      linear_exponents(cfg, a);
    } else {
      bilinear_exponents(cfg, a);
    }
  }
  if (cfg.mode == "bilinear") {
    for (int k : cfg.k) {
      if (k != 1) field_error("k", "bilinear mode supports first-order commutators only");
    }
  }
}

std::vector<NormPoint> norm_points(const Config& cfg) {
  std::vector<NormPoint> pts;
  for (double a : cfg.alpha) {
    for (int k : cfg.k) {
      for (std::size_t w = 0; w < cfg.weights.size(); ++w) {
        for (std::size_t b = 0; b < cfg.b.size(); ++b) {
          for (int L : cfg.L) pts.push_back({a, k, w, b, L});
        }
      }
    }
  }
  return pts;
}

NormRow compute_norm_row(const Config& cfg, const NormPoint& pt, std::uint64_t seed, std::uint64_t stream) {
  const GridSpec spec(cfg.n, pt.L);
  const CellFunction b = make_function(cfg.b[pt.b], spec, seed);
  const CellFunction b0 = cfg.b0 ? make_function(*cfg.b0, spec, seed) : b;
  const Weight mu = make_weight(cfg.weights[pt.w].mu, spec, b0, seed);
  const Weight lambda = make_weight(cfg.weights[pt.w].lambda, spec, b0, seed);
  const FracParams fp(pt.alpha);

  NormRow row;
  row.point = pt;
  if (cfg.mode == "linear") {
    const Exponents ex = linear_exponents(cfg, pt.alpha);
    row.p = ex.p;
    row.q = ex.q;
    row.a_pq_mu = a_pq_constant(mu, ex.p, ex.q);
    row.a_pq_lambda = a_pq_constant(lambda, ex.p, ex.q);
    const Weight nu = bloom_weight(mu, lambda, ex.p, BloomFlavor::ratio);
    row.bmo_nu = bmo_weighted(b, nu);
    row.est = norm_estimate(commutator_operator(b, fp, pt.k), spec, ex, mu, lambda, cfg.budget, stream);
  } else {
    const BilinearExponents ex = bilinear_exponents(cfg, pt.alpha);
    row.p = ex.p();
    row.q = ex.q;
    row.p1 = ex.p1;
    row.p2 = ex.p2;
    if (row.p > 1.0) {
      row.a_pq_mu = a_pq_constant(mu, row.p, ex.q);
      row.a_pq_lambda = a_pq_constant(lambda, row.p, ex.q);
    }
    row.bmo_nu = bmo(b);
    row.est = norm_estimate(bilinear_commutator_operator(b, fp, 1), spec, ex, cfg.budget, stream);
    if (bmo_haar2(b) > 0.0) row.probe = lower_bound_probe(b, pt.alpha, ex.p1, ex.p2, ex.q).value;
  }
  row.bmo = bmo(b);
  const double den = row.bmo_nu * std::pow(row.bmo, pt.k - 1);
  if (den > 0.0 && std::isfinite(den)) row.ratio = row.est.value / den;
  return row;
}

std::string norm_header(const Config& cfg) {
  std::string h = "n,L,alpha,k,p,q,A_pq_mu,A_pq_lambda,bmo_nu,bmo,norm_lower,ratio";
  if (cfg.mode == "bilinear") h += ",p1,p2,probe";
  return h + "\n";
}

std::string norm_csv_line(const Config& cfg, const NormRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string s = std::to_string(cfg.n) + "," + std::to_string(r.point.L) + "," + format_double(r.point.alpha) + "," +
                  std::to_string(r.point.k) + "," + format_double(r.p) + "," + format_double(r.q) + "," +
                  opt(r.a_pq_mu) + "," + opt(r.a_pq_lambda) + "," + format_double(r.bmo_nu) + "," +
                  format_double(r.bmo) + "," + format_double(r.est.value) + "," + opt(r.ratio);
  if (cfg.mode == "bilinear") s += "," + format_double(r.p1) + "," + format_double(r.p2) + "," + opt(r.probe);
  return s + "\n";
}

std::vector<NormRow> compute_norm_rows(const Config& cfg, std::uint64_t seed) {
  const std::vector<NormPoint> pts = norm_points(cfg);
  std::vector<NormRow> rows(pts.size());
  std::vector<std::string> errors(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      rows[i] = compute_norm_row(cfg, pts[i], seed, mix_seed(seed, i));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ConfigError(e);
  }
  return rows;
}

}  // namespace detail

namespace {

using detail::NormRow;

int norms_like(const Config& cfg, const RunOptions& opt, std::ostream& report, const std::string& name,
               bool plots) {
  detail::validate_exponents(cfg);
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  const std::vector<NormRow> rows = detail::compute_norm_rows(cfg, seed);

  std::string csv = detail::norm_header(cfg);
  int failures = 0;
  for (const NormRow& r : rows) {
    csv += detail::norm_csv_line(cfg, r);
    if (!std::isfinite(r.est.value)) {
      report << "FAIL  non-finite norm estimate at L=" << r.point.L << " alpha=" << format_double(r.point.alpha)
             << "\n";
      ++failures;
    }
    if (r.probe && *r.probe > r.est.value * (1.0 + 1e-12) + 1e-15) {
      report << "FAIL  probe " << format_double(*r.probe) << " exceeds norm_lower " << format_double(r.est.value)
             << " at L=" << r.point.L << "\n";
      ++failures;
    }
  }
  csv += metadata_line(cfg, seed);
  write_file(opt.out_dir, name + ".csv", csv);
  report << name << ": " << rows.size() << " rows written to " << (std::filesystem::path(opt.out_dir) / (name + ".csv")).string()
         << "\n";

  if (plots) {
    // One two-column file per curve: ratio against L.
    std::map<std::tuple<std::size_t, int, std::size_t, std::size_t>, std::string> curves;
    std::vector<std::tuple<std::size_t, int, std::size_t, std::size_t>> order;
    for (const NormRow& r : rows) {
      const std::size_t ai = static_cast<std::size_t>(
          std::find(cfg.alpha.begin(), cfg.alpha.end(), r.point.alpha) - cfg.alpha.begin());
      const auto key = std::make_tuple(ai, r.point.k, r.point.w, r.point.b);
      if (!curves.contains(key)) {
        order.push_back(key);
        curves[key] = "L,ratio\n";
      }
      curves[key] += std::to_string(r.point.L) + "," + (r.ratio ? format_double(*r.ratio) : std::string()) + "\n";
    }
    for (std::size_t c = 0; c < order.size(); ++c) {
      const auto& [ai, k, w, b] = order[c];
      const std::string file = "plot_alpha" + std::to_string(ai) + "_k" + std::to_string(k) + "_w" +
                               std::to_string(w) + "_b" + std::to_string(b) + ".csv";
      write_file(opt.out_dir, file, curves[order[c]] + metadata_line(cfg, seed));
    }
    report << name << ": " << order.size() << " plot-data files\n";
  }
  return failures == 0 ? kExitPass : kExitCheckFailed;
}

}  // namespace

int cmd_norms(const Config& cfg, const RunOptions& opt, std::ostream& report) {
  return norms_like(cfg, opt, report, "norms", false);
}

int cmd_sweep(const Config& cfg, const RunOptions& opt, std::ostream& report) {
  return norms_like(cfg, opt, report, "sweep", cfg.plots);
}

// ---------------------------------------------------------------------------
// Contour

int cmd_cauchy(const Config& cfg, const RunOptions& opt, std::ostream& report) {
  if (cfg.mode != "linear") field_error("mode", "cauchy runs the linear commutators");
  const double alpha = cfg.alpha.front();
  if (alpha > cfg.n) field_error("alpha", "linear mode needs alpha <= n");
  const Exponents ex = detail::linear_exponents(cfg, alpha);
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  const GridSpec spec(cfg.n, cfg.L.front());
  const CellFunction b = make_function(cfg.b.front(), spec, seed);
  const CellFunction b0 = cfg.b0 ? make_function(*cfg.b0, spec, seed) : b;
  const Weight mu = make_weight(cfg.weights.front().mu, spec, b0, seed);
  const Weight lambda = make_weight(cfg.weights.front().lambda, spec, b0, seed);
  const CellFunction f = uniform_random(spec, mix_seed(seed, 0x51));
  const FracParams fp(alpha);

  double r1 = 1.0;
  if (cfg.contour.radius) {
    r1 = *cfg.contour.radius;
  } else if (bmo(b) > 0.0) {
    r1 = cauchy_radius(b, mu, lambda, ex.p, ex.q, cfg.contour.radius_constant);
  }
  const double radii[2] = {r1, 0.5 * r1};

  std::string csv = "k,M,r,rel_err\n";
  int failures = 0;
  for (int k : cfg.contour.k) {
    const CellFunction oracle = commutator_linear(b, f, fp, k);
    for (int M : cfg.contour.nodes) {
      if (M < 4 * (k - 1)) {
        throw ConfigError("contour: insufficient quadrature nodes (M = " + std::to_string(M) + " for k = " +
                          std::to_string(k) + ")");
      }
      for (double r : radii) {
        const CellFunction c = cauchy_commutator(b, f, fp, {r, M, k - 1});
        const double err = relative_residual(c, oracle);
        csv += std::to_string(k) + "," + std::to_string(M) + "," + format_double(r) + "," + format_double(err) + "\n";
        const bool ok = err <= cfg.contour.max_rel_err;
        if (!ok) ++failures;
        report << (ok ? "PASS" : "FAIL") << "  k=" << k << " M=" << M << " r=" << format_double(r)
               << " rel_err=" << format_double(err) << "\n";
      }
    }
  }
  csv += metadata_line(cfg, seed);
  write_file(opt.out_dir, "cauchy.csv", csv);

  // Weight uniformity on the contour and the first-order norm at sampled z.
  std::string wcsv = "theta,re_z,im_z,A_pq_mu,A_pq_mu_z,A_pq_lambda,A_pq_lambda_z,holds,norm_k1\n";
  const double a_mu = a_pq_constant(mu, ex.p, ex.q);
  const double a_lambda = a_pq_constant(lambda, ex.p, ex.q);
  const double mean_b = integral(b);
  const int S = std::max(cfg.contour.weight_samples, 0);
  std::vector<std::string> lines(static_cast<std::size_t>(S));
  for (int j = 0; j < S; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / S;
    const std::complex<double> z = std::polar(r1, theta);
    CellFunction factor(spec);
    for (std::size_t x = 0; x < factor.size(); ++x) factor[x] = std::exp((b[x] - mean_b) * z.real());
    const Weight mu_z(mu.base() * factor);
    const Weight lambda_z(lambda.base() * factor);
    const double am = a_pq_constant(mu_z, ex.p, ex.q);
    const double al = a_pq_constant(lambda_z, ex.p, ex.q);
    const double slack = 1.0 + 1e-12;
    const bool holds =
        am <= slack * cfg.contour.weight_constant * a_mu && al <= slack * cfg.contour.weight_constant * a_lambda;
    const NormEstimate est = norm_estimate(commutator_operator(b, fp, 1), spec, ex, mu_z, lambda_z, cfg.budget,
                                           mix_seed(seed, 0x100 + static_cast<std::uint64_t>(j)));
    lines[static_cast<std::size_t>(j)] = format_double(theta) + "," + format_double(z.real()) + "," +
                                         format_double(z.imag()) + "," + format_double(a_mu) + "," +
                                         format_double(am) + "," + format_double(a_lambda) + "," +
                                         format_double(al) + "," + (holds ? "1" : "0") + "," +
                                         format_double(est.value) + "\n";
    report << "weights  theta=" << format_double(theta) << " uniform_bound_holds=" << (holds ? "yes" : "no")
           << " norm_k1=" << format_double(est.value) << "\n";
  }
  for (const auto& l : lines) wcsv += l;
  wcsv += metadata_line(cfg, seed);
  write_file(opt.out_dir, "cauchy_weights.csv", wcsv);
  return failures == 0 ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// Dispatch

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = load_config(config_path);
    if (command == "verify") return cmd_verify(cfg, opt, out);
    if (command == "norms") return cmd_norms(cfg, opt, out);
    if (command == "cauchy") return cmd_cauchy(cfg, opt, out);
    if (command == "sweep") return cmd_sweep(cfg, opt, out);
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace dyadic::experiment
