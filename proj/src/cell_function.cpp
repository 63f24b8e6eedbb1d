// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "dyadic/cell_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "dyadic/error.hpp"
#include "dyadic/numerics.hpp"

namespace dyadic {

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  if (n == 2) return v[0] + v[1];
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

CellFunction::CellFunction(const GridSpec& spec, double fill) : spec_(spec), values_(spec.cells(), fill) {}

CellFunction::CellFunction(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cells()) throw DomainError("cell function length does not match the grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("cell function values must be finite");
  }
}

namespace {
void require_same_grid(const CellFunction& a, const CellFunction& b) {
  if (!(a.spec() == b.spec())) throw DomainError("cell functions live on different grids");
}
}  // namespace

CellFunction& CellFunction::operator+=(const CellFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

CellFunction& CellFunction::operator-=(const CellFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

CellFunction& CellFunction::operator*=(const CellFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}

CellFunction& CellFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double integral(const CellFunction& f) { return pairwise_sum(f.values()) * f.cell_volume(); }

double inner(const CellFunction& f, const CellFunction& g) {
  require_same_grid(f, g);
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * g[i];
  return pairwise_sum(prod) * f.cell_volume();
}

double max_abs(const CellFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const CellFunction& f, const CellFunction& g) {
  require_same_grid(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

double relative_residual(const CellFunction& f, const CellFunction& g) {
  const double diff = max_abs_diff(f, g);
  const double scale = max_abs(g);
  return scale > 0.0 ? diff / scale : diff;
}

std::array<double, kMaxDim> cell_center(const GridSpec& spec, std::size_t cell) {
  const CubeId c = CubeId::from_linear(spec.n, spec.L, cell);
  std::array<double, kMaxDim> x{};
  const double side = std::ldexp(1.0, -spec.L);
  for (int i = 0; i < spec.n; ++i) x[i] = (c.index[i] + 0.5) * side;
  return x;
}

CellFunction indicator(const GridSpec& spec, const CubeId& q) {
  if (q.level > spec.L) throw DomainError("cube is finer than the grid resolution");
  CellFunction out(spec);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (q.contains(CubeId::from_linear(spec.n, spec.L, i), spec.n)) out[i] = 1.0;
  }
  return out;
}

CellFunction haar_function(const GridSpec& spec, const CubeId& q, HaarSignature eps) {
  if (q.level >= spec.L && eps.cancellative(spec.n)) {
    throw DomainError("cancellative Haar functions need a cube coarser than the cells");
  }
  CellFunction out(spec);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = cell_center(spec, i);
    out[i] = haar_eval(spec.n, q, eps, std::span<const double>(x.data(), spec.n));
  }
  return out;
}

CellFunction refine(const CellFunction& f, int level) {
  const GridSpec& coarse = f.spec();
  if (level < coarse.L) throw DomainError("refine target must not be coarser");
  const GridSpec fine(coarse.n, level);
  CellFunction out(fine);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[cube_of_cell(fine, i, coarse.L)];
  return out;
}

void write_csv(std::ostream& os, const CellFunction& f) {
  os << f.spec().n << ',' << f.spec().L << '\n';
  char buf[64];
  for (double v : f.values()) {
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    os.write(buf, res.ptr - buf);
    os.put('\n');
  }
}

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, std::size_t line_no) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DomainError("csv line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
  }
  return value;
}
}  // namespace

CellFunction read_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      line = trim(line);
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw DomainError("csv: missing 'n,L' header");
  if (line == "n,L" && !next_line()) throw DomainError("csv: missing grid dimensions");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw DomainError("csv line " + std::to_string(line_no) + ": expected 'n,L'");
  const int n = parse_number<int>(trim(line.substr(0, comma)), line_no);
  const int L = parse_number<int>(trim(line.substr(comma + 1)), line_no);
  const GridSpec spec(n, L);
  std::vector<double> values;
  values.reserve(spec.cells());
  while (next_line()) values.push_back(parse_number<double>(line, line_no));
  if (values.size() != spec.cells()) {
    throw DomainError("csv: expected " + std::to_string(spec.cells()) + " values, got " +
                      std::to_string(values.size()));
  }
  return CellFunction(spec, std::move(values));
}

}  // namespace dyadic
