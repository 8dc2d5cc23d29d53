#include "curvmax/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>

namespace curvmax {

using sym::Assumptions;
using sym::Interval;

sym::Interval Chart::interval(const std::string& coord) const {
  auto it = domain.find(coord);
  return it == domain.end() ? sym::Interval{} : it->second;
}

sym::Assumptions Chart::assumptions() const {
  Assumptions a;
  const double pi = std::numbers::pi;
  for (const auto& c : coords) {
    Interval d = interval(c);
    Expr v = sym::var(c);
    if (d.lo >= 0.0) a.positive.push_back(v);
    if (d.lo >= 0.0 && d.hi <= pi) a.positive.push_back(sym::sin(v));
    if (d.lo >= -pi / 2 && d.hi <= pi / 2) a.positive.push_back(sym::cos(v));
  }
  return a;
}

sym::EquivalenceOptions Chart::sampling() const {
  sym::EquivalenceOptions o;
  for (const auto& c : coords) o.domains[c] = interval(c);
  return o;
}

Chart make_chart(std::string name, std::vector<std::string> coords, std::vector<Expr> embedding,
                 std::map<std::string, sym::Interval> domain) {
  if (coords.size() < 2 || coords.size() > 3)
    throw ChartError("chart '" + name + "': dimension must be 2 or 3");
  if (embedding.size() != coords.size())
    throw ChartError("chart '" + name + "': embedding needs " + std::to_string(coords.size()) +
                     " components");
  std::set<std::string> cs(coords.begin(), coords.end());
  if (cs.size() != coords.size()) throw ChartError("chart '" + name + "': repeated coordinate");
  for (const auto& e : embedding)
    for (const auto& s : sym::free_symbols(e))
      if (!cs.count(s))
        throw ChartError("chart '" + name + "': embedding uses unknown symbol '" + s + "'");
  for (const auto& [k, v] : domain) {
    if (!cs.count(k)) throw ChartError("chart '" + name + "': domain for unknown coordinate '" + k + "'");
    if (!(v.lo < v.hi)) throw ChartError("chart '" + name + "': empty domain for '" + k + "'");
  }
  Chart c{std::move(name), std::move(coords), {}, std::move(domain)};
  for (auto& e : embedding) c.embedding.push_back(sym::simplify(e));
  return c;
}

Chart builtin_chart(const std::string& name) {
  using sym::parse_expr;
  if (name == "cartesian")
    return make_chart(name, {"x", "y", "z"}, {sym::var("x"), sym::var("y"), sym::var("z")},
                      {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"z", {-1.0, 1.0}}});
  if (name == "cylindrical")
    return make_chart(name, {"r", "phi", "z"},
                      {parse_expr("r*cos(phi)"), parse_expr("r*sin(phi)"), sym::var("z")},
                      {{"r", {0.1, 2.0}}, {"phi", {0.0, 6.28}}, {"z", {-1.0, 1.0}}});
  if (name == "spherical")
    return make_chart(name, {"r", "theta", "phi"},
                      {parse_expr("r*sin(theta)*cos(phi)"), parse_expr("r*sin(theta)*sin(phi)"),
                       parse_expr("r*cos(theta)")},
                      {{"r", {0.1, 2.0}}, {"theta", {0.1, 3.04}}, {"phi", {0.0, 6.28}}});
  throw ChartError("unknown chart '" + name + "' (built-in: cartesian, cylindrical, spherical)");
}

std::vector<std::string> builtin_chart_names() { return {"cartesian", "cylindrical", "spherical"}; }

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Split at commas that are not nested in parentheses.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

struct Section {
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> kv;
};

Chart build_section(const Section& s) {
  auto need = [&](const char* key) -> const std::pair<std::string, int>& {
    auto it = s.kv.find(key);
    if (it == s.kv.end())
      throw ChartError("chart file line " + std::to_string(s.line) + ": missing key '" + key + "'");
    return it->second;
  };
  std::string name = need("name").first;
  std::vector<std::string> coords = split_top(need("coords").first);
  std::vector<Expr> emb;
  const auto& [etext, eline] = need("embedding");
  for (const auto& part : split_top(etext)) {
    try {
      emb.push_back(sym::parse_expr(part));
    } catch (const sym::ParseError& e) {
      throw ChartError("chart file line " + std::to_string(eline) + ": " + e.what());
    }
  }
  std::map<std::string, Interval> dom;
  auto d = s.kv.find("domain");
  if (d != s.kv.end()) {
    static const std::regex item(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*$)");
    for (const auto& part : split_top(d->second.first)) {
      std::smatch m;
      if (!std::regex_match(part, m, item))
        throw ChartError("chart file line " + std::to_string(d->second.second) +
                         ": malformed domain entry '" + part + "'");
      dom[m[1]] = {std::stod(m[2]), std::stod(m[3])};
    }
  }
  return make_chart(name, coords, emb, dom);
}

}  // namespace

std::vector<Chart> parse_chart_file(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line == "[chart]") {
      sections.push_back({lineno, {}});
      continue;
    }
    if (line.front() == '[')
      throw ChartError("chart file line " + std::to_string(lineno) + ": unknown section " + line);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ChartError("chart file line " + std::to_string(lineno) + ": expected key = value");
    if (sections.empty())
      throw ChartError("chart file line " + std::to_string(lineno) + ": key outside [chart] section");
    std::string key = trim(line.substr(0, eq));
    static const std::set<std::string> keys = {"name", "coords", "embedding", "domain"};
    if (!keys.count(key))
      throw ChartError("chart file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    sections.back().kv[key] = {trim(line.substr(eq + 1)), lineno};
  }
  if (sections.empty()) throw ChartError("chart file contains no [chart] section");
  std::vector<Chart> out;
  for (const auto& s : sections) out.push_back(build_section(s));
  return out;
}

std::vector<Chart> load_chart_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ChartError("cannot open chart file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_chart_file(ss.str());
}

// ------------------------------------------------------------ matrices

Matrix transpose(const Matrix& a) {
  Matrix t(a.empty() ? 0 : a[0].size(), std::vector<Expr>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b, const Assumptions& assume) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Matrix c(n, std::vector<Expr>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Expr> terms;
      for (std::size_t l = 0; l < k; ++l)
        if (!a[i][l].is_zero() && !b[l][j].is_zero()) terms.push_back(a[i][l] * b[l][j]);
      c[i][j] = sym::simplify(Expr::add(std::move(terms)), assume);
    }
  return c;
}

namespace {

Matrix minor_of(const Matrix& a, std::size_t row, std::size_t col) {
  Matrix m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == row) continue;
    std::vector<Expr> r;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != col) r.push_back(a[i][j]);
    m.push_back(std::move(r));
  }
  return m;
}

// Laplace expansion along the first row, skipping zero entries.
Expr det_raw(const Matrix& a) {
  if (a.size() == 1) return a[0][0];
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[0][j].is_zero()) continue;
    Expr t = a[0][j] * det_raw(minor_of(a, 0, j));
    terms.push_back(j % 2 ? -t : t);
  }
  return Expr::add(std::move(terms));
}

}  // namespace

Expr determinant(const Matrix& a, const Assumptions& assume) {
  return sym::simplify(det_raw(a), assume);
}

Matrix inverse(const Matrix& a, const Assumptions& assume) {
  Expr det = determinant(a, assume);
  if (det.is_zero()) throw ChartError("matrix is symbolically singular");
  std::size_t n = a.size();
  Matrix inv(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Expr cof = n == 1 ? Expr(1) : det_raw(minor_of(a, j, i));
      if ((i + j) % 2) cof = -cof;
      inv[i][j] = sym::simplify(cof / det, assume);
    }
  return inv;
}

std::vector<std::vector<double>> evaluate(const Matrix& a, const sym::Binding& b) {
  std::vector<std::vector<double>> out;
  for (const auto& row : a) {
    std::vector<double> r;
    for (const auto& e : row) r.push_back(sym::eval_expr(e, b));
    out.push_back(std::move(r));
  }
  return out;
}

// ------------------------------------------------------------ metric

Matrix jacobian(const Chart& chart) {
  Assumptions as = chart.assumptions();
  Matrix j(chart.dim(), std::vector<Expr>(chart.dim()));
  for (std::size_t a = 0; a < chart.dim(); ++a)
    for (std::size_t i = 0; i < chart.dim(); ++i)
      j[a][i] = sym::diff(chart.embedding[a], chart.coords[i], as);
  return j;
}

MetricData metric_from_matrix(const Matrix& g_lo, std::vector<std::string> coords,
                              const Assumptions& assume) {
  MetricData m;
  std::size_t n = g_lo.size();
  m.coords = std::move(coords);
  m.assume = assume;
  m.g_lo = g_lo;
  for (auto& row : m.g_lo)
    for (auto& e : row) e = sym::simplify(e, assume);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m.g_lo[i][j] != m.g_lo[j][i] && !sym::equivalent(m.g_lo[i][j], m.g_lo[j][i]))
        throw ChartError("metric is not symmetric");
  m.det_g = determinant(m.g_lo, assume);
  if (m.det_g.is_zero()) throw ChartError("metric is symbolically singular (det g = 0)");
  m.g_hi = inverse(m.g_lo, assume);
  // sqrt(|g|): the sign of det g is read off at one interior point.
  Expr abs_det = m.det_g;
  sym::Binding probe;
  for (const auto& c : m.coords) probe[c] = 0.7;
  try {
    if (sym::eval_expr(m.det_g, probe) < 0) abs_det = sym::simplify(-m.det_g, assume);
  } catch (const sym::EvalError&) {
  }
  m.sqrt_abs_g = sym::simplify(sym::sqrt(abs_det), assume);

  bool diagonal = true;
  for (std::size_t i = 0; i < n && diagonal; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !m.g_lo[i][j].is_zero()) diagonal = false;
  if (diagonal) {
    std::vector<Expr> h;
    for (std::size_t i = 0; i < n; ++i) h.push_back(sym::simplify(sym::sqrt(m.g_lo[i][i]), assume));
    m.lame = std::move(h);
  }
  return m;
}

MetricData metric_from_chart(const Chart& chart) {
  Assumptions as = chart.assumptions();
  Matrix j = jacobian(chart);
  MetricData m = metric_from_matrix(multiply(transpose(j), j, as), chart.coords, as);

  // Lazy nonsingularity check of the Jacobian over the sampled domain.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sym::CompiledExpr det(m.det_g, chart.coords);
  std::vector<double> pt(chart.dim());
  for (int k = 0; k < 100; ++k) {
    for (std::size_t i = 0; i < pt.size(); ++i) {
      Interval d = chart.interval(chart.coords[i]);
      pt[i] = d.lo + (d.hi - d.lo) * u(rng);
    }
    if (std::abs(det(pt)) < 1e-14)
      throw ChartError("chart '" + chart.name + "': Jacobian singular inside the domain");
  }
  return m;
}

std::vector<Expr> lame_coefficients(const MetricData& m) {
  if (!m.lame) throw ChartError("Lame coefficients defined only for orthogonal systems");
  return *m.lame;
}

ComponentVector convert_basis(const ComponentVector& v, const MetricData& m, Basis target) {
  if (v.basis == target) throw std::invalid_argument("convert_basis: vector already in target basis");
  const auto& h = lame_coefficients(m);
  if (v.components.size() != h.size()) throw std::invalid_argument("convert_basis: dimension mismatch");
  // Contravariant components scale with h_i going to the orthonormal basis,
  // covariant ones with 1/h_i.
  bool multiply_by_h = (v.variance == Variance::Contravariant) == (target == Basis::Nonholonomic);
  ComponentVector out{{}, v.variance, target};
  for (std::size_t i = 0; i < h.size(); ++i)
    out.components.push_back(
        sym::simplify(multiply_by_h ? v.components[i] * h[i] : v.components[i] / h[i], m.assume));
  return out;
}

namespace {

ComponentVector contract(const Matrix& g, const ComponentVector& v, const MetricData& m, Variance to) {
  if (v.basis != Basis::Holonomic) throw std::invalid_argument("index raising needs holonomic components");
  if (v.components.size() != g.size()) throw std::invalid_argument("index raising: dimension mismatch");
  ComponentVector out{{}, to, Basis::Holonomic};
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!g[i][j].is_zero()) terms.push_back(g[i][j] * v.components[j]);
    out.components.push_back(sym::simplify(Expr::add(std::move(terms)), m.assume));
  }
  return out;
}

}  // namespace

ComponentVector raise_index(const ComponentVector& v, const MetricData& m) {
  if (v.variance != Variance::Covariant) throw std::invalid_argument("raise_index: vector is not covariant");
  return contract(m.g_hi, v, m, Variance::Contravariant);
}

ComponentVector lower_index(const ComponentVector& v, const MetricData& m) {
  if (v.variance != Variance::Contravariant)
    throw std::invalid_argument("lower_index: vector is not contravariant");
  return contract(m.g_lo, v, m, Variance::Covariant);
}

}  // namespace curvmax
