#include "curvmax/golden.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace curvmax {

namespace {

const char* kBuiltin = R"(# Reference forms for the built-in charts.
# Maxwell sections: one line per equation, lhs = rhs, fields E, H, D, B,
# j (components 1..3) and rho as functions of t and the coordinates.

[maxwell cartesian]
faraday1: diff(E3,y) - diff(E2,z) = -(1/c)*diff(B1,t)
faraday2: diff(E1,z) - diff(E3,x) = -(1/c)*diff(B2,t)
faraday3: diff(E2,x) - diff(E1,y) = -(1/c)*diff(B3,t)
ampere1: diff(H3,y) - diff(H2,z) = (1/c)*diff(D1,t) + (4*pi/c)*j1
ampere2: diff(H1,z) - diff(H3,x) = (1/c)*diff(D2,t) + (4*pi/c)*j2
ampere3: diff(H2,x) - diff(H1,y) = (1/c)*diff(D3,t) + (4*pi/c)*j3
gauss_D: diff(D1,x) + diff(D2,y) + diff(D3,z) = 4*pi*rho
gauss_B: diff(B1,x) + diff(B2,y) + diff(B3,z) = 0

[maxwell cylindrical]
@ampere_dt_sign flipped
faraday1: (1/r)*(diff(E3,phi) - diff(E2,z)) = -(1/c)*diff(B1,t)
faraday2: (1/r)*(diff(E1,z) - diff(E3,r)) = -(1/c)*diff(B2,t)
faraday3: (1/r)*(diff(E2,r) - diff(E1,phi)) = -(1/c)*diff(B3,t)
ampere1: (1/r)*(diff(H3,phi) - diff(H2,z)) = -(1/c)*diff(D1,t) + (4*pi/c)*j1
ampere2: (1/r)*(diff(H1,z) - diff(H3,r)) = -(1/c)*diff(D2,t) + (4*pi/c)*j2
ampere3: (1/r)*(diff(H2,r) - diff(H1,phi)) = -(1/c)*diff(D3,t) + (4*pi/c)*j3
gauss_D: (1/r)*D1 + diff(D1,r) + diff(D2,phi) + diff(D3,z) = 4*pi*rho
gauss_B: (1/r)*B1 + diff(B1,r) + diff(B2,phi) + diff(B3,z) = 0

[maxwell spherical]
@ampere_dt_sign flipped
faraday1: (1/(r^2*sin(theta)))*(diff(E3,theta) - diff(E2,phi)) = -(1/c)*diff(B1,t)
faraday2: (1/(r^2*sin(theta)))*(diff(E1,phi) - diff(E3,r)) = -(1/c)*diff(B2,t)
faraday3: (1/(r^2*sin(theta)))*(diff(E2,r) - diff(E1,theta)) = -(1/c)*diff(B3,t)
ampere1: (1/(r^2*sin(theta)))*(diff(H3,theta) - diff(H2,phi)) = -(1/c)*diff(D1,t) + (4*pi/c)*j1
ampere2: (1/(r^2*sin(theta)))*(diff(H1,phi) - diff(H3,r)) = -(1/c)*diff(D2,t) + (4*pi/c)*j2
ampere3: (1/(r^2*sin(theta)))*(diff(H2,r) - diff(H1,theta)) = -(1/c)*diff(D3,t) + (4*pi/c)*j3
gauss_D: (2/r)*D1 + diff(D1,r) + (cos(theta)/sin(theta))*D2 + diff(D2,theta) + diff(D3,phi) = 4*pi*rho
gauss_B: (2/r)*B1 + diff(B1,r) + (cos(theta)/sin(theta))*B2 + diff(B2,theta) + diff(B3,phi) = 0

# Metric sections: g_ij, g^ij, sqrt g, Lame coefficients h_i, and the
# orthonormal components of holonomic f^i (up) and f_i (down).

[metric cylindrical]
g11: 1
g12: 0
g13: 0
g22: r^2
g23: 0
g33: 1
ginv11: 1
ginv22: 1/r^2
ginv33: 1
sqrt_g: r
h1: 1
h2: r
h3: 1
up1: f1
up2: r*f2
up3: f3
down1: f1
down2: (1/r)*f2
down3: f3

[metric spherical]
g11: 1
g12: 0
g13: 0
g22: r^2
g23: 0
g33: r^2*sin(theta)^2
ginv11: 1
ginv22: 1/r^2
ginv33: 1/(r^2*sin(theta)^2)
sqrt_g: r^2*sin(theta)
h1: 1
h2: r
h3: r*sin(theta)
up1: f1
up2: r*f2
up3: r*sin(theta)*f3
down1: f1
down2: (1/r)*f2
down3: (1/(r*sin(theta)))*f3

# Operator tables for a scalar f and components f1..f3 (in the stated basis).

[operators cylindrical holonomic]
grad1: diff(f,r)
grad2: diff(f,phi)
grad3: diff(f,z)
div: (1/r)*diff(r*f1,r) + diff(f2,phi) + diff(f3,z)
rot1: (1/r)*(diff(f3,phi) - diff(f2,z))
rot2: (1/r)*(diff(f1,z) - diff(f3,r))
rot3: (1/r)*(diff(f2,r) - diff(f1,phi))

[operators cylindrical nonholonomic]
grad1: diff(f,r)
grad2: (1/r)*diff(f,phi)
grad3: diff(f,z)
div: (1/r)*diff(r*f1,r) + (1/r)*diff(f2,phi) + diff(f3,z)
rot1: (1/r)*(diff(f3,phi) - r*diff(f2,z))
rot2: diff(f1,z) - diff(f3,r)
rot3: (1/r)*(diff(r*f2,r) - diff(f1,phi))

[operators spherical holonomic]
grad1: diff(f,r)
grad2: diff(f,theta)
grad3: diff(f,phi)
div: (1/r^2)*diff(r^2*f1,r) + (1/sin(theta))*diff(sin(theta)*f2,theta) + diff(f3,phi)
rot1: (1/(r^2*sin(theta)))*(diff(f3,theta) - diff(f2,phi))
rot2: (1/(r^2*sin(theta)))*(diff(f1,phi) - diff(f3,r))
rot3: (1/(r^2*sin(theta)))*(diff(f2,r) - diff(f1,theta))

[operators spherical nonholonomic]
grad1: diff(f,r)
grad2: (1/r)*diff(f,theta)
grad3: (1/(r*sin(theta)))*diff(f,phi)
div: (1/r^2)*diff(r^2*f1,r) + (1/(r*sin(theta)))*diff(sin(theta)*f2,theta) + (1/(r*sin(theta)))*diff(f3,phi)
rot1: (1/(r*sin(theta)))*(diff(sin(theta)*f3,theta) - diff(f2,phi))
rot2: (1/r)*((1/sin(theta))*diff(f1,phi) - diff(r*f3,r))
rot3: (1/r)*(diff(r*f2,r) - diff(f1,theta))
)";

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

sym::ParseContext context_for(const GoldenSection& s, const Chart& chart) {
  if (s.kind == "maxwell") return maxwell_context(chart.coords);
  sym::ParseContext ctx;
  ctx.fields["f"] = chart.coords;
  for (std::size_t i = 1; i <= chart.dim(); ++i) ctx.fields["f" + std::to_string(i)] = chart.coords;
  return ctx;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw GoldenError("golden corpus line " + std::to_string(line) + ": " + what);
}

}  // namespace

Expr GoldenEntry::residual() const { return sym::simplify(lhs - rhs); }

const GoldenSection* GoldenCorpus::find(const std::string& kind, const std::string& chart,
                                        const std::string& basis) const {
  for (const auto& s : sections)
    if (s.kind == kind && s.chart == chart && s.basis == basis) return &s;
  return nullptr;
}

GoldenCorpus parse_golden(const std::string& text) {
  GoldenCorpus corpus;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::optional<Chart> chart;
  sym::ParseContext ctx;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      std::istringstream hs(line.substr(1, line.size() - 2));
      GoldenSection s;
      s.line = lineno;
      hs >> s.kind >> s.chart >> s.basis;
      if (s.kind != "maxwell" && s.kind != "metric" && s.kind != "operators")
        fail(lineno, "unknown section kind '" + s.kind + "'");
      if (s.kind == "operators" && s.basis != "holonomic" && s.basis != "nonholonomic")
        fail(lineno, "operators section needs basis holonomic or nonholonomic");
      try {
        chart = builtin_chart(s.chart);
      } catch (const ChartError& e) {
        fail(lineno, e.what());
      }
      ctx = context_for(s, *chart);
      corpus.sections.push_back(std::move(s));
      continue;
    }
    if (corpus.sections.empty()) fail(lineno, "entry outside a section");
    GoldenSection& s = corpus.sections.back();
    if (line[0] == '@') {
      std::istringstream os(line.substr(1));
      std::string key, value;
      os >> key >> value;
      s.options[key] = value;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) fail(lineno, "expected 'id: expression'");
    GoldenEntry e;
    e.id = trim(line.substr(0, colon));
    e.text = trim(line.substr(colon + 1));
    e.line = lineno;
    auto eq = e.text.find('=');
    try {
      if (eq == std::string::npos) {
        e.lhs = sym::parse_expr(e.text, ctx);
        e.rhs = Expr(0);
      } else {
        if (e.text.find('=', eq + 1) != std::string::npos) fail(lineno, "more than one '='");
        e.lhs = sym::parse_expr(e.text.substr(0, eq), ctx);
        e.rhs = sym::parse_expr(e.text.substr(eq + 1), ctx);
      }
    } catch (const sym::ParseError& err) {
      fail(lineno, std::string("entry '") + e.id + "': " + err.what());
    }
    s.entries.push_back(std::move(e));
  }
  return corpus;
}

GoldenCorpus load_golden(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw GoldenError("cannot open golden corpus '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_golden(ss.str());
}

const std::string& builtin_golden_text() {
  static const std::string text = kBuiltin;
  return text;
}

const GoldenCorpus& builtin_golden() {
  static const GoldenCorpus corpus = parse_golden(builtin_golden_text());
  return corpus;
}

namespace {

const GoldenSection& need(const GoldenCorpus& c, const std::string& kind, const std::string& chart,
                          const std::string& basis = "") {
  const GoldenSection* s = c.find(kind, chart, basis);
  if (!s)
    throw GoldenError("golden corpus has no [" + kind + " " + chart + (basis.empty() ? "" : " " + basis) +
                      "] section");
  return *s;
}

const GoldenEntry* entry(const GoldenSection& s, const std::string& id) {
  for (const auto& e : s.entries)
    if (e.id == id) return &e;
  return nullptr;
}

sym::EquivalenceOptions sampling(const Chart& chart, const CheckOptions& opt) {
  sym::EquivalenceOptions o = chart.sampling();
  o.seed = opt.seed;
  o.rel_tol = opt.rel_tol;
  o.samples = opt.samples;
  return o;
}

CheckLine compare(const std::string& name, const Expr& ours, const Expr& golden,
                  const sym::EquivalenceOptions& o) {
  CheckLine l{name, false, 0.0, ""};
  try {
    auto r = sym::compare_numeric(ours, golden, o);
    l.pass = r.equal;
    l.error = r.max_rel_error;
  } catch (const sym::IllConditioned& e) {
    l.note = e.what();
  }
  return l;
}

void check_ids(const GoldenSection& s, const std::vector<std::string>& known, const std::string& prefix,
               CheckReport& rep) {
  for (const auto& e : s.entries)
    if (std::find(known.begin(), known.end(), e.id) == known.end())
      rep.lines.push_back({prefix + e.id, false, 0.0, "unknown entry id"});
}

}  // namespace

CheckReport golden_check(const std::string& chart_name, const GoldenCorpus& corpus, const CheckOptions& opt) {
  Chart chart = builtin_chart(chart_name);
  const GoldenSection& sec = need(corpus, "maxwell", chart_name);
  auto flag = sec.options.find("ampere_dt_sign");
  bool flipped = flag != sec.options.end() && flag->second == "flipped";

  MetricData m = metric_from_chart(chart);
  MaxwellResiduals3 res = assemble_residuals(abstract_fields(chart.coords), abstract_sources(chart.coords), m);
  auto ours = res.all();
  const auto& names = MaxwellResiduals3::names();
  auto o = sampling(chart, opt);
  CheckReport rep;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string label = chart_name + "/" + names[i];
    const GoldenEntry* e = entry(sec, names[i]);
    if (!e) {
      rep.lines.push_back({label, false, 0.0, "missing from golden corpus"});
      continue;
    }
    Expr golden = e->residual();
    std::string note;
    if (flipped && names[i].rfind("ampere", 0) == 0) {
      golden = sym::simplify(sym::map_jets(golden, [](const Expr& j) {
        const auto& n = j.node();
        bool dt = !n.deps.empty() && n.deps[0] == "t" && n.orders[0] > 0;
        return (n.name[0] == 'D' && dt) ? -j : j;
      }));
      note = "dD/dt sign flipped per corpus convention";
    }
    CheckLine l = compare(label, ours[i], golden, o);
    if (!note.empty()) l.note = l.note.empty() ? note : note + "; " + l.note;
    if (!l.pass) l.note += (l.note.empty() ? "" : "; ") + std::string("golden line ") + std::to_string(e->line);
    rep.lines.push_back(l);
  }
  check_ids(sec, {names.begin(), names.end()}, chart_name + "/", rep);
  return rep;
}

CheckReport check_metric_literals(const std::string& chart_name, const GoldenCorpus& corpus) {
  Chart chart = builtin_chart(chart_name);
  const GoldenSection& sec = need(corpus, "metric", chart_name);
  MetricData m = metric_from_chart(chart);
  auto as = chart.assumptions();
  std::vector<std::string> known;
  CheckReport rep;
  auto structural = [&](const std::string& id, const Expr& ours) {
    known.push_back(id);
    const GoldenEntry* e = entry(sec, id);
    if (!e) return;
    Expr g = sym::simplify(e->lhs, as);
    CheckLine l{chart_name + "/metric/" + id, g == ours, 0.0, ""};
    if (!l.pass) l.note = "derived " + sym::print_expr(ours) + " vs stored " + sym::print_expr(g);
    rep.lines.push_back(l);
  };
  std::size_t n = chart.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
      structural("g" + ij, m.g_lo[i][j]);
      structural("ginv" + ij, m.g_hi[i][j]);
    }
  structural("sqrt_g", m.sqrt_abs_g);
  if (m.lame)
    for (std::size_t i = 0; i < n; ++i) structural("h" + std::to_string(i + 1), (*m.lame)[i]);

  // Basis relations, numerically.
  auto f = component_fields(chart.coords);
  auto o = sampling(chart, {});
  for (auto var : {Variance::Contravariant, Variance::Covariant}) {
    if (!m.lame) break;
    auto conv = convert_basis({f, var, Basis::Holonomic}, m, Basis::Nonholonomic);
    std::string stem = var == Variance::Contravariant ? "up" : "down";
    for (std::size_t i = 0; i < n; ++i) {
      std::string id = stem + std::to_string(i + 1);
      known.push_back(id);
      if (const GoldenEntry* e = entry(sec, id))
        rep.lines.push_back(compare(chart_name + "/metric/" + id, conv.components[i], e->lhs, o));
    }
  }
  check_ids(sec, known, chart_name + "/metric/", rep);
  return rep;
}

CheckReport check_operator_tables(const std::string& chart_name, Basis basis, const GoldenCorpus& corpus,
                                  const CheckOptions& opt) {
  std::string bname = basis == Basis::Holonomic ? "holonomic" : "nonholonomic";
  Chart chart = builtin_chart(chart_name);
  const GoldenSection& sec = need(corpus, "operators", chart_name, bname);
  OperatorTable t = operator_table(chart, basis);
  auto o = sampling(chart, opt);
  std::vector<std::pair<std::string, Expr>> ours;
  for (std::size_t i = 0; i < chart.dim(); ++i) ours.emplace_back("grad" + std::to_string(i + 1), t.grad.components[i]);
  ours.emplace_back("div", t.div);
  for (std::size_t i = 0; i < t.curl.components.size(); ++i)
    ours.emplace_back("rot" + std::to_string(i + 1), t.curl.components[i]);
  CheckReport rep;
  std::vector<std::string> known;
  for (const auto& [id, e] : ours) {
    known.push_back(id);
    std::string label = chart_name + "/" + bname + "/" + id;
    const GoldenEntry* g = entry(sec, id);
    if (!g) {
      rep.lines.push_back({label, false, 0.0, "missing from golden corpus"});
      continue;
    }
    rep.lines.push_back(compare(label, e, g->residual(), o));
  }
  check_ids(sec, known, chart_name + "/" + bname + "/", rep);
  return rep;
}

}  // namespace curvmax
