#include "curvmax/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "curvmax/maxwell3.hpp"
#include "curvmax/maxwell4.hpp"
#include "curvmax/rs_momentum.hpp"
#include "curvmax/solver.hpp"

namespace curvmax::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Bad flags, bad input files, unsupported requests: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OutputFormat parse_format(const std::string& s) {
  if (s == "latex") return OutputFormat::Latex;
  if (s == "csv") return OutputFormat::Csv;
  return OutputFormat::Text;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string latex_document(const std::string& body) {
  return "\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage{mathtools}\n\\begin{document}\n" + body +
         "\\end{document}\n";
}

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct ChartChoice {
  std::string name = "cartesian";
  std::string file;
};

Chart select_chart(const ChartChoice& c) {
  try {
    if (c.file.empty()) return builtin_chart(c.name);
    auto charts = load_chart_file(c.file);
    if (charts.empty()) throw UsageError("chart file '" + c.file + "' defines no charts");
    if (c.name.empty() || c.name == "cartesian") {
      for (const auto& ch : charts)
        if (ch.name == c.name) return ch;
      return charts.front();
    }
    for (const auto& ch : charts)
      if (ch.name == c.name) return ch;
    throw UsageError("chart '" + c.name + "' not found in '" + c.file + "'");
  } catch (const ChartError& e) {
    throw UsageError(e.what());
  }
}

bool constant_metric(const MetricData& m) {
  for (const auto& row : m.g_lo)
    for (const auto& e : row)
      if (!sym::free_symbols(e).empty()) return false;
  return true;
}

// ------------------------------------------------------------- derive

std::string derive_operators(const Chart& chart, Basis basis, OutputFormat fmt) {
  auto t = operator_table(chart, basis);
  if (fmt != OutputFormat::Csv) return render_operators(t, fmt);
  std::string prime = basis == Basis::Nonholonomic ? "'" : "";
  std::string out = "id,lhs,rhs\n";
  for (std::size_t i = 0; i < t.coords.size(); ++i)
    out += "grad" + std::to_string(i + 1) + "," + csv_quote("(grad f)_" + t.coords[i] + prime) + "," +
           csv_quote(sym::print_expr(t.grad.components[i])) + "\n";
  out += "div,div f," + csv_quote(sym::print_expr(t.div)) + "\n";
  for (std::size_t i = 0; i < t.curl.components.size(); ++i)
    out += "rot" + std::to_string(i + 1) + "," + csv_quote("(rot f)^" + t.coords[i] + prime) + "," +
           csv_quote(sym::print_expr(t.curl.components[i])) + "\n";
  out += "laplacian,lap f," + csv_quote(sym::print_expr(t.laplacian)) + "\n";
  return out;
}

MaxwellResiduals3 maxwell_for(const Chart& chart) {
  auto m = metric_from_chart(chart);
  return assemble_residuals(abstract_fields(m.coords), abstract_sources(m.coords), m);
}

std::string derive_3vector(const Chart& chart, OutputFormat fmt) {
  auto r = maxwell_for(chart);
  if (fmt != OutputFormat::Csv) return render_maxwell3(r, chart.name, fmt);
  std::string out = "id,lhs,rhs\n";
  for (const auto& e : r.equations)
    out += e.id + "," + csv_quote(sym::print_expr(e.lhs)) + "," + csv_quote(sym::print_expr(e.rhs)) + "\n";
  return out;
}

std::string derive_complex(const Chart& chart, OutputFormat fmt) {
  auto r = maxwell_for(chart);
  struct Row {
    std::string id, lhs;
    Expr value;
  };
  std::vector<Row> rows{{"scalar_re", "Re[div(K + L) - 4 pi rho]", r.gauss_D},
                        {"scalar_im", "Im[div(K + L) - 4 pi rho]", r.gauss_B}};
  for (int i = 0; i < 3; ++i) {
    std::string c = std::to_string(i + 1);
    rows.push_back({"vector" + c + "_re", "Re[-i(-i d0(K + L) + curl(K - L) - i (4 pi/c) j)]^" + c, r.ampere[i]});
    rows.push_back({"vector" + c + "_im", "Im[-i(-i d0(K + L) + curl(K - L) - i (4 pi/c) j)]^" + c,
                    sym::simplify(-r.faraday[i])});
  }
  if (fmt == OutputFormat::Csv) {
    std::string out = "id,lhs,rhs\n";
    for (const auto& row : rows) out += row.id + "," + csv_quote(row.lhs) + "," + csv_quote(sym::print_expr(row.value)) + "\n";
    return out;
  }
  if (fmt == OutputFormat::Latex) {
    std::string out = "% complex form, " + chart.name + " chart\n\\begin{gather*}\n";
    out += "  F = E + iB,\\quad G = D + iH,\\quad K = \\tfrac12(G + F),\\quad L = \\tfrac12\\overline{(G - F)}, \\\\\n";
    out += "  \\operatorname{div}(K + L) - 4\\pi\\rho = " + sym::to_latex(r.gauss_D) + " + i\\left(" +
           sym::to_latex(r.gauss_B) + "\\right)";
    for (int i = 0; i < 3; ++i)
      out += ", \\\\\n  \\left[-i\\left(-i\\partial_0(K + L) + \\operatorname{rot}(K - L) - i\\tfrac{4\\pi}{c}j\\right)\\right]^{" +
             std::to_string(i + 1) + "} = " + sym::to_latex(r.ampere[i]) + " - i\\left(" +
             sym::to_latex(r.faraday[i]) + "\\right)";
    return out + ".\n\\end{gather*}\n";
  }
  std::string out = "# complex form, " + chart.name + " chart\n";
  out += "F = E + iB, G = D + iH, K = (G + F)/2, L = conj(G - F)/2; components contravariant\n";
  for (const auto& row : rows) out += row.id + ": " + row.lhs + " = " + sym::print_expr(row.value) + "\n";
  return out;
}

void require_constant(const Chart& chart, const std::string& form) {
  if (!constant_metric(metric_from_chart(chart)))
    throw UnsupportedError("unsupported: the " + form + " form needs a constant metric; chart '" + chart.name +
                           "' has a position-dependent metric");
}

std::string derive_4tensor(const Chart& chart, OutputFormat fmt) {
  require_constant(chart, "4tensor");
  auto g = lift_spatial(metric_from_chart(chart));
  auto v = [](const std::string& s) {
    return Vec3<Expr>{sym::var(s + "1"), sym::var(s + "2"), sym::var(s + "3")};
  };
  auto F = assemble_F_lower(v("E"), v("B"));
  auto G = assemble_G_lower(v("D"), v("H"));
  std::vector<std::pair<std::string, FieldTensor4<Expr>>> ts{
      {"F", F}, {"G", G}, {"F", raise4(F, g)}, {"G", raise4(G, g)}, {"F", hodge_dual(F, g)}, {"G", hodge_dual(G, g)}};
  if (fmt == OutputFormat::Csv) {
    std::string out = "tensor,row,col,value\n";
    for (const auto& [name, t] : ts) {
      std::string id = std::string(t.kind == TensorKind::DualF || t.kind == TensorKind::DualG ? "*" : "") + name +
                       (t.variance == Index::Lower ? "_ab" : "^ab");
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          out += id + "," + std::to_string(i) + "," + std::to_string(j) + "," + csv_quote(sym::print_expr(t.m[i][j])) + "\n";
    }
    return out;
  }
  std::string out;
  if (fmt == OutputFormat::Latex) out += "% spacetime form, signature (+,-,-,-), x^0 = ct\n\\[\n";
  else out += "# spacetime form, signature (+,-,-,-), x^0 = ct\n";
  for (const auto& [name, t] : ts) out += render_tensor4(t, name, fmt) + (fmt == OutputFormat::Latex ? "\\]\n\\[\n" : "");
  if (fmt == OutputFormat::Latex)
    out += "\\partial_\\alpha {}^*F^{\\alpha\\beta} = 0,\\qquad \\partial_\\alpha G^{\\alpha\\beta} = \\frac{4\\pi}{c} j^\\beta\n\\]\n";
  else
    out += "d_a *F^ab = 0\nd_a G^ab = (4 pi/c) j^b\n";
  return out;
}

std::string derive_spinor(const Chart& chart, OutputFormat fmt) {
  require_constant(chart, "spinor");
  std::vector<std::array<std::string, 3>> rows{
      {"phi00", "phi_00", "(F1 - i F2)/2"},
      {"phi01", "phi_01 = phi_10", "-F3/2"},
      {"phi11", "phi_11", "-(F1 + i F2)/2"},
      {"field", "F_k", "E_k - i B^k"},
      {"maxwell", "d^{AB'} phi^B_A", "(2 pi/c) j^{BB'}"},
  };
  if (fmt == OutputFormat::Csv) {
    std::string out = "id,lhs,rhs\n";
    for (const auto& r : rows) out += r[0] + "," + csv_quote(r[1]) + "," + csv_quote(r[2]) + "\n";
    return out;
  }
  if (fmt == OutputFormat::Latex)
    return "% field spinor\n\\begin{gather*}\n"
           "  \\varphi_{00} = \\tfrac12(F_1 - iF_2),\\quad \\varphi_{01} = \\varphi_{10} = -\\tfrac12 F_3,\\quad "
           "\\varphi_{11} = -\\tfrac12(F_1 + iF_2), \\\\\n"
           "  F_k = E_k - iB^k, \\\\\n"
           "  \\partial^{AB'}\\varphi^{B}{}_{A} = \\frac{2\\pi}{c} j^{BB'}.\n\\end{gather*}\n";
  std::string out = "# field spinor, flat spacetime\n";
  for (const auto& r : rows) out += r[0] + ": " + r[1] + " = " + r[2] + "\n";
  return out;
}

// ------------------------------------------------------------- transform

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
};

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  int lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto b = item.find_first_not_of(" \t\r"), e = item.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw UsageError("input line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        double v = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
        row.push_back(v);
      } catch (const std::exception&) {
        throw UsageError("input line " + std::to_string(lineno) + ": not a number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw UsageError("input has no header line");
  return t;
}

std::string transform(const Table& t, const Chart& chart, const std::string& target) {
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < t.header.size(); ++i) col[t.header[i]] = i;
  std::array<std::array<std::size_t, 3>, 4> fcol{};
  const char* names[4] = {"E", "B", "D", "H"};
  for (int f = 0; f < 4; ++f)
    for (int i = 0; i < 3; ++i) {
      std::string n = names[f] + std::to_string(i + 1);
      if (!col.count(n)) throw UsageError("input header lacks column '" + n + "'");
      fcol[f][i] = col[n];
    }
  // Coordinates by chart name or u1..u3.
  std::optional<std::array<std::size_t, 3>> ucol;
  {
    std::array<std::size_t, 3> a{};
    bool have = true;
    for (int i = 0; i < 3; ++i) {
      if (col.count(chart.coords[i])) a[i] = col[chart.coords[i]];
      else if (col.count("u" + std::to_string(i + 1))) a[i] = col["u" + std::to_string(i + 1)];
      else have = false;
    }
    if (have) ucol = a;
  }
  MetricData m = metric_from_chart(chart);
  bool flat = constant_metric(m);
  if ((target == "spinor") && !flat)
    throw UnsupportedError("unsupported: spinor transform needs a constant metric; chart '" + chart.name +
                           "' has a position-dependent metric");
  std::vector<sym::CompiledExpr> glo, ghi, lame;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      glo.emplace_back(m.g_lo[i][j], chart.coords);
      ghi.emplace_back(m.g_hi[i][j], chart.coords);
    }
  if (target == "nonholonomic") {
    if (!m.orthogonal()) throw UnsupportedError("unsupported: nonholonomic transform needs an orthogonal chart");
    for (const auto& h : *m.lame) lame.emplace_back(h, chart.coords);
  }
  sym::CompiledExpr sqrtg(m.sqrt_abs_g, chart.coords);

  std::ostringstream out;
  std::string coords;
  if (ucol)
    for (int i = 0; i < 3; ++i) coords += chart.coords[i] + ",";
  if (target == "pairs4") {
    out << coords;
    for (const char* T : {"F", "G"})
      for (const char* ij : {"01", "02", "03", "12", "13", "23"}) out << T << ij << (std::string(T) + ij == "G23" ? "\n" : ",");
  } else if (target == "complex") {
    out << coords;
    std::string sep;
    for (const char* T : {"F", "G", "K", "L"})
      for (int i = 1; i <= 3; ++i) {
        out << sep << T << i << "_re," << T << i << "_im";
        sep = ",";
      }
    out << "\n";
  } else if (target == "spinor") {
    out << coords << "phi00_re,phi00_im,phi01_re,phi01_im,phi11_re,phi11_im,"
        << "psi00_re,psi00_im,psi01_re,psi01_im,psi11_re,psi11_im\n";
  } else if (target == "nonholonomic") {
    out << coords << "E1,E2,E3,B1,B2,B3,D1,D2,D3,H1,H2,H3\n";
  } else {
    throw UsageError("unknown transform target '" + target + "' (pairs4, complex, spinor, nonholonomic)");
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::array<double, 3> u{};
    if (ucol)
      for (int i = 0; i < 3; ++i) u[i] = row[(*ucol)[i]];
    else if (!flat || target == "nonholonomic")
      throw UsageError("input line " + std::to_string(t.lines[r]) + ": chart '" + chart.name +
                       "' needs coordinate columns " + chart.coords[0] + "," + chart.coords[1] + "," + chart.coords[2]);
    std::span<const double> us(u.data(), 3);
    std::array<Vec3<double>, 4> v{};
    for (int f = 0; f < 4; ++f)
      for (int i = 0; i < 3; ++i) v[f][i] = row[fcol[f][i]];
    const auto &E = v[0], &B = v[1], &D = v[2], &H = v[3];
    auto mat = [&](const std::vector<sym::CompiledExpr>& g, const Vec3<double>& x) {
      Vec3<double> y{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y[i] += g[i * 3 + j](us) * x[j];
      return y;
    };
    std::string line;
    auto add = [&](double x) { line += (line.empty() ? "" : ",") + num(x); };
    if (ucol)
      for (double x : u) add(x);
    std::string where = "input line " + std::to_string(t.lines[r]) + ": ";
    try {
      if (target == "pairs4") {
        double sg = sqrtg(us);
        Vec3<double> Bd{sg * B[0], sg * B[1], sg * B[2]};
        Vec3<double> Hu = mat(ghi, H);
        Vec3<double> Hd{sg * Hu[0], sg * Hu[1], sg * Hu[2]};
        auto F = from_pair(E, Bd);
        auto G = from_pair(mat(glo, D), Hd);
        for (const auto* T : {&F, &G})
          for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}) add((*T)[i][j]);
      } else if (target == "complex") {
        FieldValues3 fv{mat(ghi, E), B, D, mat(ghi, H)};
        auto rs = to_rs(fv);
        auto kl = kl_from_rs(rs);
        for (const auto* c : {&rs.F, &rs.G, &kl.K, &kl.L})
          for (const auto& z : *c) {
            add(z.real());
            add(z.imag());
          }
      } else if (target == "spinor") {
        auto p = phi_from_EB(E, B).phi, q = phi_from_EB(D, H).phi;
        for (const auto* s : {&p, &q})
          for (auto [a, b] : {std::pair{0, 0}, {0, 1}, {1, 1}}) {
            add((*s)[a][b].real());
            add((*s)[a][b].imag());
          }
      } else {
        std::array<double, 3> h{};
        for (int i = 0; i < 3; ++i) h[i] = lame[i](us);
        for (int i = 0; i < 3; ++i) add(E[i] / h[i]);
        for (int i = 0; i < 3; ++i) add(B[i] * h[i]);
        for (int i = 0; i < 3; ++i) add(D[i] * h[i]);
        for (int i = 0; i < 3; ++i) add(H[i] / h[i]);
      }
    } catch (const sym::EvalError& e) {
      throw UsageError(where + e.what());
    }
    out << line << "\n";
  }
  return out.str();
}

// ------------------------------------------------------------- simulate

struct SimOptions {
  ChartChoice chart;
  std::string grid = "16x16x16";
  std::vector<std::string> extents;
  std::string bc;
  double cfl = 0.5;
  double dt = 0.0;
  double eps = 1.0, mu = 1.0;
  std::uint64_t steps = 100;
  std::uint64_t dump_every = 0;
  std::string out = "curvmax_run";
  std::string init;  // plane_wave on flat charts, azimuthal:1 otherwise
  bool csv = false;
};

double parse_value(const std::string& s) {
  try {
    return sym::eval_expr(sym::parse_expr(s), {});
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
}

GridSpec build_spec(const SimOptions& o, const Chart& chart) {
  std::array<std::size_t, 3> cells{};
  {
    std::vector<std::string> parts;
    std::stringstream ss(o.grid);
    std::string item;
    while (std::getline(ss, item, 'x')) parts.push_back(item);
    if (parts.size() == 1) parts = {parts[0], parts[0], parts[0]};
    if (parts.size() != 3) throw UsageError("--grid expects N1xN2xN3, got '" + o.grid + "'");
    for (int a = 0; a < 3; ++a) {
      try {
        std::size_t used = 0;
        long v = std::stol(parts[a], &used);
        if (used != parts[a].size() || v < 2) throw std::invalid_argument(parts[a]);
        cells[a] = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw UsageError("--grid: bad cell count '" + parts[a] + "' (integers >= 2)");
      }
    }
  }
  std::array<double, 3> lo{}, hi{};
  std::array<bool, 3> set{};
  auto defaults = [&] {
    if (chart.name == "cylindrical") {
      lo = {0.5, 0.0, 0.0};
      hi = {1.5, 2 * kPi, 1.0};
    } else if (chart.name == "spherical") {
      lo = {0.5, 0.4, 0.0};
      hi = {1.5, kPi - 0.4, 2 * kPi};
    } else {
      lo = {0.0, 0.0, 0.0};
      hi = {1.0, 1.0, 1.0};
    }
  };
  defaults();
  for (const auto& e : o.extents) {
    auto c1 = e.find(':'), c2 = e.rfind(':');
    if (c1 == std::string::npos || c1 == c2) throw UsageError("--extent expects axis:min:max, got '" + e + "'");
    std::string axis = e.substr(0, c1);
    int a = -1;
    for (int i = 0; i < 3; ++i)
      if (axis == chart.coords[i] || axis == std::to_string(i + 1)) a = i;
    if (a < 0) throw UsageError("--extent: unknown axis '" + axis + "' for chart '" + chart.name + "'");
    lo[a] = parse_value(e.substr(c1 + 1, c2 - c1 - 1));
    hi[a] = parse_value(e.substr(c2 + 1));
    set[a] = true;
  }
  bool builtin = chart.name == "cartesian" || chart.name == "cylindrical" || chart.name == "spherical";
  if (!builtin)
    for (int a = 0; a < 3; ++a)
      if (!set[a]) throw UsageError("--extent required for axis '" + chart.coords[a] + "' of chart '" + chart.name + "'");
  GridSpec s = make_grid_spec(chart, lo, hi, cells, o.cfl);
  if (!o.bc.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(o.bc);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() == 1) parts = {parts[0], parts[0], parts[0]};
    if (parts.size() != 3) throw UsageError("--bc expects three of periodic|pec, comma separated");
    for (int a = 0; a < 3; ++a) {
      if (parts[a] == "periodic") s.bc[a] = Boundary::Periodic;
      else if (parts[a] == "pec") s.bc[a] = Boundary::PEC;
      else throw UsageError("--bc: unknown boundary '" + parts[a] + "'");
    }
  }
  s.dt = o.dt;
  s.epsilon = o.eps;
  s.mu = o.mu;
  return s;
}

int simulate(const SimOptions& o, std::uint64_t seed, std::ostream& out) {
  Chart chart = select_chart(o.chart);
  GridSpec spec = build_spec(o, chart);
  GridField f;
  try {
    if (std::filesystem::is_regular_file(o.init)) {
      f = init_grid(spec, "zero");
      std::ifstream in(o.init, std::ios::binary);
      read_snapshot(in, f);
    } else {
      std::string init = o.init;
      if (init.empty()) init = chart.name == "cartesian" ? "plane_wave" : "azimuthal:1";
      if (init == "random") init = "random:" + std::to_string(seed);
      f = init_grid(spec, init);
    }
  } catch (const SolverError& e) {
    throw UsageError(e.what());
  }
  std::filesystem::create_directories(o.out);
  std::ofstream diag(std::filesystem::path(o.out) / "diagnostics.csv");
  if (!diag) throw UsageError("cannot write to '" + o.out + "'");
  write_diagnostics_header(diag);
  auto dump = [&](const GridField& g) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%06llu", static_cast<unsigned long long>(g.step));
    std::ofstream bin(std::filesystem::path(o.out) / (std::string(name) + ".cvmx"), std::ios::binary);
    write_snapshot(bin, g);
    if (o.csv) {
      std::ofstream c(std::filesystem::path(o.out) / (std::string(name) + ".csv"));
      write_snapshot_csv(c, g);
    }
  };
  write_diagnostics_row(diag, f, diagnostics(f));
  if (o.dump_every) dump(f);
  try {
    run(f, o.steps, {}, [&](const GridField& g) {
      write_diagnostics_row(diag, g, diagnostics(g));
      if (o.dump_every && g.step % o.dump_every == 0) dump(g);
    });
  } catch (const InstabilityError& e) {
    diag.flush();
    throw;
  }
  if (!o.dump_every || f.step % o.dump_every != 0) dump(f);
  auto d = diagnostics(f);
  out << "chart " << chart.name << ", cells " << spec.cells[0] << "x" << spec.cells[1] << "x" << spec.cells[2]
      << ", dt " << num(f.spec.dt) << ", steps " << f.step << ", t " << num(f.time) << "\n";
  out << "energy " << num(d.energy) << "  div_D-4pi*rho " << d.div_D_minus_4pi_rho << "  div_B " << d.div_B
      << "  max|field| " << num(d.max_abs) << "\n";
  out << "output in " << o.out << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvmax: Maxwell's equations in curvilinear coordinates"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::optional<std::uint64_t> seed_flag;
  double tol = 0.0;
  ChartChoice chart;
  std::string form = "3vector", format = "text", basis = "holonomic";
  std::string suite = "all", golden;
  std::string input = "-", target, output = "-";
  SimOptions sim;

  auto chart_flags = [&](CLI::App* sub, ChartChoice& c) {
    sub->add_option("--chart", c.name, "built-in chart or a name from --chart-file");
    sub->add_option("--chart-file", c.file, "chart definition file")->check(CLI::ExistingFile);
  };
  auto seed_opt = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_flag, "random seed (default from CURVMAX_SEED, else 20120101)");
  };

  auto* derive = app.add_subcommand("derive", "print operator formulas and Maxwell equations");
  chart_flags(derive, chart);
  derive->add_option("--form", form)->check(CLI::IsMember({"operators", "3vector", "4tensor", "complex", "spinor"}));
  derive->add_option("--format", format)->check(CLI::IsMember({"text", "latex", "csv"}));
  derive->add_option("--basis", basis, "operators only")->check(CLI::IsMember({"holonomic", "nonholonomic"}));

  auto* check = app.add_subcommand("check", "verify derived equations against the golden corpus and properties");
  check->add_option("--suite", suite)->check(CLI::IsMember({"paper", "properties", "all"}));
  check->add_option("--golden", golden, "golden corpus file")->check(CLI::ExistingFile);
  bool print_golden = false;
  check->add_flag("--print-golden", print_golden, "print the built-in golden corpus and exit");
  check->add_option("--tol", tol, "relative tolerance for equation equivalence")->check(CLI::PositiveNumber);
  seed_opt(check);

  auto* simulate_cmd = app.add_subcommand("simulate", "run the staggered-grid solver");
  chart_flags(simulate_cmd, sim.chart);
  simulate_cmd->add_option("--grid", sim.grid, "cells N1xN2xN3");
  simulate_cmd->add_option("--extent", sim.extents, "axis:min:max, repeatable")->take_all();
  simulate_cmd->add_option("--bc", sim.bc, "per-axis periodic|pec, comma separated");
  simulate_cmd->add_option("--cfl", sim.cfl);
  simulate_cmd->add_option("--dt", sim.dt, "explicit time step, overrides --cfl");
  simulate_cmd->add_option("--epsilon", sim.eps);
  simulate_cmd->add_option("--mu", sim.mu);
  simulate_cmd->add_option("--steps", sim.steps);
  simulate_cmd->add_option("--dump-every", sim.dump_every, "snapshot interval in steps (0: final only)");
  simulate_cmd->add_option("--out", sim.out, "output directory");
  simulate_cmd->add_option("--init", sim.init, "initial condition name or CVMX snapshot file");
  simulate_cmd->add_flag("--csv", sim.csv, "also write CSV snapshots");
  seed_opt(simulate_cmd);

  auto* transform_cmd = app.add_subcommand("transform", "convert (E, B, D, H) rows to another representation");
  chart_flags(transform_cmd, chart);
  transform_cmd->add_option("--input,input", input, "CSV file, '-' for stdin");
  transform_cmd->add_option("--target", target)
      ->required()
      ->check(CLI::IsMember({"pairs4", "complex", "spinor", "nonholonomic"}));
  transform_cmd->add_option("--out", output, "output file, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    err << "error: " << (msg.empty() ? "bad command line" : msg) << "\n";
    return 2;
  }

  try {
    if (derive->parsed()) {
      Chart ch = select_chart(chart);
      OutputFormat fmt = parse_format(format);
      std::string body;
      if (form == "operators")
        body = derive_operators(ch, basis == "nonholonomic" ? Basis::Nonholonomic : Basis::Holonomic, fmt);
      else if (form == "3vector") body = derive_3vector(ch, fmt);
      else if (form == "complex") body = derive_complex(ch, fmt);
      else if (form == "4tensor") body = derive_4tensor(ch, fmt);
      else body = derive_spinor(ch, fmt);
      out << (fmt == OutputFormat::Latex ? latex_document(body) : body);
      return 0;
    }
    if (check->parsed()) {
      if (print_golden) {
        out << builtin_golden_text();
        return 0;
      }
      CheckOptions opt;
      opt.seed = resolve_seed(seed_flag);
      if (tol > 0) opt.rel_tol = tol;
      CheckReport rep;
      GoldenCorpus corpus;
      bool loaded = true;
      if (golden.empty()) {
        corpus = builtin_golden();
      } else {
        try {
          corpus = load_golden(golden);
        } catch (const GoldenError& e) {
          rep.lines.push_back({"golden corpus", false, std::nan(""), e.what()});
          loaded = false;
        }
      }
      if (loaded) {
        if (suite == "paper" || suite == "all") rep.append(paper_suite(corpus, opt));
        if (suite == "properties" || suite == "all") rep.append(property_suite(corpus, opt));
      }
      out << "suite " << suite << ", seed " << opt.seed << ", rel tol " << opt.rel_tol << "\n" << rep.render();
      return rep.all_pass() ? 0 : 1;
    }
    if (simulate_cmd->parsed()) return simulate(sim, resolve_seed(seed_flag), out);
    if (transform_cmd->parsed()) {
      Chart ch = select_chart(chart);
      Table t;
      if (input == "-") {
        t = read_csv(std::cin);
      } else {
        std::ifstream in(input);
        if (!in) throw UsageError("cannot open input '" + input + "'");
        t = read_csv(in);
      }
      std::string result = transform(t, ch, target);
      if (output == "-") {
        out << result;
      } else {
        std::ofstream o(output);
        if (!o) throw UsageError("cannot write '" + output + "'");
        o << result;
      }
      return 0;
    }
  } catch (const InstabilityError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace curvmax::cli
