#include "curvmax/maxwell3.hpp"

namespace curvmax {

using sym::simplify;

std::vector<Expr> MaxwellResiduals3::all() const {
  return {faraday[0], faraday[1], faraday[2], ampere[0], ampere[1], ampere[2], gauss_D, gauss_B};
}

const std::array<std::string, 8>& MaxwellResiduals3::names() {
  static const std::array<std::string, 8> n = {"faraday1", "faraday2", "faraday3", "ampere1",
                                               "ampere2",  "ampere3",  "gauss_D",  "gauss_B"};
  return n;
}

namespace {

std::vector<std::string> with_time(const std::vector<std::string>& coords) {
  std::vector<std::string> deps{"t"};
  deps.insert(deps.end(), coords.begin(), coords.end());
  return deps;
}

std::vector<Expr> named(const std::string& stem, const std::vector<std::string>& deps, std::size_t n) {
  std::vector<Expr> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(Expr::field(stem + std::to_string(i), deps));
  return out;
}

}  // namespace

FieldSet3 abstract_fields(const std::vector<std::string>& coords) {
  auto deps = with_time(coords);
  FieldSet3 f;
  f.E.components = named("E", deps, coords.size());
  f.H.components = named("H", deps, coords.size());
  f.D.components = named("D", deps, coords.size());
  f.B.components = named("B", deps, coords.size());
  return f;
}

Sources3 abstract_sources(const std::vector<std::string>& coords) {
  auto deps = with_time(coords);
  Sources3 s;
  s.rho = Expr::field("rho", deps);
  s.j.components = named("j", deps, coords.size());
  return s;
}

sym::ParseContext maxwell_context(const std::vector<std::string>& coords) {
  sym::ParseContext ctx;
  auto deps = with_time(coords);
  for (std::string stem : {"E", "H", "D", "B", "j"})
    for (std::size_t i = 1; i <= coords.size(); ++i) ctx.fields[stem + std::to_string(i)] = deps;
  ctx.fields["rho"] = deps;
  return ctx;
}

MaxwellResiduals3 assemble_residuals(const FieldSet3& f, const Sources3& src, const MetricData& m) {
  if (m.dim() != 3) throw std::invalid_argument("Maxwell 3-vector form needs a three-dimensional chart");
  const auto& as = m.assume;
  Expr four_pi = Expr(4) * sym::pi();
  Expr inv_c = Expr(1) / src.c;

  ComponentVector curl_e = curl(f.E, m);
  ComponentVector curl_h = curl(f.H, m);
  MaxwellResiduals3 r;
  for (int i = 0; i < 3; ++i) {
    std::string k = std::to_string(i + 1);
    Expr dB = sym::diff(f.B.components[i], "t", as);
    Expr dD = sym::diff(f.D.components[i], "t", as);
    Expr far_rhs = simplify(-(inv_c * dB), as);
    Expr amp_rhs = simplify(inv_c * dD + four_pi * inv_c * src.j.components[i], as);
    r.faraday[i] = simplify(curl_e.components[i] - far_rhs, as);
    r.ampere[i] = simplify(curl_h.components[i] - amp_rhs, as);
    r.equations.push_back({"faraday" + k, curl_e.components[i], far_rhs, r.faraday[i]});
  }
  for (int i = 0; i < 3; ++i) {
    std::string k = std::to_string(i + 1);
    Expr amp_rhs = simplify(curl_h.components[i] - r.ampere[i], as);
    r.equations.push_back({"ampere" + k, curl_h.components[i], amp_rhs, r.ampere[i]});
  }
  Expr div_d = div(f.D, m);
  Expr div_b = div(f.B, m);
  Expr q = simplify(four_pi * src.rho, as);
  r.gauss_D = simplify(div_d - q, as);
  r.gauss_B = div_b;
  r.equations.push_back({"gauss_D", div_d, q, r.gauss_D});
  r.equations.push_back({"gauss_B", div_b, Expr(0), r.gauss_B});
  return r;
}

std::array<double, 8> eval_residuals(const MaxwellResiduals3& r, const sym::Binding& b) {
  std::array<double, 8> out{};
  auto all = r.all();
  for (std::size_t i = 0; i < 8; ++i) out[i] = sym::eval_expr(all[i], b);
  return out;
}

MaxwellResiduals3 substitute(const MaxwellResiduals3& r, const std::map<std::string, Expr>& fields) {
  auto sub = [&](const Expr& e) { return simplify(sym::substitute_fields(e, fields)); };
  MaxwellResiduals3 out;
  for (int i = 0; i < 3; ++i) {
    out.faraday[i] = sub(r.faraday[i]);
    out.ampere[i] = sub(r.ampere[i]);
  }
  out.gauss_D = sub(r.gauss_D);
  out.gauss_B = sub(r.gauss_B);
  for (const auto& e : r.equations) out.equations.push_back({e.id, sub(e.lhs), sub(e.rhs), sub(e.residual)});
  return out;
}

std::string render_maxwell3(const MaxwellResiduals3& r, const std::string& chart, OutputFormat fmt) {
  std::string out;
  if (fmt == OutputFormat::Latex) {
    sym::LatexNames names;
    out += "% Maxwell equations, " + chart + " chart\n\\begin{gather*}\n";
    for (std::size_t i = 0; i < r.equations.size(); ++i) {
      const auto& e = r.equations[i];
      out += "  " + sym::to_latex(e.lhs, names) + " = " + sym::to_latex(e.rhs, names) +
             (i + 1 < r.equations.size() ? ", \\\\\n" : ".\n");
    }
    out += "\\end{gather*}\n";
    return out;
  }
  out += "# Maxwell equations, " + chart + " chart\n";
  for (const auto& e : r.equations)
    out += e.id + ": " + sym::print_expr(e.lhs) + " = " + sym::print_expr(e.rhs) + "\n";
  return out;
}

}  // namespace curvmax
