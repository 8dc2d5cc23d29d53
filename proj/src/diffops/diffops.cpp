#include "curvmax/diffops.hpp"

#include <algorithm>

namespace curvmax {

using sym::simplify;

namespace {

void require(const ComponentVector& v, Variance var, Basis basis, std::size_t n, const char* op) {
  if (v.components.size() != n) throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  if (v.basis != basis)
    throw std::invalid_argument(std::string(op) + ": expected " +
                                (basis == Basis::Holonomic ? "holonomic" : "nonholonomic") +
                                " components");
  if (basis == Basis::Holonomic && v.variance != var)
    throw std::invalid_argument(std::string(op) + ": expected " +
                                (var == Variance::Covariant ? "covariant" : "contravariant") +
                                " components");
}

}  // namespace

ComponentVector grad(const Expr& phi, const MetricData& m) {
  ComponentVector g{{}, Variance::Covariant, Basis::Holonomic};
  for (const auto& u : m.coords) g.components.push_back(sym::diff(phi, u, m.assume));
  return g;
}

Expr div(const ComponentVector& v, const MetricData& m) {
  require(v, Variance::Contravariant, Basis::Holonomic, m.dim(), "div");
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < m.dim(); ++i)
    terms.push_back(sym::diff(m.sqrt_abs_g * v.components[i], m.coords[i], m.assume));
  return simplify(Expr::add(std::move(terms)) / m.sqrt_abs_g, m.assume);
}

ComponentVector curl(const ComponentVector& w, const MetricData& m) {
  if (m.dim() != 3) throw std::invalid_argument("rotor defined only in three dimensions");
  require(w, Variance::Covariant, Basis::Holonomic, 3, "curl");
  ComponentVector out{{}, Variance::Contravariant, Basis::Holonomic};
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    Expr d = sym::diff(w.components[k], m.coords[j], m.assume) -
             sym::diff(w.components[j], m.coords[k], m.assume);
    out.components.push_back(simplify(d / m.sqrt_abs_g, m.assume));
  }
  return out;
}

Expr laplacian(const Expr& phi, const MetricData& m) {
  ComponentVector g = grad(phi, m);
  return div(raise_index(g, m), m);
}

ComponentVector grad_nh(const Expr& phi, const MetricData& m) {
  return convert_basis(grad(phi, m), m, Basis::Nonholonomic);
}

Expr div_nh(const ComponentVector& v, const MetricData& m) {
  require(v, Variance::Contravariant, Basis::Nonholonomic, m.dim(), "div_nh");
  ComponentVector up{v.components, Variance::Contravariant, Basis::Nonholonomic};
  return div(convert_basis(up, m, Basis::Holonomic), m);
}

ComponentVector curl_nh(const ComponentVector& w, const MetricData& m) {
  require(w, Variance::Covariant, Basis::Nonholonomic, m.dim(), "curl_nh");
  // Orthonormal components are indifferent to variance; take them as
  // covariant, curl holonomically, and return orthonormal components.
  ComponentVector lo{w.components, Variance::Covariant, Basis::Nonholonomic};
  return convert_basis(curl(convert_basis(lo, m, Basis::Holonomic), m), m, Basis::Nonholonomic);
}

int AlternatingTensor::parity(const std::vector<int>& idx) {
  std::vector<int> p = idx;
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

Expr AlternatingTensor::lower(const std::vector<int>& idx) const {
  int s = parity(idx);
  return s == 0 ? Expr(0) : simplify(Expr(s) * lower_);
}

Expr AlternatingTensor::upper(const std::vector<int>& idx) const {
  int s = parity(idx);
  return s == 0 ? Expr(0) : simplify(Expr(s) * upper_);
}

AlternatingTensor alternating(const MetricData& m) {
  int n = static_cast<int>(m.dim());
  if (n == 3) return {3, m.sqrt_abs_g, simplify(Expr(1) / m.sqrt_abs_g, m.assume)};
  if (n == 4) {
    sym::Binding probe;
    for (const auto& c : m.coords) probe[c] = 0.7;
    double det = sym::eval_expr(m.det_g, probe);
    if (!(det < 0)) throw std::invalid_argument("alternating tensor in 4-D needs det g < 0");
    return {4, m.sqrt_abs_g, simplify(Expr(-1) / m.sqrt_abs_g, m.assume)};
  }
  throw std::invalid_argument("alternating tensor: dimension must be 3 or 4");
}

// ------------------------------------------------------------ tables

Expr scalar_field(const std::vector<std::string>& coords, const std::string& name) {
  return Expr::field(name, coords);
}

std::vector<Expr> component_fields(const std::vector<std::string>& coords, const std::string& stem) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < coords.size(); ++i)
    out.push_back(Expr::field(stem + std::to_string(i + 1), coords));
  return out;
}

OperatorTable operator_table(const Chart& chart, Basis basis) {
  MetricData m = metric_from_chart(chart);
  OperatorTable t;
  t.chart = chart.name;
  t.basis = basis;
  t.coords = chart.coords;
  Expr f = scalar_field(chart.coords);
  std::vector<Expr> fi = component_fields(chart.coords);
  if (basis == Basis::Holonomic) {
    t.grad = grad(f, m);
    t.div = div({fi, Variance::Contravariant, Basis::Holonomic}, m);
    if (chart.dim() == 3) t.curl = curl({fi, Variance::Covariant, Basis::Holonomic}, m);
  } else {
    t.grad = grad_nh(f, m);
    t.div = div_nh({fi, Variance::Contravariant, Basis::Nonholonomic}, m);
    if (chart.dim() == 3) t.curl = curl_nh({fi, Variance::Covariant, Basis::Nonholonomic}, m);
  }
  t.laplacian = laplacian(f, m);
  return t;
}

std::string render_operators(const OperatorTable& t, OutputFormat fmt) {
  bool nh = t.basis == Basis::Nonholonomic;
  std::string out;
  if (fmt == OutputFormat::Latex) {
    sym::LatexNames names;
    auto lbl = [&](const std::string& u) {
      std::string s = sym::to_latex(sym::var(u), names);
      return nh ? s + "'" : s;
    };
    out += "% " + t.chart + (nh ? ", nonholonomic basis\n" : ", holonomic basis\n");
    out += "\\begin{gather*}\n";
    for (std::size_t i = 0; i < t.coords.size(); ++i)
      out += "  (\\operatorname{grad} f)_{" + lbl(t.coords[i]) + "} = " +
             sym::to_latex(t.grad.components[i], names) + ", \\\\\n";
    out += "  \\operatorname{div} \\vec{f} = " + sym::to_latex(t.div, names) + ",";
    for (std::size_t i = 0; i < t.curl.components.size(); ++i)
      out += " \\\\\n  (\\operatorname{rot} \\vec{f})^{" + lbl(t.coords[i]) + "} = " +
             sym::to_latex(t.curl.components[i], names) + (i + 1 < t.curl.components.size() ? "," : ".");
    out += "\n\\end{gather*}\n";
    return out;
  }
  std::string prime = nh ? "'" : "";
  out += "# " + t.chart + (nh ? " nonholonomic basis\n" : " holonomic basis\n");
  for (std::size_t i = 0; i < t.coords.size(); ++i)
    out += "(grad f)_" + t.coords[i] + prime + " = " + sym::print_expr(t.grad.components[i]) + "\n";
  out += "div f = " + sym::print_expr(t.div) + "\n";
  for (std::size_t i = 0; i < t.curl.components.size(); ++i)
    out += "(rot f)^" + t.coords[i] + prime + " = " + sym::print_expr(t.curl.components[i]) + "\n";
  return out;
}

}  // namespace curvmax
