#include "curvmax/maxwell4.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace curvmax {

namespace detail {

double probe(const Expr& e) {
  sym::Binding b;
  for (const auto& s : sym::free_symbols(e)) b[s] = 0.7;
  return sym::eval_expr(e, b);
}

int levi4(int a, int b, int c, int d) {
  return AlternatingTensor::parity({a, b, c, d});
}

}  // namespace detail

Metric4<double> minkowski() {
  Mat4<double> g{};
  g[0][0] = 1;
  for (int i = 1; i < 4; ++i) g[i][i] = -1;
  return make_metric4(g);
}

Metric4<Expr> minkowski_sym() {
  Mat4<Expr> g{};
  g[0][0] = 1;
  for (int i = 1; i < 4; ++i) g[i][i] = -1;
  return make_metric4(g);
}

Metric4<Expr> lift_spatial(const MetricData& m) {
  if (m.dim() != 3) throw std::invalid_argument("spacetime lift needs a three-dimensional chart");
  Metric4<Expr> out;
  out.g[0][0] = 1;
  out.g_inv[0][0] = 1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.g[i + 1][j + 1] = sym::simplify(-m.g_lo[i][j], m.assume);
      out.g_inv[i + 1][j + 1] = sym::simplify(-m.g_hi[i][j], m.assume);
    }
  out.det = sym::simplify(-m.det_g, m.assume);
  out.sqrt_neg_g = m.sqrt_abs_g;
  return out;
}

Metric4<double> evaluate(const Metric4<Expr>& g, const sym::Binding& b) {
  Mat4<double> n{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) n[i][j] = sym::eval_expr(g.g[i][j], b);
  return make_metric4(n);
}

bool is_constant_metric(const Metric4<Expr>& g) {
  for (const auto& row : g.g)
    for (const auto& e : row)
      if (!sym::free_symbols(e).empty()) return false;
  return true;
}

// ------------------------------------------------------------ pair table

namespace {

double pair_error(const Mat4<double>& m, const Vec3<double>& a, const Vec3<double>& b) {
  auto [ra, rb] = read_pair(m);
  double err = 0, scale = 1;
  for (int i = 0; i < 3; ++i) {
    err = std::max({err, std::abs(ra[i] - a[i]), std::abs(rb[i] - b[i])});
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  // Entries outside the pair pattern must vanish or mirror it.
  Mat4<double> back = from_pair(ra, rb);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) err = std::max(err, std::abs(back[i][j] - m[i][j]));
  return err / scale;
}

Vec3<double> scaled(const Vec3<double>& v, double s) { return {s * v[0], s * v[1], s * v[2]}; }

}  // namespace

CheckReport check_pair_table(const Metric4<double>& g, std::uint64_t seed, int samples, double tol,
                             const std::string& label) {
  if (g.g[0][0] != 1.0 || g.g[0][1] != 0.0 || g.g[0][2] != 0.0 || g.g[0][3] != 0.0)
    throw std::invalid_argument("pair table needs a static metric with g_00 = 1, g_0i = 0");
  std::array<std::array<double, 3>, 3> gam{}, gam_inv{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gam[i][j] = -g.g[i + 1][j + 1];
      gam_inv[i][j] = -g.g_inv[i + 1][j + 1];
    }
  double det_gam = -g.det, s = g.sqrt_neg_g;
  auto up = [&](const Vec3<double>& v) {
    Vec3<double> o{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) o[i] += gam_inv[i][j] * v[j];
    return o;
  };
  auto down_density = [&](const Vec3<double>& v) {
    Vec3<double> o{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) o[i] += gam[i][j] * v[j] / det_gam;
    return o;
  };
  auto neg = [](const Vec3<double>& v) { return scaled(v, -1.0); };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::array<double, 8> worst{};
  for (int n = 0; n < samples; ++n) {
    Vec3<double> E, B, D, H;
    for (auto* v : {&E, &B, &D, &H})
      for (double& x : *v) x = u(rng);
    auto Eu = up(E), Bd = down_density(B), Du = up(D), Hd = down_density(H);
    auto F = assemble_F_lower(E, B), G = assemble_G_lower(D, H);
    auto Fu = raise4(F, g), Gu = raise4(G, g);
    auto sF_lo = hodge_dual(Fu, g), sF_up = hodge_dual(F, g);
    auto sG_lo = hodge_dual(Gu, g), sG_up = hodge_dual(G, g);
    double e[8] = {
        pair_error(F.m, E, B),
        pair_error(Fu.m, neg(Eu), Bd),
        pair_error(G.m, D, H),
        pair_error(Gu.m, neg(Du), Hd),
        pair_error(sF_lo.m, scaled(Bd, s), scaled(Eu, -s)),
        pair_error(sF_up.m, scaled(B, -1 / s), scaled(E, -1 / s)),
        pair_error(sG_lo.m, scaled(Hd, s), scaled(Du, -s)),
        pair_error(sG_up.m, scaled(H, -1 / s), scaled(D, -1 / s)),
    };
    for (int k = 0; k < 8; ++k) worst[k] = std::max(worst[k], e[k]);
  }
  static const char* names[8] = {"F_lower ~ (E_i, B^i)",       "F_upper ~ (-E^i, B_i)",
                                 "G_lower ~ (D_i, H^i)",       "G_upper ~ (-D^i, H_i)",
                                 "*F_lower ~ s(B_i, -E^i)",    "*F_upper ~ (1/s)(-B^i, -E_i)",
                                 "*G_lower ~ s(H_i, -D^i)",    "*G_upper ~ (1/s)(-H^i, -D_i)"};
  CheckReport rep;
  std::string pre = label.empty() ? "" : label + "/";
  for (int k = 0; k < 8; ++k) rep.add(pre + names[k], worst[k], tol);
  return rep;
}

// ------------------------------------------------------------ derivatives

namespace {

Point4 shifted(const Point4& x, int a, double d) {
  Point4 y = x;
  y[a] += d;
  return y;
}

}  // namespace

std::array<double, 4> bianchi_residual(const TensorField4& F_lower, const Metric4<double>& g, const Point4& x,
                                       double h) {
  std::array<double, 4> r{};
  for (int a = 0; a < 4; ++a) {
    auto p = hodge_dual<double>({F_lower(shifted(x, a, h)), Index::Lower, TensorKind::F}, g);
    auto m = hodge_dual<double>({F_lower(shifted(x, a, -h)), Index::Lower, TensorKind::F}, g);
    for (int b = 0; b < 4; ++b) r[b] += (p.m[a][b] - m.m[a][b]) / (2 * h);
  }
  return r;
}

std::array<double, 4> source_residual_4(const TensorField4& G_upper, const Current4& j, const Metric4<double>&,
                                        const Point4& x, double c, double h) {
  std::array<double, 4> r{};
  for (int a = 0; a < 4; ++a) {
    auto p = G_upper(shifted(x, a, h)), m = G_upper(shifted(x, a, -h));
    for (int b = 0; b < 4; ++b) r[b] += (p[a][b] - m[a][b]) / (2 * h);
  }
  auto jx = j(x);
  for (int b = 0; b < 4; ++b) r[b] -= 4 * M_PI / c * jx[b];
  return r;
}

// ------------------------------------------------------------ spinors

const Spinor2& spin_metric() {
  static const Spinor2 e{{{0.0, 1.0}, {-1.0, 0.0}}};
  return e;
}

const std::array<Spinor2, 4>& soldering_upper() {
  static const std::array<Spinor2, 4> s = [] {
    const double k = 1 / std::sqrt(2.0);
    const Complex i(0, 1);
    std::array<Spinor2, 4> o{};
    o[0] = {{{k, 0}, {0, k}}};
    o[1] = {{{0, k}, {k, 0}}};
    o[2] = {{{0, k * i}, {-k * i, 0}}};
    o[3] = {{{k, 0}, {0, -k}}};
    return o;
  }();
  return s;
}

const std::array<Spinor2, 4>& soldering_lower() {
  static const std::array<Spinor2, 4> s = [] {
    auto o = soldering_upper();
    for (auto& m : o)
      for (auto& row : m)
        for (auto& z : row) z = std::conj(z);
    return o;
  }();
  return s;
}

EMSpinor phi_from_EB(const Vec3<double>& E, const Vec3<double>& B) {
  const Complex i(0, 1);
  Complex F[3];
  for (int k = 0; k < 3; ++k) F[k] = E[k] - i * B[k];
  EMSpinor s;
  s.phi[0][0] = 0.5 * (F[0] - i * F[1]);
  s.phi[0][1] = s.phi[1][0] = -0.5 * F[2];
  s.phi[1][1] = -0.5 * (F[0] + i * F[1]);
  return s;
}

Spinor2 phi_from_F(const Mat4<double>& F) {
  const auto& lo = soldering_lower();
  const auto& eps = spin_metric();
  Spinor2 phi{};
  for (int A = 0; A < 2; ++A)
    for (int B = 0; B < 2; ++B) {
      Complex s = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (F[a][b] == 0.0) continue;
          for (int X = 0; X < 2; ++X)
            for (int Y = 0; Y < 2; ++Y) s += F[a][b] * lo[a][A][X] * lo[b][B][Y] * eps[X][Y];
        }
      phi[A][B] = 0.5 * s;
    }
  return phi;
}

FieldTensor4<double> reconstruct_F_from_spinor(const EMSpinor& sp) {
  const auto& g = soldering_upper();
  const auto& eps = spin_metric();
  FieldTensor4<double> out{{}, Index::Lower, TensorKind::F};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Complex s = 0;
      for (int A = 0; A < 2; ++A)
        for (int X = 0; X < 2; ++X)
          for (int B = 0; B < 2; ++B)
            for (int Y = 0; Y < 2; ++Y)
              s += g[a][A][X] * g[b][B][Y] * (sp.phi[A][B] * eps[X][Y] + eps[A][B] * std::conj(sp.phi[X][Y]));
      out.m[a][b] = s.real();
    }
  return out;
}

std::array<Complex, 4> vector_to_spinor(const std::array<double, 4>& j) {
  const auto& g = soldering_upper();
  std::array<Complex, 4> out{};
  for (int B = 0; B < 2; ++B)
    for (int Y = 0; Y < 2; ++Y)
      for (int a = 0; a < 4; ++a) out[B * 2 + Y] += g[a][B][Y] * j[a];
  return out;
}

std::array<Complex, 4> spinor_to_vector(const std::array<Complex, 4>& r) {
  const auto& lo = soldering_lower();
  std::array<Complex, 4> out{};
  for (int a = 0; a < 4; ++a)
    for (int B = 0; B < 2; ++B)
      for (int Y = 0; Y < 2; ++Y) out[a] += lo[a][B][Y] * r[B * 2 + Y];
  return out;
}

std::array<Complex, 4> spinor_maxwell_residual(const SpinorField& phi, const Current4& j, const Point4& x, double c,
                                               double h, const Metric4<double>& g) {
  Metric4<double> eta = minkowski();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (std::abs(g.g[a][b] - eta.g[a][b]) > 1e-14)
        throw UnsupportedError("spinor form is supported only for flat Cartesian spacetime");
  const auto& sol = soldering_upper();
  const auto& eps = spin_metric();
  // d phi_{CA} / dx^a
  std::array<Spinor2, 4> dphi{};
  for (int a = 0; a < 4; ++a) {
    auto p = phi(shifted(x, a, h)).phi, m = phi(shifted(x, a, -h)).phi;
    for (int C = 0; C < 2; ++C)
      for (int A = 0; A < 2; ++A) dphi[a][C][A] = (p[C][A] - m[C][A]) / (2 * h);
  }
  std::array<Complex, 4> r{};
  for (int B = 0; B < 2; ++B)
    for (int Y = 0; Y < 2; ++Y) {
      Complex s = 0;
      for (int A = 0; A < 2; ++A)
        for (int a = 0; a < 4; ++a) {
          // d^{AY} = g^{ab} g_b^{AY} d_a; phi^B_A = eps^{BC} phi_{CA}.
          Complex up = eta.g_inv[a][a] * sol[a][A][Y];
          for (int C = 0; C < 2; ++C) s += up * eps[B][C] * dphi[a][C][A];
        }
      r[B * 2 + Y] = s;
    }
  auto js = vector_to_spinor(j(x));
  for (int k = 0; k < 4; ++k) r[k] -= 2 * M_PI / c * js[k];
  return r;
}

// ------------------------------------------------------------ printing

namespace {

std::string kind_symbol(const FieldTensor4<Expr>& t) {
  return (t.kind == TensorKind::DualF || t.kind == TensorKind::DualG) ? "*" : "";
}

}  // namespace

std::string render_tensor4(const FieldTensor4<Expr>& t, const std::string& name, OutputFormat fmt) {
  bool lo = t.variance == Index::Lower;
  std::ostringstream os;
  if (fmt == OutputFormat::Latex) {
    sym::LatexNames names;
    os << (kind_symbol(t).empty() ? "" : "\\prescript{*}{}") << "{" << name << "}" << (lo ? "_{\\alpha\\beta}" : "^{\\alpha\\beta}")
       << " = \\begin{pmatrix}\n";
    for (int i = 0; i < 4; ++i) {
      os << "  ";
      for (int j = 0; j < 4; ++j) os << sym::to_latex(t.m[i][j], names) << (j < 3 ? " & " : "");
      os << (i < 3 ? " \\\\\n" : "\n");
    }
    os << "\\end{pmatrix}\n";
    return os.str();
  }
  os << kind_symbol(t) << name << (lo ? "_ab" : "^ab") << " =\n";
  for (int i = 0; i < 4; ++i) {
    os << "  [";
    for (int j = 0; j < 4; ++j) os << sym::print_expr(t.m[i][j]) << (j < 3 ? ", " : "");
    os << "]\n";
  }
  return os.str();
}

std::string render_spinor(const Spinor2& s, const std::string& name, OutputFormat fmt) {
  auto z = [](Complex c) {
    std::ostringstream o;
    o.precision(12);
    o << c.real() << (c.imag() < 0 ? " - " : " + ") << std::abs(c.imag()) << "i";
    return o.str();
  };
  std::ostringstream os;
  if (fmt == OutputFormat::Latex) {
    os << name << "_{AB} = \\begin{pmatrix}\n  " << z(s[0][0]) << " & " << z(s[0][1]) << " \\\\\n  " << z(s[1][0])
       << " & " << z(s[1][1]) << "\n\\end{pmatrix}\n";
    return os.str();
  }
  for (int A = 0; A < 2; ++A)
    for (int B = 0; B < 2; ++B) os << name << "_" << A << B << " = " << z(s[A][B]) << "\n";
  return os.str();
}

}  // namespace curvmax
