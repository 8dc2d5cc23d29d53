#ifndef CURVMAX_MAXWELL4_HPP
#define CURVMAX_MAXWELL4_HPP

// Spacetime form: field tensors F and G as 4x4 antisymmetric matrices,
// index raising, Hodge duals, the ordered-pair correspondence, derivative
// residuals by finite differences, and the field spinor.
//
// Signature (+,-,-,-), x^0 = ct. Matrices are templated on the scalar so the
// same code serves exact symbolic checks (Expr) and numbers (double).

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "curvmax/diffops.hpp"
#include "curvmax/report.hpp"

namespace curvmax {

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;
template <class T>
using Vec3 = std::array<T, 3>;

enum class Index { Lower, Upper };
enum class TensorKind { F, G, DualF, DualG };

template <class T>
struct FieldTensor4 {
  Mat4<T> m{};
  Index variance = Index::Lower;
  TensorKind kind = TensorKind::F;
};

/// g_ab with its inverse, det and sqrt(-det).
template <class T>
struct Metric4 {
  Mat4<T> g{};
  Mat4<T> g_inv{};
  T det{};
  T sqrt_neg_g{};
};

namespace detail {
inline double tidy(double x) { return x; }
inline Expr tidy(const Expr& e) { return sym::simplify(e); }
inline double root(double x) { return std::sqrt(x); }
inline Expr root(const Expr& e) { return sym::simplify(sym::sqrt(e)); }
double probe(const Expr& e);
inline double probe(double x) { return x; }
int levi4(int a, int b, int c, int d);

template <class T>
T det3(const Mat4<T>& m, int skip_r, int skip_c) {
  int r[3], c[3];
  for (int i = 0, k = 0; i < 4; ++i)
    if (i != skip_r) r[k++] = i;
  for (int i = 0, k = 0; i < 4; ++i)
    if (i != skip_c) c[k++] = i;
  auto at = [&](int i, int j) { return m[r[i]][c[j]]; };
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}
}  // namespace detail

/// Builds a metric from g_ab; throws std::invalid_argument when singular.
/// sqrt(-g) is left 0 unless det < 0 at the probe point.
template <class T>
Metric4<T> make_metric4(const Mat4<T>& g) {
  Metric4<T> out;
  out.g = g;
  T det(0);
  for (int j = 0; j < 4; ++j) {
    T cof = detail::det3(g, 0, j);
    det = det + ((j % 2) ? T(-1) * g[0][j] * cof : g[0][j] * cof);
  }
  out.det = detail::tidy(det);
  double d = detail::probe(out.det);
  if (d == 0.0 || !std::isfinite(d)) throw std::invalid_argument("singular spacetime metric");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      T cof = detail::det3(g, j, i);
      if ((i + j) % 2) cof = T(-1) * cof;
      out.g_inv[i][j] = detail::tidy(cof / out.det);
    }
  out.sqrt_neg_g = d < 0 ? detail::root(detail::tidy(T(-1) * out.det)) : T(0);
  return out;
}

Metric4<double> minkowski();
Metric4<Expr> minkowski_sym();
/// diag-block metric [[1, 0], [0, -gamma]] from a static spatial chart;
/// sqrt(-g) equals the spatial sqrt g.
Metric4<Expr> lift_spatial(const MetricData& m);
Metric4<double> evaluate(const Metric4<Expr>& g, const sym::Binding& b);
bool is_constant_metric(const Metric4<Expr>& g);

/// T_{0i} = a_i, T_{ij} = -eps_{ijk} b^k.
template <class T>
Mat4<T> from_pair(const Vec3<T>& a, const Vec3<T>& b) {
  Mat4<T> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = T(0);
  for (int i = 0; i < 3; ++i) {
    m[0][i + 1] = a[i];
    m[i + 1][0] = detail::tidy(T(-1) * a[i]);
  }
  m[1][2] = detail::tidy(T(-1) * b[2]);
  m[2][1] = b[2];
  m[1][3] = b[1];
  m[3][1] = detail::tidy(T(-1) * b[1]);
  m[2][3] = detail::tidy(T(-1) * b[0]);
  m[3][2] = b[0];
  return m;
}

/// Inverse of from_pair: a_i = T_{0i}, b^k = -1/2 eps_{ijk} T_{ij}.
template <class T>
std::pair<Vec3<T>, Vec3<T>> read_pair(const Mat4<T>& m) {
  Vec3<T> a{m[0][1], m[0][2], m[0][3]};
  Vec3<T> b{detail::tidy(T(-1) * m[2][3]), m[1][3], detail::tidy(T(-1) * m[1][2])};
  return {a, b};
}

/// F_ab from (E_i, B^i).
template <class T>
FieldTensor4<T> assemble_F_lower(const Vec3<T>& E, const Vec3<T>& B) {
  return {from_pair(E, B), Index::Lower, TensorKind::F};
}

/// G_ab from (D_i, H^i).
template <class T>
FieldTensor4<T> assemble_G_lower(const Vec3<T>& D, const Vec3<T>& H) {
  return {from_pair(D, H), Index::Lower, TensorKind::G};
}

namespace detail {
template <class T>
Mat4<T> congruence(const Mat4<T>& a, const Mat4<T>& t) {
  Mat4<T> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      T s(0);
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) s = s + a[i][k] * a[j][l] * t[k][l];
      out[i][j] = tidy(s);
    }
  return out;
}
}  // namespace detail

/// T^{ab} = g^{ac} g^{bd} T_{cd}.
template <class T>
FieldTensor4<T> raise4(const FieldTensor4<T>& t, const Metric4<T>& g) {
  if (t.variance != Index::Lower) throw std::invalid_argument("raise4 expects both indices lower");
  return {detail::congruence(g.g_inv, t.m), Index::Upper, t.kind};
}

template <class T>
FieldTensor4<T> lower4(const FieldTensor4<T>& t, const Metric4<T>& g) {
  if (t.variance != Index::Upper) throw std::invalid_argument("lower4 expects both indices upper");
  return {detail::congruence(g.g, t.m), Index::Lower, t.kind};
}

/// Upper alternating tensor e^{0123} = 1/sqrt(-g), lower e_{0123} = -sqrt(-g)
/// (the two are related by the metric). Lower input gives the upper dual
/// *T^{ab} = 1/2 e^{abcd} T_{cd}; upper input gives *T_{ab} = 1/2 e_{abcd} T^{cd}.
template <class T>
FieldTensor4<T> hodge_dual(const FieldTensor4<T>& t, const Metric4<T>& g) {
  if (!(detail::probe(g.det) < 0)) throw std::invalid_argument("Hodge dual needs det g < 0");
  T scale = t.variance == Index::Lower ? detail::tidy(T(1) / g.sqrt_neg_g) : detail::tidy(T(-1) * g.sqrt_neg_g);
  Mat4<T> out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      T s(0);
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          int p = detail::levi4(a, b, c, d);
          if (p) s = s + T(p) * t.m[c][d];
        }
      out[a][b] = detail::tidy(T(1) / T(2) * scale * s);
    }
  TensorKind k = t.kind == TensorKind::F      ? TensorKind::DualF
                 : t.kind == TensorKind::G    ? TensorKind::DualG
                 : t.kind == TensorKind::DualF ? TensorKind::F
                                               : TensorKind::G;
  return {out, t.variance == Index::Lower ? Index::Upper : Index::Lower, k};
}

template <class T>
bool is_antisymmetric(const Mat4<T>& m) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!(detail::tidy(m[i][j] + m[j][i]) == T(0))) return false;
  return true;
}

/// The eight ordered-pair correspondences for random (E_i, B^i, D_i, H^i),
/// read off assembled, raised and dualized matrices. The metric must be
/// static: g_00 = 1, g_0i = 0. Lowered B and H carry the density weight
/// 1/det(gamma).
CheckReport check_pair_table(const Metric4<double>& g, std::uint64_t seed = 20120101, int samples = 20,
                             double tol = 1e-12, const std::string& label = "");

// ------------------------------------------------------------ derivatives

using Point4 = std::array<double, 4>;
using TensorField4 = std::function<Mat4<double>(const Point4&)>;
using Current4 = std::function<std::array<double, 4>(const Point4&)>;

/// d_a *F^{ab} by central differences for F_ab given as a function of the
/// point; constant metric only.
std::array<double, 4> bianchi_residual(const TensorField4& F_lower, const Metric4<double>& g, const Point4& x,
                                       double h = 1e-4);
/// d_a G^{ab} - (4 pi/c) j^b with G^{ab} given as a function of the point.
std::array<double, 4> source_residual_4(const TensorField4& G_upper, const Current4& j, const Metric4<double>& g,
                                        const Point4& x, double c = 1.0, double h = 1e-4);

// ------------------------------------------------------------ spinors

using Complex = std::complex<double>;
using Spinor2 = std::array<std::array<Complex, 2>, 2>;

struct EMSpinor {
  Spinor2 phi{};
  std::optional<Spinor2> gamma;
};

/// The spin metric eps_AB = [[0, 1], [-1, 0]] (same matrix for eps^AB).
const Spinor2& spin_metric();
/// Infeld-van der Waerden symbols g_a^{AA'} in the real spin basis and
/// their inverse g^a_{AA'}.
const std::array<Spinor2, 4>& soldering_upper();
const std::array<Spinor2, 4>& soldering_lower();

/// phi_00 = (F1 - i F2)/2, phi_01 = phi_10 = -F3/2, phi_11 = -(F1 + i F2)/2
/// with F_i = E_i - i B^i.
EMSpinor phi_from_EB(const Vec3<double>& E, const Vec3<double>& B);
/// phi_AB = 1/2 F_ab eps^{A'B'} g^a_{AA'} g^b_{BB'} by direct contraction.
Spinor2 phi_from_F(const Mat4<double>& F_lower);
/// F_ab = g_a^{AA'} g_b^{BB'} (phi_AB eps_A'B' + eps_AB conj(phi_A'B')).
FieldTensor4<double> reconstruct_F_from_spinor(const EMSpinor& s);

using SpinorField = std::function<EMSpinor(const Point4&)>;
/// R^{BB'} = d^{AB'} phi^B_A - (2 pi/c) j^{BB'}, flattened as [B*2 + B'].
/// Flat Cartesian spacetime only; any other metric throws UnsupportedError.
std::array<Complex, 4> spinor_maxwell_residual(const SpinorField& phi, const Current4& j, const Point4& x,
                                               double c = 1.0, double h = 1e-4,
                                               const Metric4<double>& g = minkowski());
/// R^a = g^a_{BB'} R^{BB'}.
std::array<Complex, 4> spinor_to_vector(const std::array<Complex, 4>& r);
/// j^{BB'} = g_a^{BB'} j^a, flattened as [B*2 + B'].
std::array<Complex, 4> vector_to_spinor(const std::array<double, 4>& j);

// ------------------------------------------------------------ printing

std::string render_tensor4(const FieldTensor4<Expr>& t, const std::string& name, OutputFormat fmt);
std::string render_spinor(const Spinor2& s, const std::string& name, OutputFormat fmt);

}  // namespace curvmax

#endif  // CURVMAX_MAXWELL4_HPP
