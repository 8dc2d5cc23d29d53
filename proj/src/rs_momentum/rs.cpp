#include <cmath>
#include <stdexcept>

#include "curvmax/rs_momentum.hpp"

namespace curvmax {

RSField to_rs(const FieldValues3& f, Variance v, Basis b) {
  RSField rs;
  for (int i = 0; i < 3; ++i) {
    rs.F[i] = {f.E[i], f.B[i]};
    rs.G[i] = {f.D[i], f.H[i]};
  }
  rs.variance = v;
  rs.basis = b;
  return rs;
}

FieldValues3 from_rs(const RSField& rs) {
  FieldValues3 f;
  for (int i = 0; i < 3; ++i) {
    f.E[i] = rs.F[i].real();
    f.B[i] = rs.F[i].imag();
    f.D[i] = rs.G[i].real();
    f.H[i] = rs.G[i].imag();
  }
  return f;
}

KLPair kl_from_rs(const RSField& rs) {
  KLPair kl;
  for (int i = 0; i < 3; ++i) {
    kl.K[i] = 0.5 * (rs.G[i] + rs.F[i]);
    kl.L[i] = 0.5 * std::conj(rs.G[i] - rs.F[i]);
  }
  return kl;
}

RSField rs_from_kl(const KLPair& kl) {
  RSField rs;
  for (int i = 0; i < 3; ++i) {
    rs.G[i] = kl.K[i] + std::conj(kl.L[i]);
    rs.F[i] = kl.K[i] - std::conj(kl.L[i]);
  }
  return rs;
}

namespace {

// Metric quantities evaluated at points of the chart.
class PointMetric {
 public:
  explicit PointMetric(const MetricData& m) : m_(m) {
    if (m.dim() != 3) throw std::invalid_argument("complex form needs a three-dimensional chart");
  }
  sym::Binding bind(const RVec3& x) const {
    sym::Binding b;
    for (int i = 0; i < 3; ++i) b[m_.coords[i]] = x[i];
    return b;
  }
  double sqrt_g(const RVec3& x) const {
    double s = sym::eval_expr(m_.sqrt_abs_g, bind(x));
    if (!(s > 0) || !std::isfinite(s)) throw std::domain_error("singular metric at the evaluation point");
    return s;
  }
  CVec3 lower(const CVec3& v, const RVec3& x) const {
    auto b = bind(x);
    CVec3 out{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Expr& g = m_.g_lo[i][j];
        if (!g.is_zero()) out[i] += sym::eval_expr(g, b) * v[j];
      }
    return out;
  }

 private:
  const MetricData& m_;
};

RVec3 shift(const RVec3& x, int a, double d) {
  RVec3 y = x;
  y[a] += d;
  return y;
}

template <class F>
auto d4(F&& f, double h) {
  return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12 * h);
}

using VecAt = std::function<CVec3(const RVec3&)>;

// (1/sqrt g) d_i (sqrt g V^i)
Complex divergence(const VecAt& V, const PointMetric& pm, const RVec3& x, double h) {
  Complex s = 0;
  for (int i = 0; i < 3; ++i)
    s += d4([&](double d) { auto y = shift(x, i, d); return pm.sqrt_g(y) * V(y)[i]; }, h);
  return s / pm.sqrt_g(x);
}

// (1/sqrt g)(d_j W_k - d_k W_j) with W_k = g_kl W^l
CVec3 curl(const VecAt& W, const PointMetric& pm, const RVec3& x, double h) {
  auto lo = [&](const RVec3& y) { return pm.lower(W(y), y); };
  CVec3 out{};
  double sg = pm.sqrt_g(x);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    Complex a = d4([&](double d) { return lo(shift(x, j, d))[k]; }, h);
    Complex b = d4([&](double d) { return lo(shift(x, k, d))[j]; }, h);
    out[i] = (a - b) / sg;
  }
  return out;
}

CVec3 time_derivative(const std::function<CVec3(double)>& f, double h) {
  CVec3 a = f(-2 * h), b = f(-h), c = f(h), d = f(2 * h), out{};
  for (int i = 0; i < 3; ++i) out[i] = (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12 * h);
  return out;
}

// Shared assembly: scalar div(S) - q, vector -i[ curl(W) - i dtU/c - i (4 pi a/c) j ].
RSResidual assemble(const VecAt& S, const VecAt& W, const std::function<CVec3(double)>& U_of_dt,
                    double q, double a, const RVec3& j, const PointMetric& pm, const RVec3& x, double c,
                    double h) {
  const Complex i(0, 1);
  RSResidual r;
  r.scalar = divergence(S, pm, x, h) - q;
  CVec3 cw = curl(W, pm, x, h);
  CVec3 du = time_derivative(U_of_dt, h);
  for (int k = 0; k < 3; ++k) r.vector[k] = -i * (cw[k] - i * du[k] / c - i * (4 * M_PI * a / c) * j[k]);
  return r;
}

CVec3 add(const CVec3& a, const CVec3& b, double sb) {
  return {a[0] + sb * b[0], a[1] + sb * b[1], a[2] + sb * b[2]};
}

}  // namespace

RSResidual rs_residual(const KLFunc& kl, const SourceFunc& src, const MetricData& m, double t, const RVec3& x,
                       double c, double h) {
  PointMetric pm(m);
  auto sum = [&](const RVec3& y) { auto p = kl(t, y); return add(p.K, p.L, 1.0); };
  auto diff = [&](const RVec3& y) { auto p = kl(t, y); return add(p.K, p.L, -1.0); };
  // -i d_0 (K + L) moved inside the bracket as -i (1/c) d_t (K + L).
  auto sum_t = [&](double d) { auto p = kl(t + d, x); return add(p.K, p.L, 1.0); };
  SourceValues s = src(t, x);
  return assemble(sum, diff, sum_t, 4 * M_PI * s.rho, 1.0, s.j, pm, x, c, h);
}

RSResidual rs_vacuum_residual(const CFieldFunc& F, const SourceFunc& src, const MetricData& m, double t,
                              const RVec3& x, double c, double h) {
  PointMetric pm(m);
  auto at = [&](const RVec3& y) { return F(t, y); };
  SourceValues s = src(t, x);
  return assemble(at, at, [&](double d) { return F(t + d, x); }, 4 * M_PI * s.rho, 1.0, s.j, pm, x, c, h);
}

RSResidual isotropic_residual(const RFieldFunc& E, const RFieldFunc& B, const SourceFunc& src,
                              const MediumParams& medium, const MetricData& m, double t, const RVec3& x, double c,
                              double h) {
  if (!(medium.epsilon > 0) || !(medium.mu > 0))
    throw std::invalid_argument("medium needs epsilon > 0 and mu > 0");
  PointMetric pm(m);
  double se = std::sqrt(medium.epsilon), sm = std::sqrt(medium.mu);
  auto F = [&](double tt, const RVec3& y) {
    RVec3 e = E(tt, y), b = B(tt, y);
    return CVec3{Complex(se * e[0], b[0] / sm), Complex(se * e[1], b[1] / sm), Complex(se * e[2], b[2] / sm)};
  };
  auto at = [&](const RVec3& y) { return F(t, y); };
  // d_t F carries sqrt(eps mu)/c; fold sqrt(eps mu) into the time function.
  double n = se * sm;
  auto scaled_t = [&](double d) {
    CVec3 v = F(t + d, x);
    for (auto& z : v) z *= n;
    return v;
  };
  SourceValues s = src(t, x);
  return assemble(at, at, scaled_t, 4 * M_PI * s.rho / se, sm, s.j, pm, x, c, h);
}

}  // namespace curvmax
