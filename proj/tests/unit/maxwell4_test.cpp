#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "curvmax/maxwell3.hpp"
#include "curvmax/maxwell4.hpp"
#include "smooth_fields.hpp"

using namespace curvmax;
using fixtures::SmoothFields;

namespace {

Expr P(const std::string& s) { return sym::simplify(sym::parse_expr(s)); }

Mat4<Expr> mat(const std::array<const char*, 16>& cells) {
  Mat4<Expr> m{};
  for (int i = 0; i < 16; ++i) m[i / 4][i % 4] = P(cells[i]);
  return m;
}

void expect_mat_eq(const Mat4<Expr>& a, const Mat4<Expr>& b) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_EQ(a[i][j], b[i][j]) << "[" << i << "][" << j << "] " << sym::print_expr(a[i][j]) << " vs "
                                  << sym::print_expr(b[i][j]);
}

Vec3<Expr> v3(const std::string& stem) { return {P(stem + "1"), P(stem + "2"), P(stem + "3")}; }

double max_abs(const Mat4<double>& a, const Mat4<double>& b) {
  double e = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e = std::max(e, std::abs(a[i][j] - b[i][j]));
  return e;
}

Mat4<double> random_antisym(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Mat4<double> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      m[i][j] = u(rng);
      m[j][i] = -m[i][j];
    }
  return m;
}

Metric4<double> cylindrical_at(double r) {
  return evaluate(lift_spatial(metric_from_chart(builtin_chart("cylindrical"))), {{"r", r}, {"phi", 0.4}, {"z", 0.1}});
}

}  // namespace

// ------------------------------------------------------------ matrices

TEST(Tensor4, AssembledMatricesMatchPrintedForms) {
  auto g = minkowski_sym();
  auto F = assemble_F_lower(v3("E"), v3("B"));
  expect_mat_eq(F.m, mat({"0", "E1", "E2", "E3", "-E1", "0", "-B3", "B2", "-E2", "B3", "0", "-B1", "-E3", "-B2",
                          "B1", "0"}));
  // Cartesian: E^i = E_i, B_i = B^i.
  expect_mat_eq(raise4(F, g).m, mat({"0", "-E1", "-E2", "-E3", "E1", "0", "-B3", "B2", "E2", "B3", "0", "-B1", "E3",
                                     "-B2", "B1", "0"}));
  auto G = assemble_G_lower(v3("D"), v3("H"));
  expect_mat_eq(raise4(G, g).m, mat({"0", "-D1", "-D2", "-D3", "D1", "0", "-H3", "H2", "D2", "H3", "0", "-H1", "D3",
                                     "-H2", "H1", "0"}));
}

TEST(Tensor4, DualMatricesMatchPrintedForms) {
  auto g = minkowski_sym();
  auto F = assemble_F_lower(v3("E"), v3("B"));
  auto G = assemble_G_lower(v3("D"), v3("H"));
  expect_mat_eq(hodge_dual(raise4(F, g), g).m,
                mat({"0", "B1", "B2", "B3", "-B1", "0", "E3", "-E2", "-B2", "-E3", "0", "E1", "-B3", "E2", "-E1",
                     "0"}));
  expect_mat_eq(hodge_dual(F, g).m, mat({"0", "-B1", "-B2", "-B3", "B1", "0", "E3", "-E2", "B2", "-E3", "0", "E1",
                                         "B3", "E2", "-E1", "0"}));
  expect_mat_eq(hodge_dual(G, g).m, mat({"0", "-H1", "-H2", "-H3", "H1", "0", "D3", "-D2", "H2", "-D3", "0", "D1",
                                         "H3", "D2", "-D1", "0"}));
  expect_mat_eq(hodge_dual(raise4(G, g), g).m,
                mat({"0", "H1", "H2", "H3", "-H1", "0", "D3", "-D2", "-H2", "-D3", "0", "D1", "-H3", "D2", "-D1",
                     "0"}));
  EXPECT_EQ(hodge_dual(F, g).kind, TensorKind::DualF);
  EXPECT_EQ(hodge_dual(F, g).variance, Index::Upper);
}

TEST(Tensor4, CylindricalDualCarriesInverseRootPrefactor) {
  MetricData m = metric_from_chart(builtin_chart("cylindrical"));
  auto g = lift_spatial(m);
  EXPECT_EQ(g.sqrt_neg_g, P("r"));
  auto F = assemble_F_lower(v3("E"), v3("B"));
  auto [a, b] = read_pair(hodge_dual(F, g).m);
  auto E = v3("E"), B = v3("B");
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(sym::simplify(a[i] + B[i] / P("r"), m.assume), Expr(0)) << sym::print_expr(a[i]);
    EXPECT_EQ(sym::simplify(b[i] + E[i] / P("r"), m.assume), Expr(0)) << sym::print_expr(b[i]);
  }
}

TEST(Tensor4, ZeroAndSimpleInputs) {
  auto Z = assemble_F_lower<double>({0, 0, 0}, {0, 0, 0});
  EXPECT_EQ(max_abs(Z.m, Mat4<double>{}), 0.0);
  EXPECT_EQ(max_abs(hodge_dual(Z, minkowski()).m, Mat4<double>{}), 0.0);
  auto F = assemble_F_lower<double>({1, 0, 0}, {0, 0, 1});
  EXPECT_EQ(F.m[0][1], 1.0);
  EXPECT_EQ(F.m[1][0], -1.0);
  EXPECT_EQ(F.m[1][2], -1.0);
  EXPECT_EQ(F.m[2][1], 1.0);
  EXPECT_TRUE(is_antisymmetric(F.m));
}

TEST(Tensor4, RaiseLowerRoundTripAndEuclideanIdentity) {
  std::mt19937_64 rng(3);
  Mat4<double> id{};
  for (int i = 0; i < 4; ++i) id[i][i] = 1;
  auto euclid = make_metric4(id);
  for (int n = 0; n < 20; ++n) {
    FieldTensor4<double> T{random_antisym(rng), Index::Lower, TensorKind::F};
    EXPECT_EQ(max_abs(raise4(T, euclid).m, T.m), 0.0);
    auto g = cylindrical_at(0.3 + 0.1 * n);
    auto back = lower4(raise4(T, g), g);
    EXPECT_LT(max_abs(back.m, T.m), 1e-14);
    EXPECT_TRUE(is_antisymmetric(raise4(T, g).m));
  }
  EXPECT_THROW(hodge_dual(FieldTensor4<double>{}, euclid), std::invalid_argument);
  EXPECT_THROW(raise4(raise4(FieldTensor4<double>{}, euclid), euclid), std::invalid_argument);
  EXPECT_THROW(make_metric4(Mat4<double>{}), std::invalid_argument);
}

TEST(Tensor4, DoubleDualIsMinusIdentity) {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> ur(0.2, 2.0);
  double worst = 0;
  for (int n = 0; n < 50; ++n) {
    auto g = n % 2 ? minkowski() : cylindrical_at(ur(rng));
    FieldTensor4<double> T{random_antisym(rng), Index::Lower, TensorKind::F};
    auto dd = hodge_dual(hodge_dual(T, g), g);
    EXPECT_EQ(dd.variance, Index::Lower);
    EXPECT_EQ(dd.kind, TensorKind::F);
    Mat4<double> neg{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) neg[i][j] = -T.m[i][j];
    worst = std::max(worst, max_abs(dd.m, neg));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Tensor4, DualMatchesBruteForceContraction) {
  // Independent contraction: lower the upper alternating tensor with the metric.
  std::mt19937_64 rng(9);
  auto g = cylindrical_at(1.7);
  FieldTensor4<double> T{random_antisym(rng), Index::Upper, TensorKind::F};
  auto lo = hodge_dual(T, g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) {
              int e = AlternatingTensor::parity({p, q, c, d});
              if (!e) continue;
              // e_{abcd} = g_ap g_bq g_cr g_ds e^{pqrs}; diagonal metric.
              double up = e / g.sqrt_neg_g;
              s += 0.5 * g.g[a][p] * g.g[b][q] * g.g[c][c] * g.g[d][d] * up * T.m[c][d];
            }
      EXPECT_NEAR(lo.m[a][b], s, 1e-12);
    }
}

TEST(PairTable, MinkowskiEightOfEight) {
  auto rep = check_pair_table(minkowski());
  EXPECT_EQ(rep.lines.size(), 8u);
  EXPECT_TRUE(rep.all_pass()) << rep.render();
}

TEST(PairTable, CylindricalSpacetimeAtRandomRadii) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int n = 0; n < 10; ++n) {
    double r = n == 0 ? 1.7 : u(rng);
    auto g = cylindrical_at(r);
    ASSERT_NEAR(g.sqrt_neg_g, r, 1e-15);
    auto rep = check_pair_table(g, 100 + n);
    EXPECT_TRUE(rep.all_pass()) << "r=" << r << "\n" << rep.render();
  }
}

TEST(PairTable, SphericalSpacetime) {
  auto gs = lift_spatial(metric_from_chart(builtin_chart("spherical")));
  auto g = evaluate(gs, {{"r", 1.3}, {"theta", 0.8}, {"phi", 2.0}});
  EXPECT_TRUE(check_pair_table(g).all_pass());
}

TEST(PairTable, RejectsNonStaticMetric) {
  Mat4<double> m{};
  m[0][0] = 1;
  m[0][1] = m[1][0] = 0.2;
  for (int i = 1; i < 4; ++i) m[i][i] = -1;
  EXPECT_THROW(check_pair_table(make_metric4(m)), std::invalid_argument);
}

// ------------------------------------------------------------ derivatives

TEST(Bianchi, PotentialFieldIsClosed) {
  // A_1 = sin(x^3 - x^0): F_01 = -cos, F_31 = cos, F_13 = -cos.
  TensorField4 F = [](const Point4& x) {
    Mat4<double> m{};
    double c = std::cos(x[3] - x[0]);
    m[0][1] = -c;
    m[1][0] = c;
    m[3][1] = c;
    m[1][3] = -c;
    return m;
  };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 0; n < 20; ++n) {
    Point4 x{u(rng), u(rng), u(rng), u(rng)};
    for (double r : bianchi_residual(F, minkowski(), x)) EXPECT_LT(std::abs(r), 1e-7);
  }
}

TEST(Bianchi, ConstantAndNonClosedFields) {
  auto g = minkowski();
  Mat4<double> k = assemble_F_lower<double>({0.3, -1, 2}, {0.5, 0.1, -0.7}).m;
  for (double r : bianchi_residual([&](const Point4&) { return k; }, g, {0.1, 0.2, 0.3, 0.4})) EXPECT_EQ(r, 0.0);
  // F_01 = x^1 is closed (d of -(x^1)^2/2 dx^0); F_01 = x^2 is not.
  auto ansatz = [](int coord) {
    return [coord](const Point4& x) {
      Mat4<double> m{};
      m[0][1] = x[coord];
      m[1][0] = -x[coord];
      return m;
    };
  };
  auto r1 = bianchi_residual(ansatz(1), g, {0.2, 0.5, -0.3, 0.9});
  for (double r : r1) EXPECT_LT(std::abs(r), 1e-9);
  auto r2 = bianchi_residual(ansatz(2), g, {0.2, 0.5, -0.3, 0.9});
  EXPECT_NEAR(r2[3], 1.0, 1e-8);
  EXPECT_LT(std::abs(r2[0]) + std::abs(r2[1]) + std::abs(r2[2]), 1e-9);
}


TEST(Bianchi, MatchesThreeVectorResiduals) {
  SmoothFields s;
  auto g = minkowski();
  TensorField4 F = [&](const Point4& x) { return assemble_F_lower(s.eval3(s.E, x), s.eval3(s.B, x)).m; };
  TensorField4 G = [&](const Point4& x) {
    auto D = s.eval3(s.E, x), H = s.eval3(s.B, x);
    return from_pair<double>({-D[0], -D[1], -D[2]}, H);
  };
  Point4 x{0.3, -0.2, 0.5, 0.7};
  auto v = eval_residuals(s.res, SmoothFields::at(x));
  auto rb = bianchi_residual(F, g, x);
  auto rs = source_residual_4(G, [&](const Point4& p) { return s.j4(p); }, g, x);
  EXPECT_NEAR(rb[0], v[7], 1e-7);
  EXPECT_NEAR(rs[0], v[6], 1e-7);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(rb[i + 1], -v[i], 1e-7);
    EXPECT_NEAR(rs[i + 1], v[3 + i], 1e-7);
  }
}

TEST(Source4, VacuumPlaneWaveAndZeroFields) {
  auto g = minkowski();
  TensorField4 G = [](const Point4& x) {
    double w = std::cos(x[1] - x[0]);
    return from_pair<double>({0, -w, 0}, {0, 0, w});
  };
  Current4 none = [](const Point4&) { return std::array<double, 4>{}; };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 0; n < 20; ++n) {
    Point4 x{u(rng), u(rng), u(rng), u(rng)};
    for (double r : source_residual_4(G, none, g, x)) EXPECT_LT(std::abs(r), 1e-7);
  }
  for (double r : source_residual_4([](const Point4&) { return Mat4<double>{}; }, none, g, {1, 2, 3, 4}))
    EXPECT_EQ(r, 0.0);
}

TEST(Source4, CoulombFieldIsDivergenceFreeOffOrigin) {
  TensorField4 G = [](const Point4& x) {
    double r3 = std::pow(x[1] * x[1] + x[2] * x[2] + x[3] * x[3], 1.5);
    return from_pair<double>({-x[1] / r3, -x[2] / r3, -x[3] / r3}, {0, 0, 0});
  };
  Current4 none = [](const Point4&) { return std::array<double, 4>{}; };
  for (Point4 x : {Point4{0, 1, 0.5, -0.3}, Point4{2, -0.7, 0.8, 0.9}})
    EXPECT_LT(std::abs(source_residual_4(G, none, minkowski(), x)[0]), 1e-6);
}

// ------------------------------------------------------------ spinors

TEST(Spinor, ComponentFormulasForCanonicalFields) {
  const Complex i(0, 1);
  auto s = phi_from_EB({1, 0, 0}, {0, 0, 0});
  EXPECT_EQ(s.phi[0][0], Complex(0.5));
  EXPECT_EQ(s.phi[0][1], Complex(0));
  EXPECT_EQ(s.phi[1][1], Complex(-0.5));
  s = phi_from_EB({0, 0, 0}, {0, 0, 0});
  for (auto& row : s.phi)
    for (auto z : row) EXPECT_EQ(z, Complex(0));
  s = phi_from_EB({0, 0, 0}, {0, 0, 1});
  EXPECT_EQ(s.phi[0][1], 0.5 * i);
  EXPECT_EQ(s.phi[1][0], 0.5 * i);
  EXPECT_EQ(s.phi[0][0], Complex(0));
  EXPECT_EQ(s.phi[1][1], Complex(0));
  // E=(0,1,0): F_2 = 1, phi_00 = -i/2, phi_11 = -i/2.
  s = phi_from_EB({0, 1, 0}, {0, 0, 0});
  EXPECT_EQ(s.phi[0][0], -0.5 * i);
  EXPECT_EQ(s.phi[1][1], -0.5 * i);
}

TEST(Spinor, FormulasAgreeWithSolderingContraction) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 100; ++n) {
    Vec3<double> E{u(rng), u(rng), u(rng)}, B{u(rng), u(rng), u(rng)};
    auto a = phi_from_EB(E, B).phi;
    auto b = phi_from_F(assemble_F_lower(E, B).m);
    for (int A = 0; A < 2; ++A)
      for (int C = 0; C < 2; ++C) EXPECT_LT(std::abs(a[A][C] - b[A][C]), 1e-14);
    EXPECT_EQ(a[0][1], a[1][0]);
  }
}

TEST(Spinor, SolderingReproducesMinkowskiMetric) {
  const auto& s = soldering_upper();
  const auto& e = spin_metric();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Complex g = 0;
      for (int A = 0; A < 2; ++A)
        for (int X = 0; X < 2; ++X)
          for (int B = 0; B < 2; ++B)
            for (int Y = 0; Y < 2; ++Y) g += s[a][A][X] * s[b][B][Y] * e[A][B] * e[X][Y];
      EXPECT_NEAR(std::abs(g - minkowski().g[a][b]), 0.0, 1e-15);
    }
}

TEST(Spinor, ReconstructionRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    Vec3<double> E{u(rng), u(rng), u(rng)}, B{u(rng), u(rng), u(rng)};
    auto F = reconstruct_F_from_spinor(phi_from_EB(E, B));
    EXPECT_TRUE(is_antisymmetric(F.m) || max_abs(F.m, assemble_F_lower(E, B).m) < 1e-12);
    worst = std::max(worst, max_abs(F.m, assemble_F_lower(E, B).m));
  }
  EXPECT_LE(worst, 1e-12);
  auto F = reconstruct_F_from_spinor(phi_from_EB({1, 0, 0}, {0, 0, 0}));
  EXPECT_NEAR(F.m[0][1], 1.0, 1e-15);
  EXPECT_NEAR(std::abs(F.m[1][2]) + std::abs(F.m[1][3]) + std::abs(F.m[2][3]), 0.0, 1e-15);
  EXPECT_EQ(max_abs(reconstruct_F_from_spinor(EMSpinor{}).m, Mat4<double>{}), 0.0);
}

TEST(Spinor, VacuumPlaneWaveAndZeroField) {
  SpinorField phi = [](const Point4& x) {
    double w = std::cos(x[1] - x[0]);
    return phi_from_EB({0, w, 0}, {0, 0, w});
  };
  Current4 none = [](const Point4&) { return std::array<double, 4>{}; };
  for (Point4 x : {Point4{0.1, 0.2, 0.3, 0.4}, Point4{-1, 2, 0.5, 0}})
    for (auto r : spinor_maxwell_residual(phi, none, x)) EXPECT_LT(std::abs(r), 1e-7);
  for (auto r : spinor_maxwell_residual([](const Point4&) { return EMSpinor{}; }, none, {0, 0, 0, 0}))
    EXPECT_EQ(std::abs(r), 0.0);
}

TEST(Spinor, ResidualIsComplexCombinationOfThreeVectorResiduals) {
  SmoothFields s;
  SpinorField phi = [&](const Point4& x) { return phi_from_EB(s.eval3(s.E, x), s.eval3(s.B, x)); };
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const Complex i(0, 1);
  for (int n = 0; n < 10; ++n) {
    Point4 x{u(rng), u(rng), u(rng), u(rng)};
    auto v = eval_residuals(s.res, SmoothFields::at(x));
    auto R = spinor_to_vector(spinor_maxwell_residual(phi, [&](const Point4& p) { return s.j4(p); }, x));
    std::array<Complex, 4> want{0.5 * (v[6] - i * v[7]), 0.5 * (v[3] + i * v[0]), 0.5 * (v[4] + i * v[1]),
                                0.5 * (v[5] + i * v[2])};
    double scale = 0;
    for (double w : v) scale = std::max(scale, std::abs(w));
    for (int a = 0; a < 4; ++a) EXPECT_LE(std::abs(R[a] - want[a]), 1e-6 * scale) << "component " << a;
  }
}

TEST(Spinor, CurvedSpacetimeIsUnsupported) {
  SpinorField phi = [](const Point4&) { return EMSpinor{}; };
  Current4 none = [](const Point4&) { return std::array<double, 4>{}; };
  EXPECT_THROW(spinor_maxwell_residual(phi, none, {0, 1, 0, 0}, 1.0, 1e-4, cylindrical_at(1.5)), UnsupportedError);
}

TEST(Render4, TextAndLatex) {
  auto F = assemble_F_lower(v3("E"), v3("B"));
  std::string t = render_tensor4(F, "F", OutputFormat::Text);
  EXPECT_NE(t.find("F_ab ="), std::string::npos);
  EXPECT_NE(t.find("[0, E1, E2, E3]"), std::string::npos);
  std::string l = render_tensor4(hodge_dual(F, minkowski_sym()), "F", OutputFormat::Latex);
  EXPECT_NE(l.find("\\prescript{*}{}{F}^{\\alpha\\beta}"), std::string::npos);
  EXPECT_NE(l.find("\\begin{pmatrix}"), std::string::npos);
  std::string sp = render_spinor(phi_from_EB({1, 0, 0}, {0, 0, 0}).phi, "phi", OutputFormat::Text);
  EXPECT_NE(sp.find("phi_00 = 0.5 + 0i"), std::string::npos) << sp;
}
