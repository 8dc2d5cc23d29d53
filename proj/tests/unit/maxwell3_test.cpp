#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "curvmax/golden.hpp"
#include "curvmax/maxwell3.hpp"

using namespace curvmax;

namespace {

MetricData M(const std::string& chart) { return metric_from_chart(builtin_chart(chart)); }

ComponentVector cov(std::vector<Expr> c) { return {std::move(c), Variance::Covariant, Basis::Holonomic}; }
ComponentVector con(std::vector<Expr> c) { return {std::move(c), Variance::Contravariant, Basis::Holonomic}; }

Expr P(const std::string& s) { return sym::simplify(sym::parse_expr(s)); }

// Plane wave along x: E_y = a cos(kx - wt), B_z = b cos(kx - wt), w = c k.
FieldSet3 plane_wave(const std::string& a, const std::string& b) {
  Expr ph = P("cos(k*x - c*k*t)");
  FieldSet3 f;
  f.E = cov({0, P(a) * ph, 0});
  f.H = cov({0, 0, P(b) * ph});
  f.D = con({0, P(a) * ph, 0});
  f.B = con({0, 0, P(b) * ph});
  return f;
}

Sources3 vacuum() {
  Sources3 s;
  s.rho = 0;
  s.j = con({0, 0, 0});
  return s;
}

sym::EquivalenceOptions cart_opts() {
  auto o = builtin_chart("cartesian").sampling();
  o.domains["k"] = {0.5, 3.0};
  o.domains["c"] = {0.5, 2.0};
  o.domains["t"] = {0.0, 2.0};
  return o;
}

}  // namespace

TEST(Maxwell3, ZeroFieldsGiveZeroResiduals) {
  FieldSet3 f;
  f.E = cov({0, 0, 0});
  f.H = cov({0, 0, 0});
  f.D = con({0, 0, 0});
  f.B = con({0, 0, 0});
  for (const char* chart : {"cartesian", "cylindrical", "spherical"}) {
    auto r = assemble_residuals(f, vacuum(), M(chart));
    for (const auto& e : r.all()) EXPECT_TRUE(e.is_zero()) << chart << ": " << sym::print_expr(e);
    auto v = eval_residuals(r, {{"t", 0.3}, {"c", 1.0}});
    for (double x : v) EXPECT_EQ(x, 0.0);
  }
}

TEST(Maxwell3, PlaneWaveSolvesVacuumEquations) {
  auto r = assemble_residuals(plane_wave("1", "1"), vacuum(), M("cartesian"));
  for (const auto& e : r.all()) EXPECT_TRUE(sym::equivalent(e, Expr(0), cart_opts())) << sym::print_expr(e);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int n = 0; n < 50; ++n) {
    sym::Binding b{{"x", u(rng)}, {"y", u(rng)}, {"z", u(rng)}, {"t", u(rng)}, {"c", 1.0}, {"k", 2.0}};
    for (double v : eval_residuals(r, b)) worst = std::max(worst, std::abs(v));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Maxwell3, ScaledMagneticFieldLeavesFaradayDefect) {
  // B scaled by 1.01: faraday_3 = dE_y/dx + (1/c) dB_z/dt = 0.01 k sin(kx - wt) = 0.01 (w/c) sin(...).
  auto r = assemble_residuals(plane_wave("1", "101/100"), vacuum(), M("cartesian"));
  double c = 1.5, k = 2.0, peak = 0;
  for (int n = 0; n < 400; ++n) {
    double x = -1 + 2.0 * n / 399.0;
    auto v = eval_residuals(r, {{"x", x}, {"y", 0.1}, {"z", 0.2}, {"t", 0.0}, {"c", c}, {"k", k}});
    EXPECT_NEAR(v[2], 0.01 * k * std::sin(k * x), 1e-12);
    peak = std::max(peak, std::abs(v[2]));
  }
  EXPECT_NEAR(peak, 0.01 * (c * k) / c, 1e-4);
}

TEST(Maxwell3, ChargeConservationCompatibility) {
  for (const char* chart : {"cartesian", "cylindrical", "spherical"}) {
    MetricData m = M(chart);
    Sources3 s = abstract_sources(m.coords);
    auto r = assemble_residuals(abstract_fields(m.coords), s, m);
    Expr lhs = div(con({r.ampere[0], r.ampere[1], r.ampere[2]}), m) +
               sym::diff(r.gauss_D, "t", m.assume) / s.c;
    Expr cont = div(s.j, m) + sym::diff(s.rho, "t", m.assume);
    Expr rhs = -(Expr(4) * sym::pi() / s.c) * cont;
    EXPECT_TRUE(sym::equivalent(lhs, rhs, builtin_chart(chart).sampling())) << chart;
  }
}

TEST(Maxwell3, ResidualsAreLinearInTheFields) {
  MetricData m = M("spherical");
  auto make = [](const std::string& tag) {
    auto E = [&](const std::string& s) { return P(s); };
    FieldSet3 f;
    if (tag == "a") {
      f.E = cov({E("sin(r*t)"), E("r*cos(theta)"), E("t*phi")});
      f.H = cov({E("r^2"), E("exp(-t)*theta"), E("sin(phi)*r")});
      f.D = con({E("cos(t)*r"), E("theta^2"), E("phi*t")});
      f.B = con({E("t*r"), E("sin(theta)*t^2"), E("cos(phi)")});
    } else {
      f.E = cov({E("r*phi"), E("exp(t)"), E("theta*r^2")});
      f.H = cov({E("cos(r)"), E("t^3"), E("phi*theta")});
      f.D = con({E("r*theta*t"), E("sin(t)"), E("r^3")});
      f.B = con({E("exp(-r)*t"), E("phi"), E("t*theta")});
    }
    return f;
  };
  FieldSet3 a = make("a"), b = make("b"), ab;
  Expr al = sym::Rational(3, 2), be = -2;
  auto comb = [&](const ComponentVector& x, const ComponentVector& y) {
    ComponentVector out = x;
    for (int i = 0; i < 3; ++i) out.components[i] = al * x.components[i] + be * y.components[i];
    return out;
  };
  ab.E = comb(a.E, b.E);
  ab.H = comb(a.H, b.H);
  ab.D = comb(a.D, b.D);
  ab.B = comb(a.B, b.B);
  auto ra = assemble_residuals(a, vacuum(), m), rb = assemble_residuals(b, vacuum(), m);
  auto rab = assemble_residuals(ab, vacuum(), m);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 1.8);
  for (int n = 0; n < 20; ++n) {
    sym::Binding bind{{"r", u(rng)}, {"theta", u(rng)}, {"phi", u(rng)}, {"t", u(rng)}, {"c", 1.0}};
    auto va = eval_residuals(ra, bind), vb = eval_residuals(rb, bind), vab = eval_residuals(rab, bind);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(vab[i], 1.5 * va[i] - 2 * vb[i], 1e-10 * (1 + std::abs(vab[i])));
  }
}

TEST(Maxwell3, CylindricalFaradayMatchesExpectedForm) {
  MetricData m = M("cylindrical");
  auto r = assemble_residuals(abstract_fields(m.coords), abstract_sources(m.coords), m);
  auto ctx = maxwell_context(m.coords);
  Expr expected = sym::parse_expr("(1/r)*(diff(E3,phi) - diff(E2,z)) + (1/c)*diff(B1,t)", ctx);
  EXPECT_TRUE(sym::equivalent(r.faraday[0], expected, builtin_chart("cylindrical").sampling()));
}

TEST(Maxwell3, RejectsWrongVariance) {
  FieldSet3 f = abstract_fields({"x", "y", "z"});
  f.E.variance = Variance::Contravariant;
  EXPECT_THROW(assemble_residuals(f, abstract_sources({"x", "y", "z"}), M("cartesian")), std::invalid_argument);
}

TEST(Maxwell3, UnboundVariableIsReported) {
  auto r = assemble_residuals(plane_wave("1", "2"), vacuum(), M("cartesian"));
  EXPECT_THROW(eval_residuals(r, {{"x", 0.1}}), sym::EvalError);
}

TEST(Maxwell3, RenderedEquationsListAllEight) {
  MetricData m = M("spherical");
  auto r = assemble_residuals(abstract_fields(m.coords), abstract_sources(m.coords), m);
  std::string txt = render_maxwell3(r, "spherical", OutputFormat::Text);
  for (const auto& n : MaxwellResiduals3::names()) EXPECT_NE(txt.find(n + ": "), std::string::npos) << n;
  std::string tex = render_maxwell3(r, "spherical", OutputFormat::Latex);
  EXPECT_NE(tex.find("\\begin{gather*}"), std::string::npos);
  EXPECT_NE(tex.find("\\vartheta"), std::string::npos);
}

// ------------------------------------------------------------ golden corpus

TEST(Golden, BuiltinCorpusParses) {
  const auto& c = builtin_golden();
  for (const char* ch : {"cartesian", "cylindrical", "spherical"}) {
    const auto* s = c.find("maxwell", ch);
    ASSERT_NE(s, nullptr) << ch;
    EXPECT_EQ(s->entries.size(), 8u);
  }
  EXPECT_NE(c.find("operators", "spherical", "nonholonomic"), nullptr);
  EXPECT_NE(c.find("metric", "cylindrical"), nullptr);
}

TEST(Golden, CylindricalAndSphericalPassEightOfEight) {
  for (const char* ch : {"cylindrical", "spherical"}) {
    auto rep = golden_check(ch);
    EXPECT_EQ(rep.lines.size(), 8u);
    EXPECT_TRUE(rep.all_pass()) << rep.render();
    for (const auto& l : rep.lines)
      if (l.name.find("ampere") != std::string::npos) EXPECT_NE(l.note.find("sign"), std::string::npos);
  }
}

TEST(Golden, CartesianUsesTextbookForm) {
  auto rep = golden_check("cartesian");
  EXPECT_TRUE(rep.all_pass()) << rep.render();
  for (const auto& l : rep.lines) EXPECT_TRUE(l.note.empty()) << l.name;
}

TEST(Golden, UnknownChartIsAnError) {
  EXPECT_THROW(golden_check("toroidal"), ChartError);
}

TEST(Golden, CorruptedEquationFailsByName) {
  std::string text = builtin_golden_text();
  // Drop the 2/r term of the spherical Gauss law for D.
  auto at = text.find("gauss_D: (2/r)*D1 + ");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, std::string("gauss_D: (2/r)*D1 + ").size(), "gauss_D: ");
  auto rep = golden_check("spherical", parse_golden(text));
  EXPECT_EQ(rep.failures(), 1);
  for (const auto& l : rep.lines) EXPECT_EQ(l.pass, l.name != "spherical/gauss_D") << l.name;
  EXPECT_NE(rep.render().find("FAIL spherical/gauss_D"), std::string::npos);
}

TEST(Golden, AmpereSignCorruptionStillCaught) {
  std::string text = builtin_golden_text();
  auto sec = text.find("[maxwell cylindrical]");
  auto at = text.find("= -(1/c)*diff(D2,t)", sec);
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 3, "= ");
  auto rep = golden_check("cylindrical", parse_golden(text));
  EXPECT_EQ(rep.failures(), 1);
  EXPECT_NE(rep.render().find("FAIL cylindrical/ampere2"), std::string::npos);
}

TEST(Golden, ParserReportsLineNumbers) {
  try {
    parse_golden("[maxwell cylindrical]\nfaraday1: (1/r*(E3\n");
    FAIL();
  } catch (const GoldenError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_golden("faraday1: E1 = 0\n"), GoldenError);
  EXPECT_THROW(parse_golden("[bogus cartesian]\n"), GoldenError);
  EXPECT_THROW(parse_golden("[maxwell nowhere]\n"), GoldenError);
}

TEST(Golden, MissingEquationIsAFailure) {
  std::string text = builtin_golden_text();
  auto sec = text.find("[maxwell spherical]");
  auto at = text.find("faraday2:", sec);
  text.erase(at, text.find('\n', at) - at + 1);
  auto rep = golden_check("spherical", parse_golden(text));
  EXPECT_EQ(rep.failures(), 1);
}

TEST(Golden, MetricLiteralsMatchStructurally) {
  for (const char* ch : {"cylindrical", "spherical"}) {
    auto rep = check_metric_literals(ch);
    EXPECT_TRUE(rep.all_pass()) << rep.render();
    EXPECT_GE(rep.lines.size(), 16u);
  }
}

TEST(Golden, MetricLiteralIsStructuralNotNumeric) {
  std::string text = builtin_golden_text();
  auto sec = text.find("[metric spherical]");
  auto at = text.find("sqrt_g: r^2*sin(theta)", sec);
  text.replace(at, std::string("sqrt_g: r^2*sin(theta)").size(), "sqrt_g: r^2*sin(theta) + 0.0000000000001");
  auto rep = check_metric_literals("spherical", parse_golden(text));
  EXPECT_EQ(rep.failures(), 1);
}

TEST(Golden, OperatorTablesMatchBothBases) {
  for (const char* ch : {"cylindrical", "spherical"})
    for (Basis b : {Basis::Holonomic, Basis::Nonholonomic}) {
      auto rep = check_operator_tables(ch, b);
      EXPECT_EQ(rep.lines.size(), 7u);
      EXPECT_TRUE(rep.all_pass()) << rep.render();
    }
}
