#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "curvmax/maxwell3.hpp"
#include "curvmax/rs_momentum.hpp"
#include "smooth_fields.hpp"

using namespace curvmax;
using fixtures::max_dev;
using fixtures::PeriodicFields;
using fixtures::Smooth;

namespace {

const Complex I(0, 1);

MetricData M(const std::string& chart) { return metric_from_chart(builtin_chart(chart)); }

double cmax(const CVec3& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

SourceValues no_sources(double, const RVec3&) { return {}; }


}  // namespace

// ------------------------------------------------------------ packing

TEST(RSPacking, Definition) {
  FieldValues3 f;
  f.E = {1, 0, 0};
  f.B = {0, 2, 0};
  auto rs = to_rs(f);
  EXPECT_EQ(rs.F[0], Complex(1));
  EXPECT_EQ(rs.F[1], Complex(0, 2));
  EXPECT_EQ(rs.F[2], Complex(0));
  auto z = to_rs(FieldValues3{});
  for (int i = 0; i < 3; ++i) EXPECT_EQ(z.F[i] + z.G[i], Complex(0));
}

TEST(RSPacking, RoundTripsAreExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 100; ++n) {
    FieldValues3 f;
    for (auto* v : {&f.E, &f.B, &f.D, &f.H})
      for (double& x : *v) x = u(rng);
    auto g = from_rs(to_rs(f));
    EXPECT_EQ(g.E, f.E);
    EXPECT_EQ(g.B, f.B);
    EXPECT_EQ(g.D, f.D);
    EXPECT_EQ(g.H, f.H);
    auto back = from_rs(rs_from_kl(kl_from_rs(to_rs(f))));
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(back.E[i], f.E[i], 1e-15);
      EXPECT_NEAR(back.B[i], f.B[i], 1e-15);
      EXPECT_NEAR(back.D[i], f.D[i], 1e-15);
      EXPECT_NEAR(back.H[i], f.H[i], 1e-15);
    }
  }
}

TEST(KLPair, VacuumAndHandSubstitution) {
  FieldValues3 f;
  f.E = {0.3, -1, 2};
  f.B = {1, 0.5, -0.25};
  f.D = f.E;
  f.H = f.B;
  auto kl = kl_from_rs(to_rs(f));
  auto rs = to_rs(f);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(kl.K[i], rs.F[i]);
    EXPECT_EQ(kl.L[i], Complex(0));
  }
  FieldValues3 g;
  g.E = {1, 0, 0};
  g.D = {2, 0, 0};
  kl = kl_from_rs(to_rs(g));
  EXPECT_EQ(kl.K[0], Complex(1.5));
  EXPECT_EQ(kl.L[0], Complex(0.5));
}

// ------------------------------------------------------------ residuals

TEST(RSResidual, VacuumPlaneWave) {
  double c = 1.5, k = 2.0;
  KLFunc kl = [&](double t, const RVec3& x) {
    double w = std::cos(k * x[0] - c * k * t);
    KLPair p;
    p.K = {0, w, I * w};
    return p;
  };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 10; ++n) {
    RVec3 x{u(rng), u(rng), u(rng)};
    auto r = rs_residual(kl, no_sources, M("cartesian"), u(rng), x, c);
    EXPECT_LT(std::abs(r.scalar), 1e-7);
    EXPECT_LT(cmax(r.vector), 1e-7);
  }
  auto z = rs_residual([](double, const RVec3&) { return KLPair{}; }, no_sources, M("cartesian"), 0, {0, 0, 0});
  EXPECT_EQ(std::abs(z.scalar), 0.0);
  EXPECT_EQ(cmax(z.vector), 0.0);
}

TEST(RSResidual, EqualsComplexCombinationOfRealResiduals) {
  for (auto [chart, vacuum] : {std::pair{"cartesian", false}, std::pair{"cylindrical", false},
                               std::pair{"spherical", true}, std::pair{"cylindrical", true}}) {
    Smooth s(chart, vacuum);
    auto kl = s.kl();
    auto src = s.sources();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.4, 1.4);
    for (int n = 0; n < 5; ++n) {
      double t = u(rng);
      RVec3 x{u(rng), u(rng), u(rng)};
      auto b = s.bind(t, x);
      b["c"] = 1.5;
      auto v = eval_residuals(s.res, b);
      auto r = rs_residual(kl, src, s.m, t, x, 1.5);
      double scale = 1;
      for (double w : v) scale = std::max(scale, std::abs(w));
      EXPECT_LE(std::abs(r.scalar - Complex(v[6], v[7])), 1e-9 * scale) << chart;
      for (int i = 0; i < 3; ++i)
        EXPECT_LE(std::abs(r.vector[i] - Complex(v[3 + i], -v[i])), 1e-9 * scale) << chart << " " << i;
    }
  }
}

TEST(RSResidual, VacuumReductionAgreesWithKOnlyForm) {
  Smooth s("cylindrical", true);
  auto src = s.sources();
  CFieldFunc F = [&](double t, const RVec3& x) { return to_rs(s.values(t, x)).F; };
  for (double t : {0.2, 0.9}) {
    RVec3 x{1.1, 0.3, -0.4};
    auto a = rs_residual(s.kl(), src, s.m, t, x, 1.5);
    auto b = rs_vacuum_residual(F, src, s.m, t, x, 1.5);
    EXPECT_LE(std::abs(a.scalar - b.scalar), 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(a.vector[i] - b.vector[i]), 1e-12);
  }
}

TEST(RSResidual, SingularPointIsReported) {
  EXPECT_THROW(rs_residual([](double, const RVec3&) { return KLPair{}; }, no_sources, M("cylindrical"), 0,
                           {0.0, 0.1, 0.1}),
               std::domain_error);
}

TEST(Isotropic, UnitMediumMatchesVacuum) {
  Smooth s("cartesian", true);
  auto src = s.sources();
  RFieldFunc E = [&](double t, const RVec3& x) { return s.ev(s.Eu, t, x); };
  RFieldFunc B = [&](double t, const RVec3& x) { return s.ev(s.f.B, t, x); };
  CFieldFunc F = [&](double t, const RVec3& x) { return to_rs(s.values(t, x)).F; };
  RVec3 x{0.3, -0.2, 0.6};
  auto a = isotropic_residual(E, B, src, {1, 1}, s.m, 0.4, x, 1.5);
  auto b = rs_vacuum_residual(F, src, s.m, 0.4, x, 1.5);
  EXPECT_LE(std::abs(a.scalar - b.scalar), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(a.vector[i] - b.vector[i]), 1e-12);
}

TEST(Isotropic, PlaneWaveInMedium) {
  double eps = 2, mu = 3, c = 1.0, k = 1.7;
  double w = c * k / std::sqrt(eps * mu);
  RFieldFunc E = [&](double t, const RVec3& x) { return RVec3{0, std::cos(k * x[0] - w * t), 0}; };
  RFieldFunc B = [&](double t, const RVec3& x) {
    return RVec3{0, 0, std::sqrt(eps * mu) * std::cos(k * x[0] - w * t)};
  };
  for (double t : {0.0, 0.7, 2.1}) {
    auto r = isotropic_residual(E, B, no_sources, {eps, mu}, M("cartesian"), t, {0.2, -0.4, 0.9}, c);
    EXPECT_LT(std::abs(r.scalar), 1e-7);
    EXPECT_LT(cmax(r.vector), 1e-7);
  }
  // Wrong phase speed leaves a defect.
  RFieldFunc Bw = [&](double t, const RVec3& x) { return RVec3{0, 0, std::cos(k * x[0] - w * t)}; };
  double defect = 0;
  for (double x0 : {0.1, 0.5, 0.9, 1.3})
    defect = std::max(defect, cmax(isotropic_residual(E, Bw, no_sources, {eps, mu}, M("cartesian"), 0.3, {x0, 0, 0}, c).vector));
  EXPECT_GT(defect, 0.1);
}

TEST(Isotropic, StaticUniformFieldAndInvalidMedium) {
  RFieldFunc E = [](double, const RVec3&) { return RVec3{1, -2, 0.5}; };
  RFieldFunc B = [](double, const RVec3&) { return RVec3{0, 0, 0}; };
  auto r = isotropic_residual(E, B, no_sources, {4, 1}, M("cartesian"), 0, {0.1, 0.2, 0.3});
  EXPECT_EQ(std::abs(r.scalar), 0.0);
  EXPECT_THROW(isotropic_residual(E, B, no_sources, {0, 1}, M("cartesian"), 0, {0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(isotropic_residual(E, B, no_sources, {1, -1}, M("cartesian"), 0, {0, 0, 0}), std::invalid_argument);
}

// ------------------------------------------------------------ transforms

namespace {

CGrid random_grid(const Lattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  CGrid g(lat.size());
  for (auto& z : g) z = {n(rng), n(rng)};
  return g;
}

// Direct O(N^2) DFT with the same sign and normalization.
CGrid naive_dft(const Lattice& lat, const CGrid& f) {
  CGrid out(f.size());
  double norm = 1 / std::sqrt(static_cast<double>(f.size()));
  for (std::size_t a = 0; a < f.size(); ++a) {
    auto ka = lat.point(a);  // index triple scaled by spacing
    Complex s = 0;
    for (std::size_t b = 0; b < f.size(); ++b) {
      auto xb = lat.point(b);
      double ph = 0;
      for (int ax = 0; ax < 3; ++ax) {
        double ia = std::round(ka[ax] / lat.spacing(ax)), ib = std::round(xb[ax] / lat.spacing(ax));
        ph += 2 * M_PI * ia * ib / static_cast<double>(lat.n[ax]);
      }
      s += f[b] * std::exp(-I * ph);
    }
    out[a] = s * norm;
  }
  return out;
}

}  // namespace

TEST(FFT, MatchesDirectTransformOnMixedSizes) {
  Lattice lat{{4, 3, 5}, {1, 2, 3}};
  auto f = random_grid(lat, 4);
  auto a = fft_forward(lat, f).amp;
  auto b = naive_dft(lat, f);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-12);
}

TEST(FFT, RoundTripAndParseval) {
  Lattice lat{{16, 16, 16}, {1, 1, 1}};
  auto f = random_grid(lat, 5);
  auto s = fft_forward(lat, f);
  auto back = fft_inverse(s);
  double err = 0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  EXPECT_LT(err / l2_norm(f) * std::sqrt(static_cast<double>(f.size())), 1e-12);
  EXPECT_NEAR(l2_norm(s.amp) / l2_norm(f), 1.0, 1e-12);
}

TEST(FFT, ConstantAndSinusoid) {
  Lattice lat{{4, 4, 4}, {1, 1, 1}};
  auto s = fft_forward(lat, CGrid(lat.size(), Complex(3)));
  for (std::size_t i = 1; i < s.amp.size(); ++i) EXPECT_LT(std::abs(s.amp[i]), 1e-13);
  EXPECT_NEAR(s.amp[0].real(), 3 * 8, 1e-12);

  Lattice line{{32, 1, 1}, {2.5, 1, 1}};
  auto g = sample(line, [&](const RVec3& x) { return Complex(std::sin(2 * M_PI * x[0] / 2.5)); });
  auto sp = fft_forward(line, g);
  EXPECT_NEAR(std::abs(sp.amp[1]), std::abs(sp.amp[31]), 1e-13);
  EXPECT_GT(std::abs(sp.amp[1]), 1.0);
  EXPECT_LT(std::abs(sp.amp[1] - std::conj(sp.amp[31])), 1e-13);
  for (std::size_t m = 0; m < 32; ++m)
    if (m != 1 && m != 31) EXPECT_LT(std::abs(sp.amp[m]), 1e-13);
  EXPECT_NEAR(sp.k(0, 31), -2 * M_PI / 2.5, 1e-14);
}

TEST(FFT, RejectsEmptyLattice) {
  Lattice lat{{0, 4, 4}, {1, 1, 1}};
  EXPECT_THROW(fft_forward(lat, {}), std::invalid_argument);
  Lattice ok{{2, 2, 2}, {1, 1, 1}};
  EXPECT_THROW(fft_forward(ok, CGrid(7)), std::invalid_argument);
}

TEST(SpectralDerivative, SinusoidConstantAndBandLimited) {
  Lattice lat{{32, 8, 8}, {3, 2, 2}};
  auto f = sample(lat, [](const RVec3& x) { return Complex(std::sin(2 * M_PI * x[0] / 3)); });
  auto df = sample(lat, [](const RVec3& x) { return Complex(2 * M_PI / 3 * std::cos(2 * M_PI * x[0] / 3)); });
  EXPECT_LT(spectral_derivative_deviation(lat, f, df, 0), 1e-10);
  CGrid c(lat.size(), Complex(2)), zero(lat.size());
  EXPECT_EQ(spectral_derivative_deviation(lat, c, zero, 1), 0.0);

  // Random modes with |m| < N/4 on each axis.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  struct Mode { int m[3]; double a, b; };
  std::vector<Mode> modes;
  for (int n = 0; n < 12; ++n)
    modes.push_back({{static_cast<int>(std::floor(u(rng) * 8)), static_cast<int>(u(rng) * 2),
                      static_cast<int>(u(rng) * 2)},
                     u(rng), u(rng)});
  for (int axis = 0; axis < 3; ++axis) {
    auto phase = [&](const Mode& md, const RVec3& x) {
      double p = 0;
      for (int a = 0; a < 3; ++a) p += 2 * M_PI * md.m[a] * x[a] / lat.length[a];
      return p;
    };
    auto F = sample(lat, [&](const RVec3& x) {
      double s = 0;
      for (auto& md : modes) s += md.a * std::cos(phase(md, x)) + md.b * std::sin(phase(md, x));
      return Complex(s);
    });
    auto dF = sample(lat, [&](const RVec3& x) {
      double s = 0;
      for (auto& md : modes) {
        double k = 2 * M_PI * md.m[axis] / lat.length[axis];
        s += k * (-md.a * std::sin(phase(md, x)) + md.b * std::cos(phase(md, x)));
      }
      return Complex(s);
    });
    EXPECT_LT(spectral_derivative_deviation(lat, F, dF, axis), 1e-9) << axis;
  }
}

// ------------------------------------------------------------ momentum form


TEST(MomentumForm, EqualsTransformOfRealSpaceResiduals) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PeriodicFields p(seed);
    double t = 0.35;
    auto r = maxwell_k_residual(p.spectra(t), 2.0);
    auto all = p.res.all();
    std::array<const SpectralField*, 8> ours = {&r.faraday[0], &r.faraday[1], &r.faraday[2], &r.ampere[0],
                                                &r.ampere[1],  &r.ampere[2],  &r.gauss_D,    &r.gauss_B};
    for (int n = 0; n < 8; ++n) {
      auto want = p.spectrum(all[n], t);
      double scale = std::max(1.0, l2_norm(want.amp));
      EXPECT_LE(max_dev(*ours[n], want), 1e-9 * scale) << "seed " << seed << " residual " << n;
    }
  }
}

TEST(MomentumForm, PlaneWaveModeAndZeroFields) {
  Lattice lat{{8, 8, 8}, {2 * M_PI, 2 * M_PI, 2 * M_PI}};
  double c = 1.3, t = 0.4;
  // k = (1, 2, 0), polarization along z, B = k x E / |k|.
  double kx = 1, ky = 2, kn = std::sqrt(5.0), w = c * kn;
  auto wave = [&](double amp, double tt) {
    return fft_forward(lat, sample(lat, [&](const RVec3& x) { return Complex(amp * std::cos(kx * x[0] + ky * x[1] - w * tt)); }));
  };
  auto dwave = [&](double amp, double tt) {
    return fft_forward(lat, sample(lat, [&](const RVec3& x) { return Complex(amp * w * std::sin(kx * x[0] + ky * x[1] - w * tt)); }));
  };
  SpectralField zero{lat, CGrid(lat.size())};
  SpectralMaxwell s;
  for (int i = 0; i < 3; ++i) s.E[i] = s.H[i] = s.D[i] = s.B[i] = s.j[i] = s.dB_dt[i] = s.dD_dt[i] = zero;
  s.rho = zero;
  s.E[2] = s.D[2] = wave(1, t);
  s.dD_dt[2] = dwave(1, t);
  // (k x e_z)/|k| = (ky, -kx, 0)/|k|
  s.B[0] = s.H[0] = wave(ky / kn, t);
  s.B[1] = s.H[1] = wave(-kx / kn, t);
  s.dB_dt[0] = dwave(ky / kn, t);
  s.dB_dt[1] = dwave(-kx / kn, t);
  auto r = maxwell_k_residual(s, c);
  double worst = 0;
  for (int i = 0; i < 3; ++i) worst = std::max({worst, max_dev(r.faraday[i], zero), max_dev(r.ampere[i], zero)});
  worst = std::max({worst, max_dev(r.gauss_D, zero), max_dev(r.gauss_B, zero)});
  EXPECT_LT(worst, 1e-10);

  SpectralMaxwell z;
  for (int i = 0; i < 3; ++i) z.E[i] = z.H[i] = z.D[i] = z.B[i] = z.j[i] = z.dB_dt[i] = z.dD_dt[i] = zero;
  z.rho = zero;
  auto rz = maxwell_k_residual(z);
  EXPECT_EQ(max_dev(rz.gauss_D, zero), 0.0);
}

TEST(MomentumForm, TimeDerivativeFromSnapshots) {
  PeriodicFields p(9);
  double t = 0.5, dt = 1e-4;
  auto a = p.spectra(t);
  for (int i = 0; i < 3; ++i) {
    a.dB_dt[i] = central_time_derivative(p.spectrum(p.f.B.components[i], t - dt), p.spectrum(p.f.B.components[i], t + dt), dt);
    a.dD_dt[i] = central_time_derivative(p.spectrum(p.f.D.components[i], t - dt), p.spectrum(p.f.D.components[i], t + dt), dt);
  }
  auto r = maxwell_k_residual(a, 2.0);
  auto want = p.spectrum(p.res.faraday[1], t);
  EXPECT_LE(max_dev(r.faraday[1], want), 1e-6 * std::max(1.0, l2_norm(want.amp)));
}

TEST(MomentumForm, ConstantMetricOnly) {
  PeriodicFields p(4);
  auto s = p.spectra(0.1);
  Matrix scaled = {{4, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto r1 = maxwell_k_residual(s, 2.0), r2 = maxwell_k_residual(s, 2.0, scaled);
  EXPECT_EQ(max_dev(r1.gauss_D, r2.gauss_D), 0.0);
  Matrix curved = metric_from_chart(builtin_chart("cylindrical")).g_lo;
  EXPECT_THROW(maxwell_k_residual(s, 2.0, curved), UnsupportedError);
}

TEST(MomentumForm, SpectrumCsv) {
  Lattice lat{{2, 1, 1}, {1, 1, 1}};
  auto s = fft_forward(lat, {Complex(1), Complex(-1)});
  std::ostringstream os;
  write_spectrum_csv(os, {{"E1", &s}});
  std::string out = os.str();
  EXPECT_EQ(out.rfind("k1,k2,k3,component,re,im\n", 0), 0u);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 3);
  EXPECT_NE(out.find(",E1,"), std::string::npos);
}
