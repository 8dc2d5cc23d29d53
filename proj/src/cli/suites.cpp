#include <cmath>
#include <cstdlib>
#include <random>

#include "curvmax/cli.hpp"
#include "curvmax/maxwell4.hpp"
#include "curvmax/rs_momentum.hpp"
#include "curvmax/solver.hpp"

namespace curvmax::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Runs a check, turning an exception into a failing line.
template <class Fn>
void guarded(CheckReport& rep, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    rep.lines.push_back({name, false, std::nan(""), e.what()});
  }
}

void duals(CheckReport& rep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  auto g = minkowski();
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    Mat4<double> m{};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        m[i][j] = u(rng);
        m[j][i] = -m[i][j];
      }
    FieldTensor4<double> t{m, Index::Lower, TensorKind::F};
    auto dd = hodge_dual(hodge_dual(t, g), g);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(dd.m[i][j] + m[i][j]));
  }
  rep.add("4tensor/double_dual_is_minus_identity", worst, 1e-12, "50 random tensors");
}

void spinor_round_trip(CheckReport& rep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    Vec3<double> E{u(rng), u(rng), u(rng)}, B{u(rng), u(rng), u(rng)};
    auto F = reconstruct_F_from_spinor(phi_from_EB(E, B));
    auto ref = assemble_F_lower(E, B);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(F.m[i][j] - ref.m[i][j]));
  }
  rep.add("spinor/reconstruct_after_phi_from_EB", worst, 1e-12, "100 random (E, B)");
}

void complex_packing(CheckReport& rep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    FieldValues3 f;
    for (int i = 0; i < 3; ++i) {
      f.E[i] = u(rng);
      f.B[i] = u(rng);
      f.D[i] = u(rng);
      f.H[i] = u(rng);
    }
    auto back = from_rs(rs_from_kl(kl_from_rs(to_rs(f))));
    for (int i = 0; i < 3; ++i)
      worst = std::max({worst, std::abs(back.E[i] - f.E[i]), std::abs(back.B[i] - f.B[i]),
                        std::abs(back.D[i] - f.D[i]), std::abs(back.H[i] - f.H[i])});
  }
  rep.add("complex/KL_round_trip", worst, 1e-15, "100 random field sets");
}

void fft_checks(CheckReport& rep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Lattice lat{{8, 6, 5}, {1.0, 2.0, 1.5}};
  CGrid g(lat.size());
  for (auto& z : g) z = {u(rng), u(rng)};
  auto s = fft_forward(lat, g);
  auto back = fft_inverse(s);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(back[k] - g[k]));
  rep.add("momentum/fft_round_trip", worst, 1e-12, "8x6x5 random lattice");
  double n0 = l2_norm(g);
  rep.add("momentum/parseval", std::abs(l2_norm(s.amp) - n0) / n0, 1e-12);

  // Band-limited data: derivative of sin(2 pi x/L1) cos(2 pi 2y/L2).
  auto f = sample(lat, [&](const RVec3& x) {
    return Complex(std::sin(2 * kPi * x[0] / lat.length[0]) * std::cos(4 * kPi * x[1] / lat.length[1]), 0);
  });
  auto df = sample(lat, [&](const RVec3& x) {
    return Complex(2 * kPi / lat.length[0] * std::cos(2 * kPi * x[0] / lat.length[0]) *
                       std::cos(4 * kPi * x[1] / lat.length[1]),
                   0);
  });
  rep.add("momentum/spectral_derivative", spectral_derivative_deviation(lat, f, df, 0), 1e-10);
}

void pair_tables(CheckReport& rep, std::uint64_t seed) {
  rep.append(check_pair_table(minkowski(), seed, 20, 1e-12, "minkowski"));
  auto cyl = lift_spatial(metric_from_chart(builtin_chart("cylindrical")));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(0.2, 3.0);
  double worst = 0.0;
  bool ok = true;
  for (int n = 0; n < 10; ++n) {
    auto rep_r = check_pair_table(evaluate(cyl, {{"r", r(rng)}, {"phi", 0.3}, {"z", 0.1}}), seed + n, 5);
    ok = ok && rep_r.all_pass();
    for (const auto& l : rep_r.lines) worst = std::max(worst, l.error);
  }
  rep.lines.push_back({"4tensor/pair_table_cylindrical_10_radii", ok && worst <= 1e-12, worst, ""});
}

void solver_invariants(CheckReport& rep) {
  auto s = make_grid_spec(builtin_chart("cylindrical"), {0.5, 0.0, 0.0}, {1.5, 2 * kPi, 1.0}, {6, 12, 6});
  auto f = init_grid(s, "random:5");
  double b0 = diagnostics(f).div_B;
  double g0 = diagnostics(f).div_D_minus_4pi_rho;
  CurrentFunc j = [](double t, const std::array<double, 3>& u) {
    return std::array<double, 3>{std::sin(2 * u[0]) * (1 + t), std::cos(u[1]), std::sin(u[2] - u[1])};
  };
  run(f, 50, j);
  auto d = diagnostics(f);
  rep.add("solver/div_B_conserved", std::abs(d.div_B - b0), 1e-10, "cylindrical annulus, 50 steps with current");
  rep.add("solver/gauss_D_invariant", std::abs(d.div_D_minus_4pi_rho - g0), 1e-9);
  auto z = init_grid(s, "zero");
  run(z, 5);
  rep.add("solver/zero_stays_zero", diagnostics(z).max_abs, 0.0);
}

}  // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CURVMAX_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
  }
  return CheckOptions{}.seed;
}

CheckReport paper_suite(const GoldenCorpus& corpus, const CheckOptions& opt) {
  CheckReport rep;
  for (const char* chart : {"cylindrical", "spherical"})
    guarded(rep, std::string(chart) + "/maxwell", [&] { rep.append(golden_check(chart, corpus, opt)); });
  return rep;
}

CheckReport property_suite(const GoldenCorpus& corpus, const CheckOptions& opt) {
  CheckReport rep;
  std::mt19937_64 rng(opt.seed);
  for (std::string chart : {"cylindrical", "spherical"}) {
    guarded(rep, chart + "/metric", [&] { rep.append(check_metric_literals(chart, corpus)); });
    for (Basis b : {Basis::Holonomic, Basis::Nonholonomic})
      guarded(rep, chart + "/operators", [&] { rep.append(check_operator_tables(chart, b, corpus, opt)); });
  }
  guarded(rep, "cartesian/maxwell", [&] { rep.append(golden_check("cartesian", corpus, opt)); });
  guarded(rep, "4tensor/pair_table", [&] { pair_tables(rep, opt.seed); });
  guarded(rep, "4tensor/double_dual", [&] { duals(rep, rng); });
  guarded(rep, "spinor/round_trip", [&] { spinor_round_trip(rep, rng); });
  guarded(rep, "complex/packing", [&] { complex_packing(rep, rng); });
  guarded(rep, "momentum/fft", [&] { fft_checks(rep, rng); });
  guarded(rep, "solver/invariants", [&] { solver_invariants(rep); });
  return rep;
}

}  // namespace curvmax::cli
