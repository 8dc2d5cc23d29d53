#include "curvmax/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace curvmax {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string coord_text(const std::array<double, 3>& u) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << u[0] << ", " << u[1] << ", " << u[2] << ")";
  return os.str();
}

// Diagonal metric entries g_ii as compiled programs over the chart coords.
struct DiagMetric {
  std::array<sym::CompiledExpr, 3> gii;

  explicit DiagMetric(const Chart& chart) {
    if (chart.dim() != 3) throw SolverError("solver needs a three-dimensional chart");
    MetricData m = metric_from_chart(chart);
    if (!m.orthogonal())
      throw SolverError("solver needs an orthogonal chart; '" + chart.name + "' has off-diagonal metric terms");
    for (int i = 0; i < 3; ++i) gii[i] = sym::CompiledExpr(m.g_lo[i][i], chart.coords);
  }
  std::array<double, 3> at(const std::array<double, 3>& u) const {
    std::array<double, 3> g{};
    for (int i = 0; i < 3; ++i) g[i] = gii[i](std::span<const double>(u.data(), 3));
    return g;
  }
};

DiagMetric diag_metric(const Chart& chart) { return DiagMetric(chart); }

bool usable(const std::array<double, 3>& g) {
  for (double x : g)
    if (!std::isfinite(x) || x <= 1e-14) return false;
  return true;
}

// Offsets to the neighbour along an axis, with periodic wrap.
struct Stencil {
  std::array<std::size_t, 3> n{};
  std::array<bool, 3> periodic{};
  std::array<std::ptrdiff_t, 3> stride{};
  std::array<double, 3> inv_h{};

  explicit Stencil(const GridField& f) {
    for (int a = 0; a < 3; ++a) {
      n[a] = f.spec.cells[a];
      periodic[a] = f.spec.bc[a] == Boundary::Periodic;
      inv_h[a] = 1.0 / f.spec.spacing(a);
    }
    stride = {static_cast<std::ptrdiff_t>(f.shape[1] * f.shape[2]), static_cast<std::ptrdiff_t>(f.shape[2]), 1};
  }
  std::ptrdiff_t fwd(int a, std::size_t p) const {
    return (periodic[a] && p + 1 == n[a]) ? -static_cast<std::ptrdiff_t>(n[a] - 1) * stride[a] : stride[a];
  }
  std::ptrdiff_t bwd(int a, std::size_t p) const {
    return (periodic[a] && p == 0) ? -static_cast<std::ptrdiff_t>(n[a] - 1) * stride[a] : stride[a];
  }
  // X(p+1) - X(p) along a, X integer-sited along a.
  double dfwd(const SiteArray& x, std::size_t idx, int a, std::size_t p) const {
    return (x[idx + fwd(a, p)] - x[idx]) * inv_h[a];
  }
  // X(p+1/2) - X(p-1/2) along a, X half-sited along a.
  double dbwd(const SiteArray& x, std::size_t idx, int a, std::size_t p) const {
    return (x[idx] - x[idx - bwd(a, p)]) * inv_h[a];
  }
};

template <class Fn>
void for_sites(const GridField& f, std::array<bool, 3> half, Fn&& fn) {
  std::size_t n0 = f.count(0, half[0]), n1 = f.count(1, half[1]), n2 = f.count(2, half[2]);
  for (std::size_t p0 = 0; p0 < n0; ++p0)
    for (std::size_t p1 = 0; p1 < n1; ++p1)
      for (std::size_t p2 = 0; p2 < n2; ++p2) fn(std::array<std::size_t, 3>{p0, p1, p2}, f.index(p0, p1, p2));
}

std::array<bool, 3> edge_half(int i) { return {i == 0, i == 1, i == 2}; }
std::array<bool, 3> face_half(int i) { return {i != 0, i != 1, i != 2}; }

bool on_pec(const GridField& f, int a, std::size_t p) {
  return f.spec.bc[a] == Boundary::PEC && (p == 0 || p == f.spec.cells[a]);
}

// Edge site of component i lying in a PEC wall (tangential there).
bool edge_on_wall(const GridField& f, int i, const std::array<std::size_t, 3>& p) {
  for (int a = 0; a < 3; ++a)
    if (a != i && on_pec(f, a, p[a])) return true;
  return false;
}

// sum eps^{ijk} d_j X_k at face sites of component i, X edge-sited.
double curl_fwd(const Stencil& s, const std::array<SiteArray, 3>& x, int i, std::size_t idx,
                const std::array<std::size_t, 3>& p) {
  int a = (i + 1) % 3, b = (i + 2) % 3;
  return s.dfwd(x[b], idx, a, p[a]) - s.dfwd(x[a], idx, b, p[b]);
}

// Same at edge sites of component i, X face-sited.
double curl_bwd(const Stencil& s, const std::array<SiteArray, 3>& x, int i, std::size_t idx,
                const std::array<std::size_t, 3>& p) {
  int a = (i + 1) % 3, b = (i + 2) % 3;
  return s.dbwd(x[b], idx, a, p[a]) - s.dbwd(x[a], idx, b, p[b]);
}

double quad_weight(const GridField& f, const std::array<bool, 3>& half, const std::array<std::size_t, 3>& p) {
  double w = 1.0;
  for (int a = 0; a < 3; ++a)
    if (!half[a] && on_pec(f, a, p[a])) w *= 0.5;
  return w;
}

double cell_volume(const GridSpec& s) { return s.spacing(0) * s.spacing(1) * s.spacing(2); }

void validate(const GridSpec& s) {
  for (int a = 0; a < 3; ++a) {
    if (s.cells[a] < 2) throw SolverError("grid needs at least 2 cells per axis");
    if (!(s.hi[a] > s.lo[a])) throw SolverError("empty extent along '" + s.chart.coords.at(a) + "'");
  }
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw SolverError("CFL number must lie in (0, 1]");
  if (!(s.c > 0.0)) throw SolverError("speed of light must be positive");
  if (!(s.epsilon > 0.0 && s.mu > 0.0)) throw SolverError("epsilon and mu must be positive");
  if (s.dt < 0.0 || !std::isfinite(s.dt)) throw SolverError("time step must be positive");
}

void sync_H(GridField& f) {
  for (int i = 0; i < 3; ++i)
    for_sites(f, face_half(i), [&](auto, std::size_t idx) { f.H[i][idx] = f.w_face[i][idx] * f.b[i][idx] / f.spec.mu; });
}

void sync_E(GridField& f) {
  for (int i = 0; i < 3; ++i)
    for_sites(f, edge_half(i),
              [&](auto, std::size_t idx) { f.E[i][idx] = f.d[i][idx] / (f.spec.epsilon * f.w_edge[i][idx]); });
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic pseudo-random value in (-1, 1) keyed on a site position.
double hash_uniform(std::uint64_t seed, int comp, const std::array<double, 3>& u) {
  std::uint64_t h = splitmix(seed * 31 + static_cast<std::uint64_t>(comp));
  for (double x : u) h = splitmix(h ^ static_cast<std::uint64_t>(std::llround(x * 1e9)));
  return static_cast<double>(h >> 11) / 9007199254740992.0 * 2.0 - 1.0;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SolverError("initial condition '" + name + "': bad parameter '" + item + "'");
    }
  }
  return out;
}

bool is_flat_identity(const GridSpec& s) {
  DiagMetric g = diag_metric(s.chart);
  std::array<double, 3> mid{};
  for (int a = 0; a < 3; ++a) mid[a] = 0.5 * (s.lo[a] + s.hi[a]);
  for (const auto& u : {s.lo, s.hi, mid}) {
    auto v = g.at(u);
    for (double x : v)
      if (std::abs(x - 1.0) > 1e-14) return false;
  }
  return true;
}

InitialField plane_wave(const GridSpec& s, std::array<double, 3> mode) {
  if (!is_flat_identity(s)) throw SolverError("plane_wave needs a chart with the identity metric");
  std::array<double, 3> k{};
  double kk = 0.0;
  for (int a = 0; a < 3; ++a) {
    k[a] = 2.0 * kPi * mode[a] / (s.hi[a] - s.lo[a]);
    kk += k[a] * k[a];
  }
  if (kk == 0.0) throw SolverError("plane_wave needs a nonzero mode");
  double kn = std::sqrt(kk);
  std::array<double, 3> kh{k[0] / kn, k[1] / kn, k[2] / kn};
  auto cross = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  std::array<double, 3> e = cross({0, 0, 1}, kh);
  double en = std::hypot(e[0], e[1], e[2]);
  if (en < 1e-8) {
    e = cross({0, 1, 0}, kh);
    en = std::hypot(e[0], e[1], e[2]);
  }
  for (double& x : e) x /= en;
  std::array<double, 3> bdir = cross(kh, e);
  double n = std::sqrt(s.epsilon * s.mu);
  double omega = s.c * kn / n;
  auto phase = [=](double t, const std::array<double, 3>& u) {
    double ph = -omega * t;
    for (int a = 0; a < 3; ++a) ph += k[a] * (u[a] - s.lo[a]);
    return ph;
  };
  InitialField f;
  f.E = [=](double t, const std::array<double, 3>& u) {
    double c = std::cos(phase(t, u));
    return std::array<double, 3>{e[0] * c, e[1] * c, e[2] * c};
  };
  f.B = [=](double t, const std::array<double, 3>& u) {
    double c = n * std::cos(phase(t, u));
    return std::array<double, 3>{bdir[0] * c, bdir[1] * c, bdir[2] * c};
  };
  f.A = [=](double t, const std::array<double, 3>& u) {
    double sn = n * std::sin(phase(t, u)) / kn;
    return std::array<double, 3>{e[0] * sn, e[1] * sn, e[2] * sn};
  };
  return f;
}

// Cartesian-uniform D from C = (1/2) D0 x r, pulled back to covariant C_i.
// On a flat identity chart the constant is sampled directly.
InitialField uniform_D(const GridSpec& s, std::array<double, 3> D0) {
  if (is_flat_identity(s)) {
    InitialField f;
    double eps = s.epsilon;
    f.E = [=](double, const std::array<double, 3>&) {
      return std::array<double, 3>{D0[0] / eps, D0[1] / eps, D0[2] / eps};
    };
    return f;
  }
  const Chart& ch = s.chart;
  std::vector<sym::CompiledExpr> x, jac;
  Matrix J = jacobian(ch);
  for (int a = 0; a < 3; ++a) {
    x.emplace_back(ch.embedding[a], ch.coords);
    for (int i = 0; i < 3; ++i) jac.emplace_back(J[a][i], ch.coords);
  }
  InitialField f;
  f.C = [=](double, const std::array<double, 3>& u) {
    std::span<const double> us(u.data(), 3);
    std::array<double, 3> r{x[0](us), x[1](us), x[2](us)};
    std::array<double, 3> C{0.5 * (D0[1] * r[2] - D0[2] * r[1]), 0.5 * (D0[2] * r[0] - D0[0] * r[2]),
                            0.5 * (D0[0] * r[1] - D0[1] * r[0])};
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a) out[i] += jac[a * 3 + i](us) * C[a];
    return out;
  };
  return f;
}

}  // namespace

InstabilityError::InstabilityError(std::uint64_t step, double time)
    : SolverError([&] {
        std::ostringstream os;
        os << "instability at step " << step << " (t = " << time << "): non-finite field value";
        return os.str();
      }()),
      step_(step) {}

GridSpec make_grid_spec(const Chart& chart, std::array<double, 3> lo, std::array<double, 3> hi,
                        std::array<std::size_t, 3> cells, double cfl) {
  GridSpec s;
  s.chart = chart;
  s.lo = lo;
  s.hi = hi;
  s.cells = cells;
  s.cfl = cfl;
  for (int a = 0; a < 3 && a < static_cast<int>(chart.dim()); ++a)
    s.bc[a] = chart.coords[a] == "phi" ? Boundary::Periodic : Boundary::PEC;
  return s;
}

double stable_dt(const GridSpec& s) {
  validate(s);
  DiagMetric g = diag_metric(s.chart);
  double worst = 0.0;
  std::array<double, 3> h{s.spacing(0), s.spacing(1), s.spacing(2)};
  for (std::size_t p0 = 0; p0 < s.cells[0]; ++p0)
    for (std::size_t p1 = 0; p1 < s.cells[1]; ++p1)
      for (std::size_t p2 = 0; p2 < s.cells[2]; ++p2) {
        std::array<double, 3> u{s.lo[0] + (p0 + 0.5) * h[0], s.lo[1] + (p1 + 0.5) * h[1],
                                s.lo[2] + (p2 + 0.5) * h[2]};
        auto gi = g.at(u);
        if (!usable(gi))
          throw SolverError("grid extents touch a singular set of chart '" + s.chart.name + "' near " +
                            coord_text(u));
        double sum = 0.0;
        for (int a = 0; a < 3; ++a) sum += 1.0 / (gi[a] * h[a] * h[a]);
        worst = std::max(worst, sum);
      }
  double v = s.c / std::sqrt(s.epsilon * s.mu);
  return s.cfl / (std::sqrt(worst) * v);
}

std::array<double, 3> GridField::position(Stagger s, int axis, std::size_t p0, std::size_t p1,
                                          std::size_t p2) const {
  std::array<std::size_t, 3> p{p0, p1, p2};
  std::array<double, 3> u{};
  for (int a = 0; a < 3; ++a) {
    bool half = s == Stagger::Cell || (s == Stagger::Edge && a == axis) || (s == Stagger::Face && a != axis);
    u[a] = spec.lo[a] + (static_cast<double>(p[a]) + (half ? 0.5 : 0.0)) * spec.spacing(a);
  }
  return u;
}

std::size_t GridField::count(int a, bool half) const {
  return (half || spec.bc[a] == Boundary::Periodic) ? spec.cells[a] : spec.cells[a] + 1;
}

std::vector<std::string> initial_names() {
  return {"zero", "plane_wave", "gaussian_pulse", "azimuthal", "uniform_D", "random"};
}

InitialField named_initial(const std::string& full, const GridSpec& s) {
  std::string name = full, arg;
  if (auto colon = full.find(':'); colon != std::string::npos) {
    name = full.substr(0, colon);
    arg = full.substr(colon + 1);
  }
  auto params = [&](std::size_t n, std::vector<double> dflt) {
    if (arg.empty()) return dflt;
    auto v = parse_numbers(arg, full);
    if (v.size() != n)
      throw SolverError("initial condition '" + full + "' expects " + std::to_string(n) + " parameter(s)");
    return v;
  };
  if (name == "zero") {
    if (!arg.empty()) throw SolverError("initial condition 'zero' takes no parameters");
    return {};
  }
  if (name == "plane_wave") {
    auto m = params(3, {1, 0, 0});
    return plane_wave(s, {m[0], m[1], m[2]});
  }
  if (name == "gaussian_pulse") {
    if (!arg.empty()) throw SolverError("initial condition 'gaussian_pulse' takes no parameters");
    std::array<double, 3> mid{}, sig{};
    for (int a = 0; a < 3; ++a) {
      mid[a] = 0.5 * (s.lo[a] + s.hi[a]);
      sig[a] = (s.hi[a] - s.lo[a]) / 8.0;
    }
    InitialField f;
    f.A = [=](double, const std::array<double, 3>& u) {
      double q = 0.0;
      for (int a = 0; a < 3; ++a) q += std::pow((u[a] - mid[a]) / sig[a], 2);
      return std::array<double, 3>{0.0, 0.0, std::exp(-q)};
    };
    return f;
  }
  if (name == "azimuthal") {
    double m = params(1, {1})[0];
    InitialField f;
    double lo = s.lo[0], len = s.hi[0] - s.lo[0];
    f.E = [=](double, const std::array<double, 3>& u) {
      return std::array<double, 3>{0.0, 0.0, std::sin(kPi * (u[0] - lo) / len) * std::cos(m * u[1])};
    };
    return f;
  }
  if (name == "uniform_D") {
    auto v = params(3, {1, 0, 0});
    return uniform_D(s, {v[0], v[1], v[2]});
  }
  if (name == "random") {
    auto seed = static_cast<std::uint64_t>(params(1, {20120101})[0]);
    InitialField f;
    f.E = [=](double, const std::array<double, 3>& u) {
      return std::array<double, 3>{hash_uniform(seed, 0, u), hash_uniform(seed, 1, u), hash_uniform(seed, 2, u)};
    };
    f.A = [=](double, const std::array<double, 3>& u) {
      return std::array<double, 3>{hash_uniform(seed, 3, u), hash_uniform(seed, 4, u), hash_uniform(seed, 5, u)};
    };
    return f;
  }
  std::string known;
  for (const auto& n : initial_names()) known += (known.empty() ? "" : ", ") + n;
  throw SolverError("unknown initial condition '" + name + "' (known: " + known + ")");
}

namespace {

// Allocation, metric factors and extent checks, all fields zero.
GridField empty_grid(const GridSpec& spec) {
  validate(spec);
  DiagMetric g = diag_metric(spec.chart);
  sym::CompiledExpr chart_sqrt_g(metric_from_chart(spec.chart).sqrt_abs_g, spec.chart.coords);
  GridField f;
  f.spec = spec;
  for (int a = 0; a < 3; ++a) f.shape[a] = spec.cells[a] + 1;
  std::size_t total = f.shape[0] * f.shape[1] * f.shape[2];
  auto alloc = [&](SiteArray& s, double v) { s.v.assign(total, v); };
  for (int i = 0; i < 3; ++i) {
    for (auto* s : {&f.E[i], &f.H[i], &f.d[i], &f.b[i], &f.j[i]}) alloc(*s, 0.0);
    for (auto* s : {&f.w_edge[i], &f.w_face[i], &f.sg_edge[i], &f.sg_face[i]}) alloc(*s, 1.0);
  }
  alloc(f.rho, 0.0);
  alloc(f.sg_node, 1.0);
  alloc(f.sg_cell, 1.0);

  auto metric_at = [&](const std::array<double, 3>& u) {
    auto gi = g.at(u);
    if (!usable(gi))
      throw SolverError("grid extents touch a singular set of chart '" + spec.chart.name + "' at " + coord_text(u));
    return gi;
  };
  auto sqrt_g = [](const std::array<double, 3>& gi) { return std::sqrt(gi[0] * gi[1] * gi[2]); };

  for (int i = 0; i < 3; ++i) {
    for_sites(f, edge_half(i), [&](const auto& p, std::size_t idx) {
      auto gi = metric_at(f.position(Stagger::Edge, i, p[0], p[1], p[2]));
      f.sg_edge[i][idx] = sqrt_g(gi);
      f.w_edge[i][idx] = sqrt_g(gi) / gi[i];
    });
    for_sites(f, face_half(i), [&](const auto& p, std::size_t idx) {
      auto gi = metric_at(f.position(Stagger::Face, i, p[0], p[1], p[2]));
      f.sg_face[i][idx] = sqrt_g(gi);
      f.w_face[i][idx] = gi[i] / sqrt_g(gi);
    });
  }
  for_sites(f, {false, false, false}, [&](const auto& p, std::size_t idx) {
    auto u = f.position(Stagger::Node, 0, p[0], p[1], p[2]);
    f.sg_node[idx] = sqrt_g(metric_at(u));
    // The chart's own sqrt g turns negative where the coordinates leave
    // its domain (r < 0), even when g_ii stay positive.
    if (!(chart_sqrt_g(std::span<const double>(u.data(), 3)) > 0.0))
      throw SolverError("grid extents leave the domain of chart '" + spec.chart.name + "' at " + coord_text(u));
  });
  for_sites(f, {true, true, true}, [&](const auto& p, std::size_t idx) {
    f.sg_cell[idx] = sqrt_g(metric_at(f.position(Stagger::Cell, 0, p[0], p[1], p[2])));
  });

  // A periodic axis must carry a metric that matches across the seam.
  for (int a = 0; a < 3; ++a) {
    if (spec.bc[a] != Boundary::Periodic) continue;
    std::array<double, 3> u0{}, u1{};
    for (int b = 0; b < 3; ++b) u0[b] = u1[b] = 0.5 * (spec.lo[b] + spec.hi[b]);
    u0[a] = spec.lo[a];
    u1[a] = spec.hi[a];
    auto g0 = metric_at(u0), g1 = metric_at(u1);
    for (int b = 0; b < 3; ++b)
      if (std::abs(g0[b] - g1[b]) > 1e-9 * std::max(1.0, std::abs(g0[b])))
        throw SolverError("periodic boundary along '" + spec.chart.coords[a] + "' but the metric of chart '" +
                          spec.chart.name + "' differs across it");
  }

  f.spec.dt = spec.dt > 0.0 ? spec.dt : stable_dt(spec);
  return f;
}

}  // namespace

GridField init_grid(const GridSpec& spec, const std::string& name) {
  GridField f = empty_grid(spec);
  apply_initial(f, named_initial(name, spec));
  return f;
}

GridField init_grid(const GridSpec& spec, const InitialField& init) {
  GridField f = empty_grid(spec);
  apply_initial(f, init);
  return f;
}

void apply_initial(GridField& f, const InitialField& init) {
  const GridSpec& spec = f.spec;
  std::size_t total = f.rho.v.size();
  auto alloc = [&](SiteArray& s, double v) { s.v.assign(total, v); };
  Stencil st(f);

  if (init.C) {
    std::array<SiteArray, 3> C;
    for (int k = 0; k < 3; ++k) {
      alloc(C[k], 0.0);
      for_sites(f, face_half(k), [&](const auto& p, std::size_t idx) {
        C[k][idx] = init.C(0.0, f.position(Stagger::Face, k, p[0], p[1], p[2]))[k];
      });
    }
    for (int i = 0; i < 3; ++i)
      for_sites(f, edge_half(i), [&](const auto& p, std::size_t idx) {
        if (!edge_on_wall(f, i, p)) f.d[i][idx] = curl_bwd(st, C, i, idx, p);
      });
    sync_E(f);
  } else if (init.E) {
    for (int i = 0; i < 3; ++i)
      for_sites(f, edge_half(i), [&](const auto& p, std::size_t idx) {
        if (edge_on_wall(f, i, p)) return;
        f.E[i][idx] = init.E(0.0, f.position(Stagger::Edge, i, p[0], p[1], p[2]))[i];
        f.d[i][idx] = spec.epsilon * f.w_edge[i][idx] * f.E[i][idx];
      });
  }

  if (init.A) {
    std::array<SiteArray, 3> A;
    for (int k = 0; k < 3; ++k) {
      alloc(A[k], 0.0);
      for_sites(f, edge_half(k), [&](const auto& p, std::size_t idx) {
        A[k][idx] = init.A(0.0, f.position(Stagger::Edge, k, p[0], p[1], p[2]))[k];
      });
    }
    for (int i = 0; i < 3; ++i)
      for_sites(f, face_half(i), [&](const auto& p, std::size_t idx) { f.b[i][idx] = curl_fwd(st, A, i, idx, p); });
  } else if (init.B) {
    for (int i = 0; i < 3; ++i)
      for_sites(f, face_half(i), [&](const auto& p, std::size_t idx) {
        f.b[i][idx] = f.sg_face[i][idx] * init.B(0.0, f.position(Stagger::Face, i, p[0], p[1], p[2]))[i];
      });
  }
  sync_H(f);

  if (init.rho)
    for_sites(f, {false, false, false}, [&](const auto& p, std::size_t idx) {
      f.rho[idx] = init.rho(0.0, f.position(Stagger::Node, 0, p[0], p[1], p[2]));
    });
}

void step(GridField& f, const CurrentFunc& current) {
  const Stencil st(f);
  const double dt = f.spec.dt, c = f.spec.c;

  auto half_b = [&] {
    for (int i = 0; i < 3; ++i)
      for_sites(f, face_half(i),
                [&](const auto& p, std::size_t idx) { f.b[i][idx] -= 0.5 * c * dt * curl_fwd(st, f.E, i, idx, p); });
    sync_H(f);
  };

  half_b();

  std::array<SiteArray, 3> flux;  // sqrt(g) j^i
  if (current) {
    double th = f.time + 0.5 * dt;
    for (int i = 0; i < 3; ++i) {
      flux[i].v.assign(f.j[i].v.size(), 0.0);
      for_sites(f, edge_half(i), [&](const auto& p, std::size_t idx) {
        if (edge_on_wall(f, i, p)) {
          f.j[i][idx] = 0.0;
          return;
        }
        f.j[i][idx] = current(th, f.position(Stagger::Edge, i, p[0], p[1], p[2]))[i];
        flux[i][idx] = f.sg_edge[i][idx] * f.j[i][idx];
      });
    }
  }
  for (int i = 0; i < 3; ++i)
    for_sites(f, edge_half(i), [&](const auto& p, std::size_t idx) {
      if (edge_on_wall(f, i, p)) return;
      double src = current ? 4.0 * kPi * flux[i][idx] : 0.0;
      f.d[i][idx] += dt * (c * curl_bwd(st, f.H, i, idx, p) - src);
    });
  if (current)
    for_sites(f, {false, false, false}, [&](const auto& p, std::size_t idx) {
      if (!interior_node(f, p[0], p[1], p[2])) return;
      double dv = 0.0;
      for (int a = 0; a < 3; ++a) dv += st.dbwd(flux[a], idx, a, p[a]);
      f.rho[idx] -= dt * dv / f.sg_node[idx];
    });
  sync_E(f);

  half_b();

  f.time += dt;
  ++f.step;
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < f.E[i].v.size(); ++k)
      if (!std::isfinite(f.E[i][k]) || !std::isfinite(f.b[i][k])) throw InstabilityError(f.step, f.time);
}

void run(GridField& f, std::uint64_t steps, const CurrentFunc& current,
         const std::function<void(const GridField&)>& after_step) {
  for (std::uint64_t n = 0; n < steps; ++n) {
    step(f, current);
    if (after_step) after_step(f);
  }
}

bool interior_node(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2) {
  std::array<std::size_t, 3> p{p0, p1, p2};
  for (int a = 0; a < 3; ++a)
    if (on_pec(f, a, p[a])) return false;
  return true;
}

double discrete_div_D(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2) {
  Stencil st(f);
  std::size_t idx = f.index(p0, p1, p2);
  std::array<std::size_t, 3> p{p0, p1, p2};
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += st.dbwd(f.d[a], idx, a, p[a]);
  return s / f.sg_node[idx];
}

double discrete_div_B(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2) {
  Stencil st(f);
  std::size_t idx = f.index(p0, p1, p2);
  std::array<std::size_t, 3> p{p0, p1, p2};
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += st.dfwd(f.b[a], idx, a, p[a]);
  return s / f.sg_cell[idx];
}

Diagnostics diagnostics(const GridField& f) {
  Diagnostics out;
  double vol = cell_volume(f.spec);
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto eh = edge_half(i), fh = face_half(i);
    for_sites(f, eh, [&](const auto& p, std::size_t idx) {
      w += quad_weight(f, eh, p) * f.E[i][idx] * f.d[i][idx];
      out.max_abs = std::max({out.max_abs, std::abs(f.E[i][idx]), std::abs(f.D(i, idx))});
    });
    for_sites(f, fh, [&](const auto& p, std::size_t idx) {
      w += quad_weight(f, fh, p) * f.b[i][idx] * f.H[i][idx];
      out.max_abs = std::max({out.max_abs, std::abs(f.B(i, idx)), std::abs(f.H[i][idx])});
    });
  }
  out.energy = w * vol / (8.0 * kPi);
  for_sites(f, {false, false, false}, [&](const auto& p, std::size_t idx) {
    if (!interior_node(f, p[0], p[1], p[2])) return;
    out.div_D_minus_4pi_rho =
        std::max(out.div_D_minus_4pi_rho, std::abs(discrete_div_D(f, p[0], p[1], p[2]) - 4.0 * kPi * f.rho[idx]));
  });
  for_sites(f, {true, true, true}, [&](const auto& p, std::size_t) {
    out.div_B = std::max(out.div_B, std::abs(discrete_div_B(f, p[0], p[1], p[2])));
  });
  return out;
}

double relative_l2_error(const GridField& f, const InitialField& exact) {
  if (!exact.E || !exact.B) throw SolverError("exact solution needs E and B");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto eh = edge_half(i), fh = face_half(i);
    for_sites(f, eh, [&](const auto& p, std::size_t idx) {
      double ex = exact.E(f.time, f.position(Stagger::Edge, i, p[0], p[1], p[2]))[i];
      double w = quad_weight(f, eh, p) * f.w_edge[i][idx];
      num += w * std::pow(f.E[i][idx] - ex, 2);
      den += w * ex * ex;
    });
    for_sites(f, fh, [&](const auto& p, std::size_t idx) {
      double ex = exact.B(f.time, f.position(Stagger::Face, i, p[0], p[1], p[2]))[i];
      double w = quad_weight(f, fh, p) * f.w_face[i][idx] * f.sg_face[i][idx] * f.sg_face[i][idx];
      num += w * std::pow(f.B(i, idx) - ex, 2);
      den += w * ex * ex;
    });
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

void axpy(double a, const GridField& x, GridField& y) {
  if (x.shape != y.shape) throw SolverError("axpy: grid shapes differ");
  auto go = [&](const SiteArray& s, SiteArray& t) {
    for (std::size_t k = 0; k < s.v.size(); ++k) t[k] += a * s[k];
  };
  for (int i = 0; i < 3; ++i) {
    go(x.E[i], y.E[i]);
    go(x.H[i], y.H[i]);
    go(x.d[i], y.d[i]);
    go(x.b[i], y.b[i]);
  }
  go(x.rho, y.rho);
}

// ------------------------------------------------------------- output

namespace {

template <class T>
void put(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw SolverError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFloat64 = 1;
constexpr std::uint32_t kComponents = 13;

}  // namespace

void write_snapshot(std::ostream& os, const GridField& f) {
  os.write("CVMX", 4);
  put<std::uint32_t>(os, kVersion);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(f.spec.cells[a]));
  put<std::uint32_t>(os, kFloat64);
  put<std::uint32_t>(os, kComponents);
  put<std::uint32_t>(os, 0);
  put<std::uint64_t>(os, f.step);
  put<double>(os, f.time);
  put<double>(os, f.spec.dt);
  put<std::uint64_t>(os, 0);
  std::size_t n = f.rho.v.size();
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) put<double>(os, f.E[i][k]);
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) put<double>(os, f.D(i, k));
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) put<double>(os, f.B(i, k));
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) put<double>(os, f.H[i][k]);
  for (std::size_t k = 0; k < n; ++k) put<double>(os, f.rho[k]);
}

void read_snapshot(std::istream& is, GridField& f) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CVMX", 4) != 0) throw SolverError("not a CVMX snapshot");
  if (get<std::uint32_t>(is) != kVersion) throw SolverError("unsupported CVMX version");
  for (int a = 0; a < 3; ++a)
    if (get<std::uint32_t>(is) != f.spec.cells[a]) throw SolverError("snapshot cell counts differ from the grid");
  if (get<std::uint32_t>(is) != kFloat64) throw SolverError("unsupported CVMX dtype");
  if (get<std::uint32_t>(is) != kComponents) throw SolverError("unexpected CVMX component count");
  get<std::uint32_t>(is);
  f.step = get<std::uint64_t>(is);
  f.time = get<double>(is);
  get<double>(is);
  get<std::uint64_t>(is);
  std::size_t n = f.rho.v.size();
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) f.E[i][k] = get<double>(is);
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) f.d[i][k] = get<double>(is) * f.sg_edge[i][k];
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) f.b[i][k] = get<double>(is) * f.sg_face[i][k];
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < n; ++k) f.H[i][k] = get<double>(is);
  for (std::size_t k = 0; k < n; ++k) f.rho[k] = get<double>(is);
}

void write_snapshot_csv(std::ostream& os, const GridField& f) {
  os << "p1,p2,p3,u1,u2,u3,E1,E2,E3,B1,B2,B3,D1,D2,D3,H1,H2,H3\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (std::size_t p0 = 0; p0 < f.spec.cells[0]; ++p0)
    for (std::size_t p1 = 0; p1 < f.spec.cells[1]; ++p1)
      for (std::size_t p2 = 0; p2 < f.spec.cells[2]; ++p2) {
        std::size_t idx = f.index(p0, p1, p2);
        os << p0 << ',' << p1 << ',' << p2;
        for (double u : f.position(Stagger::Node, 0, p0, p1, p2)) num(u);
        for (int i = 0; i < 3; ++i) num(f.E[i][idx]);
        for (int i = 0; i < 3; ++i) num(f.B(i, idx));
        for (int i = 0; i < 3; ++i) num(f.D(i, idx));
        for (int i = 0; i < 3; ++i) num(f.H[i][idx]);
        os << '\n';
      }
}

void write_diagnostics_header(std::ostream& os) { os << "step,time,energy,div_D_minus_4pi_rho,div_B,max_abs\n"; }

void write_diagnostics_row(std::ostream& os, const GridField& f, const Diagnostics& d) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.6e,%.6e,%.17g\n", static_cast<unsigned long long>(f.step), f.time,
                d.energy, d.div_D_minus_4pi_rho, d.div_B, d.max_abs);
  os << buf;
}

}  // namespace curvmax
