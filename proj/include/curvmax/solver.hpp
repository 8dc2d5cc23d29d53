#ifndef CURVMAX_SOLVER_HPP
#define CURVMAX_SOLVER_HPP

// Staggered-grid leapfrog integrator for the 3-vector Maxwell equations on
// an orthogonal chart. Coordinates are uniform in chart space; metric
// factors enter per site. Densitized fluxes b^i = sqrt(g) B^i and
// d^i = sqrt(g) D^i make the discrete curl a pure difference of covariant
// edge values, so div b telescopes to zero.
//
// Site layout (p a lattice index, "+" a half offset):
//   E_i, d^i, j^i   half along i, integer along the other two axes
//   B^i, H_i        integer along i, half along the other two
//   rho             integer along all axes

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvmax/chart.hpp"

namespace curvmax {

enum class Boundary { Periodic, PEC };

struct GridSpec {
  Chart chart;
  std::array<double, 3> lo{}, hi{};
  std::array<std::size_t, 3> cells{};
  std::array<Boundary, 3> bc{Boundary::PEC, Boundary::PEC, Boundary::PEC};
  double cfl = 0.5;
  double c = 1.0;
  double epsilon = 1.0;
  double mu = 1.0;
  /// 0 means derive from the CFL number; set explicitly to override.
  double dt = 0.0;

  double spacing(int a) const { return (hi[a] - lo[a]) / static_cast<double>(cells[a]); }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public SolverError {
 public:
  InstabilityError(std::uint64_t step, double time);
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

/// Grid spec for the given chart: periodic along the azimuth (a coordinate
/// named phi), PEC on every other axis.
GridSpec make_grid_spec(const Chart& chart, std::array<double, 3> lo, std::array<double, 3> hi,
                        std::array<std::size_t, 3> cells, double cfl = 0.5);
/// CFL * min over cell centres of (sum_i g^ii / h_i^2)^(-1/2) / c.
double stable_dt(const GridSpec& spec);

enum class Stagger { Edge, Face, Node, Cell };

/// One scalar array over the (N1+1) x (N2+1) x (N3+1) allocation.
struct SiteArray {
  std::vector<double> v;
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

struct GridField {
  GridSpec spec;
  std::array<std::size_t, 3> shape{};  // N + 1 per axis
  std::array<SiteArray, 3> E, H;  // covariant
  std::array<SiteArray, 3> d, b;  // densitized, sqrt(g) D^i and sqrt(g) B^i
  std::array<SiteArray, 3> j;     // last current applied, contravariant
  SiteArray rho;
  double time = 0.0;
  std::uint64_t step = 0;

  // Metric factors per site.
  std::array<SiteArray, 3> w_edge;  // sqrt(g) g^ii at E_i sites
  std::array<SiteArray, 3> w_face;  // g_ii / sqrt(g) at B^i sites
  std::array<SiteArray, 3> sg_edge, sg_face;
  SiteArray sg_node, sg_cell;

  std::size_t index(std::size_t p0, std::size_t p1, std::size_t p2) const {
    return (p0 * shape[1] + p1) * shape[2] + p2;
  }
  /// Chart coordinates of a site of the given staggering; `axis` picks the
  /// component for Edge and Face.
  std::array<double, 3> position(Stagger s, int axis, std::size_t p0, std::size_t p1, std::size_t p2) const;
  /// Number of live sites along `a` for a half or integer position.
  std::size_t count(int a, bool half) const;
  double D(int i, std::size_t idx) const { return d[i][idx] / sg_edge[i][idx]; }
  double B(int i, std::size_t idx) const { return b[i][idx] / sg_face[i][idx]; }
};

/// Analytic initial data: covariant E_i and contravariant B^i at a point,
/// and optionally a covariant vector potential A_i with B = curl A. When
/// A is present, B is the discrete curl of A sampled on edges. Likewise
/// C_i with D = curl C replaces E, sampled on face sites.
struct InitialField {
  using VecFn = std::function<std::array<double, 3>(double t, const std::array<double, 3>& u)>;
  VecFn E, B, A, C;
  std::function<double(double t, const std::array<double, 3>& u)> rho;
};

/// Contravariant current density j^i(t, u).
using CurrentFunc = std::function<std::array<double, 3>(double t, const std::array<double, 3>& u)>;

/// Named initial conditions:
///   zero
///   plane_wave[:m1,m2,m3]   Cartesian plane wave with integer mode numbers
///                           over the box (default 1,0,0), unit amplitude
///   gaussian_pulse          magnetic pulse from a Gaussian potential
///   azimuthal[:m]           E_3 = sin(pi s) cos(m u2), s the scaled u1
///   uniform_D[:a,b,c]       Cartesian-uniform D (default 1,0,0) from a
///                           potential, so its discrete divergence is zero
///   random[:seed]           random edge E and potential, PEC-consistent
InitialField named_initial(const std::string& name, const GridSpec& spec);
std::vector<std::string> initial_names();

/// Samples the field, precomputes metric factors and checks the spec.
GridField init_grid(const GridSpec& spec, const InitialField& init);
GridField init_grid(const GridSpec& spec, const std::string& name);
/// Samples `init` into a freshly initialized (all-zero) grid.
void apply_initial(GridField& f, const InitialField& init);

/// Leapfrog step: half B from curl E, full D from curl H and j, E from D,
/// second half B. `current` may be empty. Throws InstabilityError when a
/// value turns non-finite.
void step(GridField& f, const CurrentFunc& current = {});
void run(GridField& f, std::uint64_t steps, const CurrentFunc& current = {},
         const std::function<void(const GridField&)>& after_step = {});

struct Diagnostics {
  double energy = 0.0;
  double div_D_minus_4pi_rho = 0.0;  // max abs over interior nodes
  double div_B = 0.0;                // max abs over cells
  double max_abs = 0.0;
};

Diagnostics diagnostics(const GridField& f);
/// (1/sqrt g) sum_i Delta_i (sqrt g D^i) at a node, and over cells for B.
double discrete_div_D(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2);
double discrete_div_B(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2);
/// True for nodes where div D is defined (not on a PEC face).
bool interior_node(const GridField& f, std::size_t p0, std::size_t p1, std::size_t p2);

/// Relative L2 distance of E and B to the analytic field at f.time, with
/// the same quadrature weights as the energy.
double relative_l2_error(const GridField& f, const InitialField& exact);

/// y <- a*x + y over all field arrays (shapes must match).
void axpy(double a, const GridField& x, GridField& y);

// ------------------------------------------------------------- output

/// 64-byte little-endian header: "CVMX", u32 version, u32 N1, N2, N3,
/// u32 dtype (1 = float64), u32 component count, u64 step, f64 time,
/// f64 dt, then padding. Payload: 13 float64 arrays over the allocation,
/// row-major: E_i, D^i, B^i, H_i, rho.
void write_snapshot(std::ostream& os, const GridField& f);
/// Loads field values into `f`, which must have the same cell counts.
void read_snapshot(std::istream& is, GridField& f);
/// Rows "p1,p2,p3,u1,u2,u3,E1..E3,B1..B3,D1..D3,H1..H3" over cell indices;
/// each component at its own staggered site, coordinates of the node.
void write_snapshot_csv(std::ostream& os, const GridField& f);
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const GridField& f, const Diagnostics& d);

}  // namespace curvmax

#endif  // CURVMAX_SOLVER_HPP
