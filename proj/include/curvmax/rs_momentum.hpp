#ifndef CURVMAX_RS_MOMENTUM_HPP
#define CURVMAX_RS_MOMENTUM_HPP

// Complex (Riemann-Silberstein) form of the Maxwell equations, and the
// momentum representation on uniform periodic lattices.

#include <array>
#include <complex>
#include <functional>
#include <ostream>
#include <vector>

#include "curvmax/diffops.hpp"
#include "curvmax/report.hpp"

namespace curvmax {

using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;
using RVec3 = std::array<double, 3>;

/// Numeric field values at one point, all in one basis and variance.
struct FieldValues3 {
  RVec3 E{}, B{}, D{}, H{};
};

/// F = E + iB, G = D + iH.
struct RSField {
  CVec3 F{}, G{};
  Variance variance = Variance::Contravariant;
  Basis basis = Basis::Holonomic;
};

/// K = (G + F)/2, L = conj(G - F)/2.
struct KLPair {
  CVec3 K{}, L{};
};

struct MediumParams {
  double epsilon = 1.0;
  double mu = 1.0;
};

RSField to_rs(const FieldValues3& f, Variance v = Variance::Contravariant, Basis b = Basis::Holonomic);
FieldValues3 from_rs(const RSField& rs);
KLPair kl_from_rs(const RSField& rs);
/// G = K + conj(L), F = K - conj(L).
RSField rs_from_kl(const KLPair& kl);

struct SourceValues {
  double rho = 0.0;
  RVec3 j{};
};

using KLFunc = std::function<KLPair(double t, const RVec3& x)>;
using CFieldFunc = std::function<CVec3(double t, const RVec3& x)>;
using RFieldFunc = std::function<RVec3(double t, const RVec3& x)>;
using SourceFunc = std::function<SourceValues(double t, const RVec3& x)>;

/// scalar: div(K + L) - 4 pi rho = gauss_D + i gauss_B.
/// vector: -i [ -i d_0 (K + L) + curl (K - L) - i (4 pi/c) j ] = ampere - i faraday,
/// with d_0 = (1/c) d_t. Components contravariant in the chart of `m`;
/// derivatives by fourth-order central differences with step h.
struct RSResidual {
  Complex scalar;
  CVec3 vector{};
};

RSResidual rs_residual(const KLFunc& kl, const SourceFunc& src, const MetricData& m, double t, const RVec3& x,
                       double c = 1.0, double h = 1e-3);
/// Vacuum form with K = F, L = 0: div F - 4 pi rho and
/// -i [ -i d_0 F + curl F - i (4 pi/c) j ].
RSResidual rs_vacuum_residual(const CFieldFunc& F, const SourceFunc& src, const MetricData& m, double t,
                              const RVec3& x, double c = 1.0, double h = 1e-3);
/// Homogeneous medium: F = sqrt(eps) E + i B/sqrt(mu);
/// scalar div F - 4 pi rho/sqrt(eps);
/// vector -i [ curl F - i (4 pi sqrt(mu)/c) j - i (sqrt(eps mu)/c) d_t F ].
RSResidual isotropic_residual(const RFieldFunc& E, const RFieldFunc& B, const SourceFunc& src,
                              const MediumParams& medium, const MetricData& m, double t, const RVec3& x,
                              double c = 1.0, double h = 1e-3);

// ------------------------------------------------------------ lattices

/// Uniform periodic lattice on [0, L1) x [0, L2) x [0, L3); row-major,
/// index (i0 * n1 + i1) * n2 + i2.
struct Lattice {
  std::array<std::size_t, 3> n{};
  std::array<double, 3> length{1.0, 1.0, 1.0};

  std::size_t size() const { return n[0] * n[1] * n[2]; }
  double spacing(int axis) const { return length[axis] / static_cast<double>(n[axis]); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n[1] + j) * n[2] + k; }
  RVec3 point(std::size_t idx) const;
  /// Signed wavenumber 2 pi m / L with m in (-n/2, n/2].
  double wavenumber(int axis, std::size_t i) const;
  void validate() const;
};

using CGrid = std::vector<Complex>;

struct SpectralField {
  Lattice lattice;
  CGrid amp;
  /// k_axis at flattened mode index.
  double k(int axis, std::size_t idx) const;
};

/// Unitary DFT (1/sqrt(N) on both sides), exp(-i k x) forward.
SpectralField fft_forward(const Lattice& lat, const CGrid& samples);
CGrid fft_inverse(const SpectralField& s);
CGrid sample(const Lattice& lat, const std::function<Complex(const RVec3&)>& f);
/// i k_axis f-hat, the Nyquist mode of an even axis set to zero.
SpectralField spectral_derivative(const SpectralField& s, int axis);
/// max |fft(df) - i k fft(f)| over modes.
double spectral_derivative_deviation(const Lattice& lat, const CGrid& f, const CGrid& df, int axis);
double l2_norm(const CGrid& g);

/// Spectra of the Maxwell fields at one time. E, H covariant; D, B, j
/// contravariant; dB_dt, dD_dt the time derivatives (analytic, or from
/// central_time_derivative).
struct SpectralMaxwell {
  std::array<SpectralField, 3> E, H, D, B, j, dB_dt, dD_dt;
  SpectralField rho;
};

struct SpectralResiduals {
  std::array<SpectralField, 3> faraday, ampere;
  SpectralField gauss_D, gauss_B;
};

/// i(1/sqrt g) eps^{ijk} k_j E_k + (1/c) dB^i/dt, and the Ampere and Gauss
/// analogues, mode by mode. `g_lo` empty means the identity; any
/// non-constant entry throws UnsupportedError.
SpectralResiduals maxwell_k_residual(const SpectralMaxwell& s, double c = 1.0, const Matrix& g_lo = {});
/// (after - before)/(2 dt) for snapshots taken at t - dt and t + dt.
SpectralField central_time_derivative(const SpectralField& before, const SpectralField& after, double dt);

/// Rows "k1,k2,k3,component,re,im".
void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<std::string, const SpectralField*>>& fields);

}  // namespace curvmax

#endif  // CURVMAX_RS_MOMENTUM_HPP
