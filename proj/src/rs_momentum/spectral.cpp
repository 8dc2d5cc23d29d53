#include <fftw3.h>

#include <cmath>
#include <iomanip>
#include <mutex>
#include <stdexcept>

#include "curvmax/rs_momentum.hpp"

namespace curvmax {

RVec3 Lattice::point(std::size_t idx) const {
  std::size_t k = idx % n[2], j = (idx / n[2]) % n[1], i = idx / (n[1] * n[2]);
  return {i * spacing(0), j * spacing(1), k * spacing(2)};
}

double Lattice::wavenumber(int axis, std::size_t i) const {
  long m = static_cast<long>(i);
  long N = static_cast<long>(n[axis]);
  if (m > N / 2) m -= N;
  return 2 * M_PI * static_cast<double>(m) / length[axis];
}

void Lattice::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (n[a] == 0) throw std::invalid_argument("lattice size must be positive on every axis");
    if (!(length[a] > 0)) throw std::invalid_argument("lattice extent must be positive on every axis");
  }
}

double SpectralField::k(int axis, std::size_t idx) const {
  const auto& n = lattice.n;
  std::size_t c[3] = {idx / (n[1] * n[2]), (idx / n[2]) % n[1], idx % n[2]};
  return lattice.wavenumber(axis, c[axis]);
}

namespace {

std::mutex plan_mutex;  // FFTW planning is not thread-safe

CGrid transform(const Lattice& lat, const CGrid& in, int sign) {
  lat.validate();
  if (in.size() != lat.size()) throw std::invalid_argument("sample count does not match the lattice");
  CGrid out(in.size());
  CGrid work = in;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_3d(static_cast<int>(lat.n[0]), static_cast<int>(lat.n[1]), static_cast<int>(lat.n[2]),
                            reinterpret_cast<fftw_complex*>(work.data()), reinterpret_cast<fftw_complex*>(out.data()),
                            sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  double norm = 1.0 / std::sqrt(static_cast<double>(lat.size()));
  for (auto& z : out) z *= norm;
  return out;
}

}  // namespace

SpectralField fft_forward(const Lattice& lat, const CGrid& samples) {
  return {lat, transform(lat, samples, FFTW_FORWARD)};
}

CGrid fft_inverse(const SpectralField& s) { return transform(s.lattice, s.amp, FFTW_BACKWARD); }

CGrid sample(const Lattice& lat, const std::function<Complex(const RVec3&)>& f) {
  lat.validate();
  CGrid g(lat.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(lat.point(i));
  return g;
}

SpectralField spectral_derivative(const SpectralField& s, int axis) {
  SpectralField d = s;
  const Complex i(0, 1);
  std::size_t N = s.lattice.n[axis];
  for (std::size_t m = 0; m < d.amp.size(); ++m) {
    const auto& n = s.lattice.n;
    std::size_t c[3] = {m / (n[1] * n[2]), (m / n[2]) % n[1], m % n[2]};
    bool nyquist = N % 2 == 0 && c[axis] == N / 2;
    d.amp[m] = nyquist ? Complex(0) : i * s.k(axis, m) * s.amp[m];
  }
  return d;
}

double spectral_derivative_deviation(const Lattice& lat, const CGrid& f, const CGrid& df, int axis) {
  auto lhs = fft_forward(lat, df);
  auto rhs = spectral_derivative(fft_forward(lat, f), axis);
  double e = 0;
  for (std::size_t m = 0; m < lhs.amp.size(); ++m) e = std::max(e, std::abs(lhs.amp[m] - rhs.amp[m]));
  return e;
}

double l2_norm(const CGrid& g) {
  double s = 0;
  for (auto z : g) s += std::norm(z);
  return std::sqrt(s);
}

namespace {

SpectralField zeros_like(const SpectralField& s) { return {s.lattice, CGrid(s.amp.size())}; }

double constant_sqrt_g(const Matrix& g) {
  if (g.empty()) return 1.0;
  if (g.size() != 3) throw std::invalid_argument("momentum representation needs a 3x3 metric");
  for (const auto& row : g)
    for (const auto& e : row)
      if (!sym::free_symbols(e).empty())
        throw UnsupportedError("momentum representation is supported only for a constant metric");
  double d = sym::eval_expr(determinant(g), {});
  if (!(d > 0)) throw std::invalid_argument("metric determinant must be positive");
  return std::sqrt(d);
}

}  // namespace

SpectralResiduals maxwell_k_residual(const SpectralMaxwell& s, double c, const Matrix& g_lo) {
  double sg = constant_sqrt_g(g_lo);
  const Complex I(0, 1);
  SpectralResiduals r;
  for (int a = 0; a < 3; ++a) {
    r.faraday[a] = zeros_like(s.rho);
    r.ampere[a] = zeros_like(s.rho);
  }
  r.gauss_D = zeros_like(s.rho);
  r.gauss_B = zeros_like(s.rho);
  std::size_t N = s.rho.amp.size();
  for (std::size_t m = 0; m < N; ++m) {
    double k[3] = {s.rho.k(0, m), s.rho.k(1, m), s.rho.k(2, m)};
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3, l = (i + 2) % 3;
      Complex ce = I * (k[j] * s.E[l].amp[m] - k[l] * s.E[j].amp[m]) / sg;
      Complex ch = I * (k[j] * s.H[l].amp[m] - k[l] * s.H[j].amp[m]) / sg;
      r.faraday[i].amp[m] = ce + s.dB_dt[i].amp[m] / c;
      r.ampere[i].amp[m] = ch - s.dD_dt[i].amp[m] / c - 4 * M_PI / c * s.j[i].amp[m];
    }
    Complex dd = 0, db = 0;
    for (int i = 0; i < 3; ++i) {
      dd += I * k[i] * s.D[i].amp[m];
      db += I * k[i] * s.B[i].amp[m];
    }
    r.gauss_D.amp[m] = dd - 4 * M_PI * s.rho.amp[m];
    r.gauss_B.amp[m] = db;
  }
  return r;
}

SpectralField central_time_derivative(const SpectralField& before, const SpectralField& after, double dt) {
  if (before.amp.size() != after.amp.size()) throw std::invalid_argument("snapshot sizes differ");
  SpectralField d = before;
  for (std::size_t m = 0; m < d.amp.size(); ++m) d.amp[m] = (after.amp[m] - before.amp[m]) / (2 * dt);
  return d;
}

void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<std::string, const SpectralField*>>& fields) {
  os << "k1,k2,k3,component,re,im\n";
  os << std::setprecision(17);
  for (const auto& [name, f] : fields)
    for (std::size_t m = 0; m < f->amp.size(); ++m)
      os << f->k(0, m) << "," << f->k(1, m) << "," << f->k(2, m) << "," << name << "," << f->amp[m].real() << ","
         << f->amp[m].imag() << "\n";
}

}  // namespace curvmax
