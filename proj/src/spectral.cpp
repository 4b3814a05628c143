#include "pemda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <numbers>

#include <fmt/format.h>

#include "fft_engine.hpp"
#include "pemda/errors.hpp"

namespace pemda {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// e^{i pi q z_k} = (-1)^q e^{2 pi i q k / nz} because z_k = -1 + 2k/nz.
double z_phase(int iz) { return (iz % 2 == 0) ? 1.0 : -1.0; }

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* op) {
  if (!a.grid().same_shape(b.grid())) {
    throw ValidationError(fmt::format("{}: fields live on different grids", op));
  }
}

}  // namespace

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// ---------------------------------------------------------------------------
// FftEngine

FftEngine::FftEngine(int nx, int ny, int nz) : nx_(nx), ny_(ny), nz_(nz) {
  const std::size_t nreal = std::size_t(nx) * ny * nz;
  const std::size_t ncplx = std::size_t(nx / 2 + 1) * ny * nz;
  double* r = fftw_alloc_real(nreal);
  fftw_complex* c = fftw_alloc_complex(ncplx);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c_ = fftw_plan_dft_r2c_3d(nz, ny, nx, r, c, flags);
    c2r_ = fftw_plan_dft_c2r_3d(nz, ny, nx, c, r, flags);
  }
  fftw_free(r);
  fftw_free(c);
  if (r2c_ == nullptr || c2r_ == nullptr) {
    throw Error(fmt::format("FFTW planning failed for {}x{}x{}", nx, ny, nz));
  }
}

std::shared_ptr<const FftEngine> FftEngine::shared(int nx, int ny, int nz) {
  static std::mutex m;
  // Never destroyed, so no plan outlives the planner mutex at exit.
  static auto* cache = new std::map<std::tuple<int, int, int>, std::shared_ptr<const FftEngine>>;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = (*cache)[{nx, ny, nz}];
  if (slot) return slot;
  auto e = std::make_shared<const FftEngine>(nx, ny, nz);
  slot = e;
  return e;
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(r2c_);
  fftw_destroy_plan(c2r_);
}

void FftEngine::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  // FFTW does not write to the input of an out-of-place r2c transform.
  fftw_execute_dft_r2c(r2c_, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void FftEngine::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int nx, int ny, int nz, double L1, double L2, double dealias_fraction)
    : nx_(nx), ny_(ny), nz_(nz), L1_(L1), L2_(L2), dealias_fraction_(dealias_fraction) {
  for (int n : {nx, ny, nz}) {
    if (n < 4 || n % 2 != 0) {
      throw ValidationError(fmt::format("grid counts must be even and >= 4 (got {})", n));
    }
  }
  if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) || !std::isfinite(L2)) {
    throw ValidationError("horizontal periods must be positive and finite");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ValidationError("dealias_fraction must lie in (0, 1]");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  kx_.resize(nxh());
  for (int i = 0; i < nxh(); ++i) kx_[i] = two_pi * mode_x(i) / L1_;
  ky_.resize(ny_);
  for (int i = 0; i < ny_; ++i) ky_[i] = two_pi * mode_y(i) / L2_;
  kz_.resize(nz_);
  for (int i = 0; i < nz_; ++i) kz_[i] = std::numbers::pi * mode_z(i);
  fft_ = FftEngine::shared(nx_, ny_, nz_);
}

bool Grid::dealias_kept(int ix, int iy, int iz) const {
  const double tol = 1e-12;
  return std::abs(mode_x(ix)) <= dealias_fraction_ * nx_ / 2 + tol &&
         std::abs(mode_y(iy)) <= dealias_fraction_ * ny_ / 2 + tol &&
         std::abs(mode_z(iz)) <= dealias_fraction_ * nz_ / 2 + tol;
}

Grid Grid::padded(double factor) const {
  auto up = [factor](int n) {
    int m = static_cast<int>(std::ceil(n * factor - 1e-9));
    return m % 2 == 0 ? m : m + 1;
  };
  return Grid(up(nx_), up(ny_), up(nz_), L1_, L2_, dealias_fraction_);
}

bool Grid::same_shape(const Grid& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_ && L1_ == o.L1_ && L2_ == o.L2_;
}

// ---------------------------------------------------------------------------
// Fields

PhysicalField::PhysicalField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.physical_size()) {
    throw ValidationError("physical field size does not match grid");
  }
}

SpectralField::SpectralField(Grid grid, Parity parity)
    : grid_(std::move(grid)), parity_(parity), coeffs_(grid_.spectral_size()) {}

SpectralField::SpectralField(Grid grid, Parity parity, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), parity_(parity), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.spectral_size()) {
    throw ValidationError("coefficient array size does not match grid");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) { return axpy(1.0, o); }
SpectralField& SpectralField::operator-=(const SpectralField& o) { return axpy(-1.0, o); }

SpectralField& SpectralField::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& o) {
  require_same_grid(*this, o, "axpy");
  if (o.parity_ != parity_) {
    throw ValidationError("cannot combine fields of different parity");
  }
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * o.coeffs_[i];
  return *this;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }

// ---------------------------------------------------------------------------
// Transforms

PhysicalField transform_to_physical(const SpectralField& f) {
  if (!f.all_finite()) throw NonFiniteError("transform_to_physical: non-finite coefficients");
  const Grid& g = f.grid();
  std::vector<Complex> work(f.coeffs().begin(), f.coeffs().end());
  const int nxh = g.nxh();
  for (int iz = 1; iz < g.nz(); iz += 2) {
    Complex* plane = work.data() + std::size_t(iz) * g.ny() * nxh;
    for (int k = 0; k < g.ny() * nxh; ++k) plane[k] = -plane[k];
  }
  PhysicalField out(g);
  g.fft().inverse(work, out.values);
  return out;
}

SpectralField transform_to_spectral(const PhysicalField& f, Parity parity) {
  const Grid& g = f.grid;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw NonFiniteError("transform_to_spectral: non-finite samples");
  }
  SpectralField out(g, parity);
  g.fft().forward(f.values, out.coeffs());
  const double inv_n = 1.0 / static_cast<double>(g.physical_size());
  const int nxh = g.nxh();
  auto c = out.coeffs();
  for (int iz = 0; iz < g.nz(); ++iz) {
    const double s = z_phase(iz) * inv_n;
    Complex* plane = c.data() + std::size_t(iz) * g.ny() * nxh;
    for (int k = 0; k < g.ny() * nxh; ++k) plane[k] *= s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differential operators

namespace {

template <typename Fn>
SpectralField map_modes(const SpectralField& f, Parity out_parity, Fn&& fn) {
  const Grid& g = f.grid();
  SpectralField out(g, out_parity);
  auto src = f.coeffs();
  auto dst = out.coeffs();
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nxh(); ++ix) {
        const std::size_t i = g.spectral_index(ix, iy, iz);
        dst[i] = fn(ix, iy, iz, src[i]);
      }
  return out;
}

}  // namespace

SpectralField ddx(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, f.parity(), [&](int ix, int, int, Complex c) {
    return ix == g.nx() / 2 ? Complex{} : Complex(0.0, g.kx(ix)) * c;
  });
}

SpectralField ddy(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, f.parity(), [&](int, int iy, int, Complex c) {
    return iy == g.ny() / 2 ? Complex{} : Complex(0.0, g.ky(iy)) * c;
  });
}

SpectralField ddz(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, flipped(f.parity()), [&](int, int, int iz, Complex c) {
    return iz == g.nz() / 2 ? Complex{} : Complex(0.0, g.kz(iz)) * c;
  });
}

SpectralField laplacian_h(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, f.parity(), [&](int ix, int iy, int, Complex c) {
    return -(g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy)) * c;
  });
}

SpectralField ddz2(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, f.parity(), [&](int, int, int iz, Complex c) { return -g.kz(iz) * g.kz(iz) * c; });
}

SpectralField dealias(const SpectralField& f) {
  const Grid& g = f.grid();
  return map_modes(f, f.parity(), [&](int ix, int iy, int iz, Complex c) {
    return g.dealias_kept(ix, iy, iz) ? c : Complex{};
  });
}

SpectralField project_parity(const SpectralField& f, Parity parity) {
  const Grid& g = f.grid();
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  auto src = f.coeffs();
  return map_modes(f, parity, [&](int ix, int iy, int iz, Complex c) {
    const Complex r = src[g.spectral_index(ix, iy, g.reflect_z(iz))];
    return 0.5 * (c + sign * r);
  });
}

SpectralField integrate_z_from_zero(const SpectralField& f, double scale) {
  const Grid& g = f.grid();
  const double mean_norm = z_mean_norm(f);
  const double threshold = 1e-10 * std::max(l2_norm(f), scale);
  if (mean_norm > threshold) {
    throw SolvabilityError(
        fmt::format("integrate_z_from_zero: z-mean mode {:.3e} exceeds solvability tolerance {:.3e}",
                    mean_norm, threshold),
        mean_norm);
  }
  SpectralField out(g, flipped(f.parity()));
  auto src = f.coeffs();
  auto dst = out.coeffs();
  const int nyq = g.nz() / 2;
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nxh(); ++ix) {
      // int_0^z e^{i pi q s} ds = (e^{i pi q z} - 1) / (i pi q)
      Complex constant{};
      for (int iz = 0; iz < g.nz(); ++iz) {
        const std::size_t i = g.spectral_index(ix, iy, iz);
        if (iz == 0 || iz == nyq) {
          dst[i] = Complex{};
          continue;
        }
        const Complex a = src[i] / Complex(0.0, g.kz(iz));
        dst[i] = a;
        constant -= a;
      }
      dst[g.spectral_index(ix, iy, 0)] = constant;
    }
  return out;
}

SpectralField resample(const SpectralField& f, const Grid& target) {
  const Grid& src = f.grid();
  SpectralField out(target, f.parity());
  for (int iz = 0; iz < target.nz(); ++iz) {
    const int q = target.mode_z(iz);
    if (2 * std::abs(q) >= src.nz() || 2 * std::abs(q) >= target.nz()) continue;
    const int sz = q >= 0 ? q : q + src.nz();
    for (int iy = 0; iy < target.ny(); ++iy) {
      const int n = target.mode_y(iy);
      if (2 * std::abs(n) >= src.ny() || 2 * std::abs(n) >= target.ny()) continue;
      const int sy = n >= 0 ? n : n + src.ny();
      for (int ix = 0; ix < target.nxh(); ++ix) {
        if (2 * ix >= src.nx() || 2 * ix >= target.nx()) continue;
        out.at(ix, iy, iz) = f.at(ix, sy, sz);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms

double inner_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b, "inner_product");
  const Grid& g = a.grid();
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  double sum = 0.0;
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nxh(); ++ix) {
        const std::size_t i = g.spectral_index(ix, iy, iz);
        sum += g.parseval_weight(ix) * (ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag());
      }
  return g.volume() * sum;
}

double l2_norm_squared(const SpectralField& f) {
  const Grid& g = f.grid();
  auto c = f.coeffs();
  double sum = 0.0;
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nxh(); ++ix) sum += g.parseval_weight(ix) * std::norm(c[g.spectral_index(ix, iy, iz)]);
  return g.volume() * sum;
}

double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_squared(f)); }

double z_mean_norm(const SpectralField& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nxh(); ++ix) sum += g.parseval_weight(ix) * std::norm(f.at(ix, iy, 0));
  return std::sqrt(g.volume() * sum);
}

double parity_defect(const SpectralField& f) {
  const double n = l2_norm(f);
  if (n == 0.0) return 0.0;
  return l2_norm(f - project_parity(f, f.parity())) / n;
}

double max_abs(const PhysicalField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace pemda
