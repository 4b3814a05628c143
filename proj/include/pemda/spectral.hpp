#pragma once

// Periodic slab (0,L1) x (0,L2) x (-1,1) with Fourier transforms in all three
// directions. Horizontal collocation points are x_i = i L1 / nx,
// y_j = j L2 / ny; vertical points are z_k = -1 + 2k / nz.
//
// Modal contract: a field is f(x,y,z) = sum_{m,n,q} c(m,n,q) e^{i(kx x + ky y + kz z)}
// with kx = 2 pi m / L1, ky = 2 pi n / L2, kz = pi q. Coefficients are stored
// for m = 0..nx/2 (real-to-complex half spectrum) in [q][n][m] order, with n
// and q wrapped into [0, ny) and [0, nz). An Even field is a cosine series in
// z (c(m,n,q) = c(m,n,-q)), an Odd field a sine series.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pemda {

using Complex = std::complex<double>;

enum class Parity { Even, Odd };

inline Parity flipped(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }
const char* to_string(Parity p);

class FftEngine;

class Grid {
 public:
  Grid(int nx, int ny, int nz, double L1, double L2, double dealias_fraction = 2.0 / 3.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  int nxh() const { return nx_ / 2 + 1; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  static constexpr double Lz() { return 2.0; }
  double dealias_fraction() const { return dealias_fraction_; }
  double volume() const { return L1_ * L2_ * Lz(); }

  std::size_t physical_size() const { return std::size_t(nx_) * ny_ * nz_; }
  std::size_t spectral_size() const { return std::size_t(nxh()) * ny_ * nz_; }

  std::size_t spectral_index(int ix, int iy, int iz) const {
    return (std::size_t(iz) * ny_ + iy) * nxh() + ix;
  }
  std::size_t physical_index(int ix, int iy, int iz) const {
    return (std::size_t(iz) * ny_ + iy) * nx_ + ix;
  }

  // Signed mode numbers of a storage index.
  int mode_x(int ix) const { return ix; }
  int mode_y(int iy) const { return iy <= ny_ / 2 ? iy : iy - ny_; }
  int mode_z(int iz) const { return iz <= nz_ / 2 ? iz : iz - nz_; }

  double kx(int ix) const { return kx_[ix]; }
  double ky(int iy) const { return ky_[iy]; }
  double kz(int iz) const { return kz_[iz]; }

  // Storage index of the z-reflected mode (q -> -q).
  int reflect_z(int iz) const { return iz == 0 ? 0 : nz_ - iz; }

  bool is_nyquist(int ix, int iy, int iz) const {
    return ix == nx_ / 2 || iy == ny_ / 2 || iz == nz_ / 2;
  }
  // True when the mode survives the dealiasing cutoff.
  bool dealias_kept(int ix, int iy, int iz) const;

  // Multiplicity of a stored mode in Parseval sums (conjugate partner counted).
  double parseval_weight(int ix) const { return (ix == 0 || ix == nx_ / 2) ? 1.0 : 2.0; }

  double x(int ix) const { return ix * L1_ / nx_; }
  double y(int iy) const { return iy * L2_ / ny_; }
  double z(int iz) const { return -1.0 + 2.0 * iz / nz_; }

  // Grid with every count scaled by `factor` and rounded up to an even number.
  Grid padded(double factor) const;

  bool same_shape(const Grid& other) const;

  const FftEngine& fft() const { return *fft_; }

 private:
  int nx_, ny_, nz_;
  double L1_, L2_;
  double dealias_fraction_;
  std::vector<double> kx_, ky_, kz_;
  std::shared_ptr<const FftEngine> fft_;
};

/// Real samples on the collocation grid, x fastest.
struct PhysicalField {
  Grid grid;
  std::vector<double> values;

  explicit PhysicalField(Grid g) : grid(std::move(g)), values(grid.physical_size(), 0.0) {}
  PhysicalField(Grid g, std::vector<double> v);
};

class SpectralField {
 public:
  SpectralField(Grid grid, Parity parity);
  SpectralField(Grid grid, Parity parity, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex& at(int ix, int iy, int iz) { return coeffs_[grid_.spectral_index(ix, iy, iz)]; }
  Complex at(int ix, int iy, int iz) const { return coeffs_[grid_.spectral_index(ix, iy, iz)]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  // this += a * o
  SpectralField& axpy(double a, const SpectralField& o);

  bool all_finite() const;

 private:
  Grid grid_;
  Parity parity_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);
SpectralField operator-(SpectralField a);

PhysicalField transform_to_physical(const SpectralField& f);
SpectralField transform_to_spectral(const PhysicalField& f, Parity parity);

SpectralField ddx(const SpectralField& f);
SpectralField ddy(const SpectralField& f);
SpectralField ddz(const SpectralField& f);
/// Horizontal Laplacian dxx + dyy.
SpectralField laplacian_h(const SpectralField& f);
SpectralField ddz2(const SpectralField& f);

SpectralField dealias(const SpectralField& f);

/// Parity-pure part (f(x,y,z) +- f(x,y,-z)) / 2, tagged with `parity`.
SpectralField project_parity(const SpectralField& f, Parity parity);

/// F(x,y,z) = int_0^z f(x,y,s) ds, mode-exact. The result has the flipped
/// parity. Throws SolvabilityError when the z-mean mode of f exceeds
/// 1e-10 * max(||f||_2, scale).
SpectralField integrate_z_from_zero(const SpectralField& f, double scale = 0.0);

/// Copy of f on another grid; modes present on both grids are kept, the rest
/// are zero. Nyquist modes of the smaller grid are dropped.
SpectralField resample(const SpectralField& f, const Grid& target);

// Parseval-based integrals over the domain.
double inner_product(const SpectralField& a, const SpectralField& b);
double l2_norm_squared(const SpectralField& f);
double l2_norm(const SpectralField& f);
/// L2 norm of the z-mean (q = 0) modes, i.e. of the part surviving vertical averaging.
double z_mean_norm(const SpectralField& f);
/// ||f(x,y,z) - f(x,y,-z)||-type parity defect relative to ||f||.
double parity_defect(const SpectralField& f);

double max_abs(const PhysicalField& f);

}  // namespace pemda
