#pragma once

// Reference evaluations that do not go through the FFT code path.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pemda/spectral.hpp"

namespace oracle {

using pemda::Complex;
using pemda::Grid;
using pemda::SpectralField;

inline constexpr double pi = std::numbers::pi;

// Evaluates a spectral field at an arbitrary point by summing its Fourier series.
class Synth {
 public:
  explicit Synth(const SpectralField& f) : g_(f.grid()) {
    for (int iz = 0; iz < g_.nz(); ++iz)
      for (int iy = 0; iy < g_.ny(); ++iy)
        for (int ix = 0; ix < g_.nxh(); ++ix) {
          const Complex c = f.at(ix, iy, iz);
          if (c == Complex{} || g_.is_nyquist(ix, iy, iz)) continue;
          modes_.push_back({g_.kx(ix), g_.ky(iy), g_.kz(iz), c, ix == 0 ? 1.0 : 2.0});
        }
  }

  double operator()(double x, double y, double z) const {
    double s = 0;
    for (const Mode& m : modes_) {
      const double ph = m.kx * x + m.ky * y + m.kz * z;
      s += m.w * (m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph));
    }
    return s;
  }

 private:
  struct Mode {
    double kx, ky, kz;
    Complex c;
    double w;
  };
  Grid g_;
  std::vector<Mode> modes_;
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p0 = 1, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1);
    x[i] = t;
    w[i] = 2 / ((1 - t * t) * dp * dp);
  }
}

// Composite Simpson rule for a 1D function on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3;
}

// Fourth-order central difference of f along a direction.
template <class F>
double central_diff(F&& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

}  // namespace oracle
