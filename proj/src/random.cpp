#include "pemda/random.hpp"

#include <cmath>
#include <numbers>

#include "pemda/errors.hpp"

namespace pemda {

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

FieldSpectrum FieldSpectrum::quarter_band(const Grid& g) {
  FieldSpectrum s;
  s.max_mode_x = (g.nx() + 3) / 4;
  s.max_mode_y = (g.ny() + 3) / 4;
  s.max_mode_z = (g.nz() + 3) / 4;
  return s;
}

FieldSpectrum FieldSpectrum::dealiased_band(const Grid& g) {
  FieldSpectrum s;
  s.max_mode_x = static_cast<int>(std::floor(g.dealias_fraction() * g.nx() / 2 + 1e-12));
  s.max_mode_y = static_cast<int>(std::floor(g.dealias_fraction() * g.ny() / 2 + 1e-12));
  s.max_mode_z = static_cast<int>(std::floor(g.dealias_fraction() * g.nz() / 2 + 1e-12));
  return s;
}

SpectralField random_field(const Grid& g, Parity parity, const FieldSpectrum& spec, std::uint64_t seed,
                           std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  SpectralField f(g, parity);
  for (int iz = 0; iz < g.nz(); ++iz) {
    if (std::abs(g.mode_z(iz)) > spec.max_mode_z || iz == g.nz() / 2) continue;
    for (int iy = 0; iy < g.ny(); ++iy) {
      if (std::abs(g.mode_y(iy)) > spec.max_mode_y || iy == g.ny() / 2) continue;
      for (int ix = 0; ix < g.nxh(); ++ix) {
        if (ix > spec.max_mode_x || ix == g.nx() / 2) continue;
        const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy) + g.kz(iz) * g.kz(iz);
        const double amp = std::pow(1.0 + k2, -0.5 * spec.slope);
        const std::uint64_t c = 2 * g.spectral_index(ix, iy, iz);
        f.at(ix, iy, iz) = amp * Complex(rng.normal(c), rng.normal(c + 1));
      }
    }
  }
  if (spec.zero_mean) f.at(0, 0, 0) = 0.0;
  // The physical round trip discards the anti-Hermitian part of the m = 0 plane.
  f = transform_to_spectral(transform_to_physical(f), parity);
  return project_parity(f, parity);
}

PemState random_state(const Grid& g, const InitSpec& spec) {
  if (!(spec.mean_fraction >= 0.0 && spec.mean_fraction < 1.0)) {
    throw ValidationError("mean_fraction must lie in [0, 1)");
  }
  if (!(spec.norm_u >= 0.0) || !(spec.norm_b >= 0.0)) throw ValidationError("initial norms must be >= 0");
  FieldSpectrum band = FieldSpectrum::quarter_band(g);
  band.slope = spec.slope;

  const CounterRng direction_rng(spec.seed, 5);
  auto make = [&](std::uint64_t stream, double norm, int which) {
    VectorField2 w{random_field(g, Parity::Even, band, spec.seed, stream),
                   random_field(g, Parity::Even, band, spec.seed, stream + 1)};
    w = project_barotropic(w);
    const double n = std::sqrt(l2_norm_squared(w));
    if (n > 0.0) w *= norm * std::sqrt(1.0 - spec.mean_fraction) / n;
    if (spec.mean_fraction > 0.0) {
      const double amp = norm * std::sqrt(spec.mean_fraction / g.volume());
      const double theta = 2.0 * std::numbers::pi * direction_rng.uniform(static_cast<std::uint64_t>(which));
      w.x.at(0, 0, 0) = amp * std::cos(theta);
      w.y.at(0, 0, 0) = amp * std::sin(theta);
    }
    return w;
  };
  PemState s = PemState::zero(g);
  s.u = make(1, spec.norm_u, 0);
  s.b = make(3, spec.norm_b, 1);
  return s;
}

}  // namespace pemda
