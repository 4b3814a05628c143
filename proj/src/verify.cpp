#include "pemda/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pemda/dynamics.hpp"
#include "pemda/integrator.hpp"
#include "pemda/interpolant.hpp"
#include "pemda/random.hpp"

namespace pemda {

namespace {

constexpr double pi = std::numbers::pi;

double rel_max_diff(const PhysicalField& a, const PhysicalField& b) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    scale = std::max(scale, std::abs(b.values[i]));
  }
  return scale > 0 ? diff / scale : diff;
}

PhysicalField sample(const Grid& g, auto&& fn) {
  PhysicalField f(g);
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix) f.values[g.physical_index(ix, iy, iz)] = fn(g.x(ix), g.y(iy), g.z(iz));
  return f;
}

double h1(const VectorField2& w) { return std::hypot(h1_norm(w.x), h1_norm(w.y)); }

}  // namespace

std::vector<CheckResult> run_verify_suite(const Grid& g, std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };
  const FieldSpectrum band = FieldSpectrum::dealiased_band(g);

  {
    const SpectralField f = random_field(g, Parity::Even, band, seed, 200);
    const PhysicalField p = transform_to_physical(f);
    check("transform round trip", rel_max_diff(transform_to_physical(transform_to_spectral(p, Parity::Even)), p), 1e-13);
    double sum = 0;
    for (double v : p.values) sum += v * v;
    const double physical = sum * g.volume() / static_cast<double>(g.physical_size());
    check("Parseval", std::abs(physical - l2_norm_squared(f)) / physical, 1e-12);
  }
  {
    const double k = 2 * pi / g.L1();
    PhysicalField c = sample(g, [&](double x, double, double) { return std::cos(k * x); });
    const PhysicalField d = transform_to_physical(ddx(transform_to_spectral(c, Parity::Even)));
    const PhysicalField exact = sample(g, [&](double x, double, double) { return -k * std::sin(k * x); });
    const PhysicalField dz = transform_to_physical(ddz(transform_to_spectral(
        sample(g, [](double, double, double z) { return std::cos(pi * z); }), Parity::Even)));
    const PhysicalField dz_exact = sample(g, [](double, double, double z) { return -pi * std::sin(pi * z); });
    check("basis derivatives", std::max(rel_max_diff(d, exact), rel_max_diff(dz, dz_exact)), 1e-12);
  }
  {
    const SpectralField f = random_field(g, Parity::Even, band, seed, 201);
    SpectralField at0(g, Parity::Even);
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nxh(); ++ix) {
        Complex s{};
        for (int iz = 0; iz < g.nz(); ++iz) s += f.at(ix, iy, iz);
        at0.at(ix, iy, 0) = s;
      }
    const SpectralField r = integrate_z_from_zero(ddz(f)) - (f - at0);
    check("vertical integration of dz", l2_norm(r) / l2_norm(f), 1e-12);
  }
  {
    const PemState s = random_state(g, {seed, 1.0, 1.0, 0.0, 2.0});
    const SpectralField w3 = vertical_component(s.u);
    const SpectralField r = divergence_h(s.u) + ddz(w3);
    const double scale = l2_norm(divergence_h(s.u));
    check("incompressibility of derived w3", scale > 0 ? l2_norm(r) / scale : l2_norm(r), 1e-11);
  }
  {
    double worst = 0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const PemState s = random_state(g, {seed + 1000 + trial, 1.0, 1.0, 0.0, 2.0});
      const VectorField2 b = trilinear_B(s.u, s.b);
      worst = std::max(worst, std::abs(inner_product(b, s.b)) / (h1(s.u) * h1(s.b) * h1(s.b)));
    }
    check("trilinear cancellation", worst, 1e-10);
  }
  {
    const PemState s = random_state(g, {seed + 2000, 1.0, 1.0, 0.0, 2.0});
    const PemParams p;
    const Tendency t = tendency(ReferenceSystem{}, s, p);
    check("semi-discrete energy identity", energy_budget(s, t, p), 1e-9);
  }
  {
    // Cutoff at half the dealiased band so the truncation keeps observed modes.
    const double kband = 2 * pi * std::max(1, band.max_mode_x) / g.L1();
    const Interpolant I(InterpolantKind::SpectralTruncation, 2 * pi / kband, g);
    const ConstantsReport c = measure_constants(I, 20, seed);
    check("spectral truncation C2 = 1", std::abs(c.measured_C2 - 1.0), 1e-12);
    check("spectral truncation C1 <= 1/pi", c.measured_C1, 1.05 / pi);
  }
  {
    PemParams p;
    p.L1 = g.L1();
    p.L2 = g.L2();
    const double k = 2 * pi / g.L2();
    PemState s = PemState::zero(g);
    s.u.x = transform_to_spectral(sample(g, [&](double, double y, double) { return std::cos(k * y); }), Parity::Even);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    Integrator integ(s, p, cfg);
    for (std::size_t n = 0; n < cfg.steps(); ++n) integ.advance(StepExternals::uniform(ReferenceSystem{}));
    const double expected = std::exp(-p.mu * k * k * integ.time()) * l2_norm(s.u.x);
    // Crank-Nicolson misses exp(-a) by a^3 / 12 per step, a = mu k^2 dt.
    const double a = p.mu * k * k * cfg.dt;
    check("manufactured diffusion decay", std::abs(l2_norm(integ.state().u.x) - expected) / expected,
          static_cast<double>(cfg.steps()) * a * a * a / 6.0);
  }
  return out;
}

}  // namespace pemda
