#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pemda/errors.hpp"
#include "pemda/random.hpp"
#include "pemda/spectral.hpp"

using namespace pemda;
using oracle::pi;

namespace {

PhysicalField sample(const Grid& g, auto&& fn) {
  PhysicalField f(g);
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix) f.values[g.physical_index(ix, iy, iz)] = fn(g.x(ix), g.y(iy), g.z(iz));
  return f;
}

double max_diff(const PhysicalField& a, const PhysicalField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

double max_abs_value(const PhysicalField& a) { return max_abs(a); }

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(6, 8, 3, 1, 1), ValidationError);
  CHECK_THROWS_AS(Grid(2, 8, 8, 1, 1), ValidationError);
  CHECK_THROWS_AS(Grid(8, 8, 8, -1, 1), ValidationError);
  CHECK_THROWS_AS(Grid(8, 8, 8, 1, 1, 0.0), ValidationError);
  const Grid g(8, 6, 4, 3.0, 2.0);
  CHECK(g.kx(1) == doctest::Approx(2 * pi / 3.0));
  CHECK(g.ky(5) == doctest::Approx(-2 * pi / 2.0));
  CHECK(g.kz(1) == doctest::Approx(pi));
  CHECK(g.volume() == doctest::Approx(12.0));
}

TEST_CASE("transforms") {
  for (const Grid& g : {Grid(16, 16, 16, 2 * pi, 2 * pi), Grid(32, 32, 16, 2 * pi, 3.0)}) {
    SUBCASE("zero coefficients give zero samples") {
      CHECK(max_abs_value(transform_to_physical(SpectralField(g, Parity::Even))) == 0.0);
    }
    SUBCASE("a single cosine mode") {
      const PhysicalField c = sample(g, [&](double x, double, double) { return std::cos(2 * pi * x / g.L1()); });
      const SpectralField f = transform_to_spectral(c, Parity::Even);
      CHECK(f.at(1, 0, 0).real() == doctest::Approx(0.5));
      CHECK(max_diff(transform_to_physical(f), c) < 1e-14);
    }
    SUBCASE("random band-limited round trip") {
      for (Parity p : {Parity::Even, Parity::Odd}) {
        const SpectralField f = random_field(g, p, FieldSpectrum::dealiased_band(g), 3, 7);
        const PhysicalField a = transform_to_physical(f);
        const PhysicalField b = transform_to_physical(transform_to_spectral(a, p));
        CHECK(max_diff(a, b) / max_abs_value(a) < 1e-13);
      }
    }
    SUBCASE("Parseval") {
      const SpectralField f = random_field(g, Parity::Even, FieldSpectrum::dealiased_band(g), 5, 1);
      const PhysicalField a = transform_to_physical(f);
      double s = 0;
      for (double v : a.values) s += v * v;
      s *= g.volume() / static_cast<double>(g.physical_size());
      CHECK(std::abs(s - l2_norm_squared(f)) / s < 1e-12);
    }
    SUBCASE("samples agree with direct summation of the series") {
      const SpectralField f = random_field(g, Parity::Odd, FieldSpectrum::quarter_band(g), 9, 2);
      const oracle::Synth synth(f);
      const PhysicalField a = transform_to_physical(f);
      double d = 0;
      for (int iz = 0; iz < g.nz(); iz += 3)
        for (int iy = 0; iy < g.ny(); iy += 5)
          for (int ix = 0; ix < g.nx(); ix += 7)
            d = std::max(d, std::abs(a.values[g.physical_index(ix, iy, iz)] - synth(g.x(ix), g.y(iy), g.z(iz))));
      CHECK(d < 1e-13 * max_abs_value(a));
    }
  }
}

TEST_CASE("non-finite coefficients are rejected") {
  const Grid g(8, 8, 8, 1, 1);
  SpectralField f(g, Parity::Even);
  f.at(1, 1, 1) = Complex(NAN, 0);
  CHECK_THROWS_AS(transform_to_physical(f), ValidationError);
}

TEST_CASE("spectral derivatives of basis functions") {
  const Grid g(16, 16, 16, 3.0, 2 * pi);
  const double k = 2 * pi / g.L1();
  const SpectralField c =
      transform_to_spectral(sample(g, [&](double x, double, double) { return std::cos(k * x); }), Parity::Even);
  const PhysicalField dx = transform_to_physical(ddx(c));
  CHECK(max_diff(dx, sample(g, [&](double x, double, double) { return -k * std::sin(k * x); })) < 1e-13);

  const SpectralField one =
      transform_to_spectral(sample(g, [](double, double, double) { return 2.5; }), Parity::Even);
  CHECK(l2_norm(ddx(one)) == 0.0);
  CHECK(l2_norm(ddy(one)) == 0.0);
  CHECK(l2_norm(ddz(one)) == 0.0);

  const SpectralField cz =
      transform_to_spectral(sample(g, [](double, double, double z) { return std::cos(pi * z); }), Parity::Even);
  const SpectralField dz = ddz(cz);
  CHECK(dz.parity() == Parity::Odd);
  CHECK(max_diff(transform_to_physical(dz), sample(g, [](double, double, double z) { return -pi * std::sin(pi * z); })) <
        1e-13);
  CHECK(ddz(dz).parity() == Parity::Even);

  const SpectralField sy = transform_to_spectral(
      sample(g, [&](double, double y, double) { return std::sin(3 * 2 * pi * y / g.L2()); }), Parity::Even);
  const double ky = 3 * 2 * pi / g.L2();
  CHECK(max_diff(transform_to_physical(laplacian_h(sy)),
                 sample(g, [&](double, double y, double) { return -ky * ky * std::sin(ky * y); })) < 1e-12);
}

TEST_CASE("dealiasing") {
  const Grid g(16, 16, 16, 2 * pi, 2 * pi);
  const SpectralField low = random_field(g, Parity::Even, FieldSpectrum::quarter_band(g), 1, 1);
  CHECK(l2_norm(dealias(low) - low) < 1e-14 * l2_norm(low));

  SpectralField high(g, Parity::Even);
  high.at(7, 0, 0) = 1.0;
  CHECK(l2_norm(dealias(high)) == 0.0);

  FieldSpectrum all;
  all.max_mode_x = all.max_mode_y = all.max_mode_z = 8;
  const SpectralField f = random_field(g, Parity::Even, all, 2, 2);
  const SpectralField d = dealias(f);
  CHECK(l2_norm(d) < l2_norm(f));
  CHECK(l2_norm(dealias(d) - d) == 0.0);
}

TEST_CASE("parity projection") {
  const Grid g(16, 16, 16, 2 * pi, 2 * pi);
  const PhysicalField cz = sample(g, [](double, double, double z) { return std::cos(pi * z); });
  const PhysicalField sz = sample(g, [](double, double, double z) { return std::sin(pi * z); });
  const SpectralField c = project_parity(transform_to_spectral(cz, Parity::Even), Parity::Even);
  CHECK(max_diff(transform_to_physical(c), cz) < 1e-14);
  CHECK(l2_norm(project_parity(transform_to_spectral(sz, Parity::Even), Parity::Even)) < 1e-14);
  CHECK(l2_norm(project_parity(transform_to_spectral(sz, Parity::Odd), Parity::Odd)) ==
        doctest::Approx(std::sqrt(g.volume() / 2)));

  FieldSpectrum band = FieldSpectrum::dealiased_band(g);
  const SpectralField e = random_field(g, Parity::Even, band, 4, 1);
  const SpectralField o = random_field(g, Parity::Odd, band, 4, 2);
  PhysicalField mixed = transform_to_physical(e);
  const PhysicalField op = transform_to_physical(o);
  for (std::size_t i = 0; i < mixed.values.size(); ++i) mixed.values[i] += op.values[i];
  const SpectralField me = project_parity(transform_to_spectral(mixed, Parity::Even), Parity::Even);
  const SpectralField mo = project_parity(transform_to_spectral(mixed, Parity::Odd), Parity::Odd);
  CHECK(l2_norm(me - e) < 1e-13 * l2_norm(e));
  CHECK(l2_norm(mo - o) < 1e-13 * l2_norm(o));
  CHECK(l2_norm(project_parity(me, Parity::Even) - me) == 0.0);
  CHECK(parity_defect(e) < 1e-15);
}

TEST_CASE("vertical antiderivative") {
  const Grid g(8, 8, 32, 2 * pi, 2 * pi);
  SUBCASE("zero") { CHECK(l2_norm(integrate_z_from_zero(SpectralField(g, Parity::Even))) == 0.0); }
  SUBCASE("cos(pi z) -> sin(pi z) / pi") {
    const SpectralField f =
        transform_to_spectral(sample(g, [](double, double, double z) { return std::cos(pi * z); }), Parity::Even);
    const SpectralField F = integrate_z_from_zero(f);
    CHECK(F.parity() == Parity::Odd);
    const PhysicalField Fp = transform_to_physical(F);
    for (int iz = 0; iz < g.nz(); ++iz) {
      const double z = g.z(iz);
      const double quad = oracle::simpson([](double s) { return std::cos(pi * s); }, 0.0, z, 200);
      CHECK(Fp.values[g.physical_index(0, 0, iz)] == doctest::Approx(std::sin(pi * z) / pi).epsilon(1e-12));
      CHECK(Fp.values[g.physical_index(0, 0, iz)] == doctest::Approx(quad).epsilon(1e-8));
    }
  }
  SUBCASE("sin(pi z) -> (1 - cos(pi z)) / pi") {
    const SpectralField f =
        transform_to_spectral(sample(g, [](double, double, double z) { return std::sin(pi * z); }), Parity::Odd);
    const PhysicalField Fp = transform_to_physical(integrate_z_from_zero(f));
    for (int iz = 0; iz < g.nz(); ++iz) {
      const double z = g.z(iz);
      const double quad = oracle::simpson([](double s) { return std::sin(pi * s); }, 0.0, z, 200);
      CHECK(Fp.values[g.physical_index(3, 1, iz)] == doctest::Approx((1 - std::cos(pi * z)) / pi).epsilon(1e-12));
      CHECK(Fp.values[g.physical_index(3, 1, iz)] == doctest::Approx(quad).epsilon(1e-8));
    }
  }
  SUBCASE("integral of dz f is f - f(z = 0)") {
    for (Parity p : {Parity::Even, Parity::Odd}) {
      const SpectralField f = random_field(g, p, FieldSpectrum::dealiased_band(g), 8, 3);
      const PhysicalField a = transform_to_physical(f);
      const PhysicalField b = transform_to_physical(integrate_z_from_zero(ddz(f)));
      double err = 0;
      for (int iz = 0; iz < g.nz(); ++iz)
        for (int iy = 0; iy < g.ny(); ++iy)
          for (int ix = 0; ix < g.nx(); ++ix) {
            const double at0 = a.values[g.physical_index(ix, iy, g.nz() / 2)];  // z = 0
            err = std::max(err, std::abs(b.values[g.physical_index(ix, iy, iz)] -
                                         (a.values[g.physical_index(ix, iy, iz)] - at0)));
          }
      CHECK(err < 1e-12 * max_abs(a));
    }
  }
  SUBCASE("a z-mean component is rejected") {
    const SpectralField f =
        transform_to_spectral(sample(g, [](double x, double, double) { return 1.0 + std::cos(x); }), Parity::Even);
    CHECK_THROWS_AS(integrate_z_from_zero(f), SolvabilityError);
  }
}

TEST_CASE("resampling onto a padded grid keeps the field") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  const SpectralField f = random_field(g, Parity::Even, FieldSpectrum::dealiased_band(g), 1, 4);
  const Grid fine = g.padded(1.5);
  CHECK(fine.nx() == 24);
  CHECK(fine.nz() == 12);
  const SpectralField r = resample(f, fine);
  CHECK(std::abs(l2_norm(r) - l2_norm(f)) < 1e-13 * l2_norm(f));
  CHECK(l2_norm(resample(r, g) - f) < 1e-14 * l2_norm(f));
}
