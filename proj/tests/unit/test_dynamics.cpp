#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "pemda/dynamics.hpp"
#include "pemda/errors.hpp"
#include "pemda/random.hpp"

using namespace pemda;
using oracle::pi;

namespace {

using Fn = std::function<double(double, double, double)>;

SpectralField from_fn(const Grid& g, const Fn& fn) {
  PhysicalField f(g);
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix) f.values[g.physical_index(ix, iy, iz)] = fn(g.x(ix), g.y(iy), g.z(iz));
  return project_parity(transform_to_spectral(f, Parity::Even), Parity::Even);
}

double vnorm(const VectorField2& w) { return std::sqrt(l2_norm_squared(w)); }

double tnorm(const Tendency& a) { return std::sqrt(l2_norm_squared(a.du) + l2_norm_squared(a.db)); }

Tendency minus(const Tendency& a, const Tendency& b) { return {a.du - b.du, a.db - b.db}; }

PemState random_admissible(const Grid& g, std::uint64_t seed, double t = 0.0) {
  InitSpec spec;
  spec.seed = seed;
  PemState s = random_state(g, spec);
  s.time = t;
  return s;
}

PemParams tied(double mu, double nu) {
  PemParams p;
  p.mu = p.kappa = mu;
  p.nu = p.sigma = nu;
  p.beta_u = 3.0;
  p.beta_b = 2.0;
  p.h = pi / 4;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  PemParams p;
  CHECK_NOTHROW(p.validate());
  p.nu = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.beta_b = -1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.h = NAN;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("zero state is a fixed point") {
  const Grid g(8, 8, 8, 2 * pi, 2 * pi);
  const Tendency t = tendency(ReferenceSystem{}, PemState::zero(g), PemParams{});
  CHECK(tnorm(t) == 0.0);
}

TEST_CASE("nudging towards the state itself changes nothing") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  const PemState s = random_admissible(g, 3);
  const Interpolant I(InterpolantKind::SpectralTruncation, pi / 4, g);
  PemParams p = tied(1, 1);
  const Tendency a = tendency(ReferenceSystem{}, s, p);
  const Tendency b = tendency(NudgedSystem{&I, &s}, s, p);
  CHECK(tnorm(minus(a, b)) == 0.0);

  // and towards zero it adds -beta I_h(state)
  const PemState zero = PemState::zero(g);
  const Tendency c = explicit_terms(NudgedSystem{&I, &zero}, s, p);
  const Tendency d = explicit_terms(ReferenceSystem{}, s, p);
  CHECK(vnorm(c.du - d.du + p.beta_u * I.apply(s.u)) < 1e-13);
  CHECK(vnorm(c.db - d.db + p.beta_b * I.apply(s.b)) < 1e-13);
}

TEST_CASE("trilinear form") {
  const Grid g(16, 16, 16, 2 * pi, 3.0);
  const PemState a = random_admissible(g, 5);
  const PemState w = random_admissible(g, 6);
  SUBCASE("cancellation") {
    for (const VectorField2* adv : {&a.u, &a.b}) {
      for (const VectorField2* f : {&w.u, &w.b, &a.u}) {
        const double scale = vnorm(trilinear_B(*adv, *f)) * vnorm(*f);
        CHECK(std::abs(inner_product(trilinear_B(*adv, *f), *f)) < 1e-12 * scale);
      }
    }
    // <B(a, w), v> = -<B(a, v), w>
    const double x = inner_product(trilinear_B(a.u, w.u), w.b);
    const double y = inner_product(trilinear_B(a.u, w.b), w.u);
    CHECK(std::abs(x + y) < 1e-12 * std::abs(x));
  }
  SUBCASE("constant fields are not advected") {
    VectorField2 c = VectorField2::zero(g);
    c.x.at(0, 0, 0) = 2.0;
    c.y.at(0, 0, 0) = -1.0;
    CHECK(vnorm(trilinear_B(a.u, c)) == 0.0);
  }
  SUBCASE("linear in each argument") {
    const VectorField2 lhs = trilinear_B(2.0 * a.u + w.u, a.b);
    const VectorField2 rhs = 2.0 * trilinear_B(a.u, a.b) + trilinear_B(w.u, a.b);
    CHECK(vnorm(lhs - rhs) < 1e-13 * vnorm(lhs));
  }
  SUBCASE("advector must be barotropically solenoidal") {
    VectorField2 bad = VectorField2::zero(g);
    bad.x = from_fn(g, [](double x, double, double) { return std::sin(x); });
    CHECK_THROWS_AS(trilinear_B(bad, w.u), SolvabilityError);
  }
}

TEST_CASE("pressure") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  SUBCASE("a pure gradient is its own pressure gradient") {
    VectorField2 r = VectorField2::zero(g);
    r.x = from_fn(g, [](double x, double y, double) { return std::sin(x) * std::cos(2 * y); });
    r.y = from_fn(g, [](double x, double y, double) { return 2 * std::cos(x) * std::sin(2 * y); });
    CHECK(vnorm(pressure_gradient(r) - r) < 1e-13);
    const PressureField p = pressure_solve(r);
    const SpectralField pb = p.broadcast();
    const SpectralField expect = from_fn(g, [](double x, double y, double) { return -std::cos(x) * std::cos(2 * y); });
    CHECK(l2_norm(pb - expect) < 1e-13);
  }
  SUBCASE("z-dependent and solenoidal parts give no pressure") {
    VectorField2 r = VectorField2::zero(g);
    r.x = from_fn(g, [](double x, double, double z) { return std::sin(x) * std::cos(pi * z); });
    r.y = from_fn(g, [](double x, double, double) { return std::cos(x); });
    CHECK(vnorm(pressure_gradient(r)) < 1e-14);
  }
  SUBCASE("projected tendency has no barotropic divergence") {
    const PemState s = random_admissible(g, 9);
    const Tendency t = tendency(ReferenceSystem{}, s, PemParams{});
    CHECK(barotropic_divergence(t.du) < 1e-12);
    CHECK(barotropic_divergence(t.db) < 1e-12);
    CHECK(t.drift_u > 1e-3);
  }
}

TEST_CASE("semi-discrete energy identity") {
  const Grid g(16, 16, 16, 2 * pi, 2 * pi);
  PemParams p;
  p.mu = 0.7;
  p.nu = 0.3;
  p.kappa = 1.3;
  p.sigma = 0.2;
  for (std::uint64_t seed : {1, 2, 3}) {
    const PemState s = random_admissible(g, seed);
    CHECK(energy_budget(s, tendency(ReferenceSystem{}, s, p), p) < 1e-9);
  }
}

TEST_CASE("explicit and diffusion terms against finite differences") {
  const Grid g(16, 16, 16, 2 * pi, 2 * pi);
  // u = (sin x cos pi z + cos y, cos x), b = (cos y cos pi z, sin x)
  const Fn u1 = [](double x, double y, double z) { return std::sin(x) * std::cos(pi * z) + std::cos(y); };
  const Fn u2 = [](double x, double, double) { return std::cos(x); };
  const Fn u3 = [](double x, double, double z) { return -std::cos(x) * std::sin(pi * z) / pi; };
  const Fn b1 = [](double, double y, double z) { return std::cos(y) * std::cos(pi * z); };
  const Fn b2 = [](double x, double, double) { return std::sin(x); };
  const Fn b3 = [](double, double, double) { return 0.0; };

  PemParams p;
  p.mu = 0.6;
  p.nu = 0.25;
  p.kappa = 0.9;
  p.sigma = 0.4;
  PemState s{{from_fn(g, u1), from_fn(g, u2)}, {from_fn(g, b1), from_fn(g, b2)}, 0.0};

  Tendency t = explicit_terms(ReferenceSystem{}, s, p);
  const Tendency d = diffusion_terms(ReferenceSystem{}, s, p);
  t.du += d.du;
  t.db += d.db;
  const PhysicalField du1 = transform_to_physical(t.du.x), du2 = transform_to_physical(t.du.y);
  const PhysicalField db1 = transform_to_physical(t.db.x), db2 = transform_to_physical(t.db.y);

  const double hs = 1e-3;
  auto dx = [&](const Fn& f, double x, double y, double z) {
    return oracle::central_diff([&](double e) { return f(x + e, y, z); }, hs);
  };
  auto dy = [&](const Fn& f, double x, double y, double z) {
    return oracle::central_diff([&](double e) { return f(x, y + e, z); }, hs);
  };
  auto dz = [&](const Fn& f, double x, double y, double z) {
    return oracle::central_diff([&](double e) { return f(x, y, z + e); }, hs);
  };
  auto lap = [&](const Fn& f, double x, double y, double z, double mh, double mv) {
    const double fxx = oracle::central_diff([&](double e) { return dx(f, x + e, y, z); }, hs);
    const double fyy = oracle::central_diff([&](double e) { return dy(f, x, y + e, z); }, hs);
    const double fzz = oracle::central_diff([&](double e) { return dz(f, x, y, z + e); }, hs);
    return mh * (fxx + fyy) + mv * fzz;
  };
  // (a . grad) w with the vertical component
  auto adv = [&](const Fn& a1, const Fn& a2, const Fn& a3, const Fn& w, double x, double y, double z) {
    return a1(x, y, z) * dx(w, x, y, z) + a2(x, y, z) * dy(w, x, y, z) + a3(x, y, z) * dz(w, x, y, z);
  };

  double worst = 0, scale = 0;
  for (int iz = 0; iz < g.nz(); iz += 3)
    for (int iy = 0; iy < g.ny(); iy += 5)
      for (int ix = 0; ix < g.nx(); ix += 3) {
        const double x = g.x(ix), y = g.y(iy), z = g.z(iz);
        const std::size_t i = g.physical_index(ix, iy, iz);
        const double e[4] = {
            -adv(u1, u2, u3, u1, x, y, z) + adv(b1, b2, b3, b1, x, y, z) + lap(u1, x, y, z, p.mu, p.nu),
            -adv(u1, u2, u3, u2, x, y, z) + adv(b1, b2, b3, b2, x, y, z) + lap(u2, x, y, z, p.mu, p.nu),
            -adv(u1, u2, u3, b1, x, y, z) + adv(b1, b2, b3, u1, x, y, z) + lap(b1, x, y, z, p.kappa, p.sigma),
            -adv(u1, u2, u3, b2, x, y, z) + adv(b1, b2, b3, u2, x, y, z) + lap(b2, x, y, z, p.kappa, p.sigma),
        };
        const double got[4] = {du1.values[i], du2.values[i], db1.values[i], db2.values[i]};
        for (int k = 0; k < 4; ++k) {
          worst = std::max(worst, std::abs(e[k] - got[k]));
          scale = std::max(scale, std::abs(e[k]));
        }
      }
  CHECK(worst < 1e-6 * scale);
}

TEST_CASE("sensitivity system") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  const Interpolant I(InterpolantKind::SpectralTruncation, pi / 4, g);
  const PemParams p = tied(0.8, 0.5);
  const PemState base = random_admissible(g, 1);
  const PemState s1 = random_admissible(g, 2), s2 = random_admissible(g, 3);
  const SensitivitySystem sys{&I, &base};

  SUBCASE("affine in the state") {
    const double alpha = -1.7;
    const PemState comb{alpha * s1.u + s2.u, alpha * s1.b + s2.b, 0.0};
    const Tendency lhs = tendency(sys, comb, p);
    const Tendency t1 = tendency(sys, s1, p), t2 = tendency(sys, s2, p);
    const Tendency f = tendency(sys, PemState::zero(g), p);
    const Tendency rhs{alpha * (t1.du - f.du) + t2.du, alpha * (t1.db - f.db) + t2.db};
    CHECK(tnorm(minus(lhs, rhs)) < 1e-12 * tnorm(lhs));
  }
  SUBCASE("directional derivative of the nudged tendency") {
    // d/deps N_mu(base + eps s1) + d/dmu N_mu(base) with kappa = mu
    const PemState zero = PemState::zero(g);
    auto nudged = [&](double eps, double mu) {
      PemParams q = tied(mu, p.nu);
      const PemState x{base.u + eps * s1.u, base.b + eps * s1.b, 0.0};
      return tendency(NudgedSystem{&I, &zero}, x, q);
    };
    const double e = 1e-4;
    const Tendency plus = nudged(e, p.mu + e), minus_ = nudged(-e, p.mu - e);
    const Tendency fd{(1 / (2 * e)) * (plus.du - minus_.du), (1 / (2 * e)) * (plus.db - minus_.db)};
    const Tendency lin = tendency(sys, s1, p);
    CHECK(tnorm(minus(fd, lin)) < 1e-6 * tnorm(lin));
  }
  SUBCASE("untied parameters are rejected") {
    PemParams q = p;
    q.kappa = 2.0;
    CHECK_THROWS_AS(tendency(sys, s1, q), ValidationError);
  }
}

TEST_CASE("difference quotient system is exact") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  const Interpolant I(InterpolantKind::SpectralTruncation, pi / 4, g);
  const double mu1 = 1.25, mu2 = 1.0;
  const PemState a1 = random_admissible(g, 4), a2 = random_admissible(g, 5), obs = random_admissible(g, 6);
  const PemParams p1 = tied(mu1, 0.5), p2 = tied(mu2, 0.5);
  const Tendency t1 = tendency(NudgedSystem{&I, &obs}, a1, p1);
  const Tendency t2 = tendency(NudgedSystem{&I, &obs}, a2, p2);
  const double inv = 1.0 / (mu1 - mu2);
  const Tendency quotient{inv * (t1.du - t2.du), inv * (t1.db - t2.db)};
  const PemState q{inv * (a1.u - a2.u), inv * (a1.b - a2.b), 0.0};
  const DifferenceQuotientSystem dq{&I, &a1, &a2, mu1, mu2};
  const Tendency got = tendency(dq, q, p2);
  CHECK(tnorm(minus(got, quotient)) < 1e-12 * tnorm(quotient));

  // with equal bases it reduces to the sensitivity system at mu2
  const DifferenceQuotientSystem same{&I, &a1, &a1, mu1, mu2};
  CHECK(tnorm(minus(tendency(same, q, p2), tendency(SensitivitySystem{&I, &a1}, q, p2))) < 1e-13 * tnorm(got));

  const DifferenceQuotientSystem degenerate{&I, &a1, &a2, mu1, mu1};
  CHECK_THROWS_AS(tendency(degenerate, q, p2), ValidationError);
}

TEST_CASE("external fields must be aligned") {
  const Grid g(8, 8, 8, 2 * pi, 2 * pi);
  const Interpolant I(InterpolantKind::SpectralTruncation, pi / 4, g);
  const PemState s = random_admissible(g, 1, 0.5);
  const PemState early = random_admissible(g, 1, 0.25);
  const PemParams p = tied(1, 1);
  CHECK_THROWS_AS(tendency(NudgedSystem{&I, &early}, s, p), AlignmentError);
  CHECK_THROWS_AS(tendency(NudgedSystem{&I, nullptr}, s, p), AlignmentError);
  CHECK_THROWS_AS(tendency(NudgedSystem{nullptr, &s}, s, p), ValidationError);
  CHECK_THROWS_AS(tendency(SensitivitySystem{&I, &early}, s, p), AlignmentError);
  const PemState other = random_admissible(Grid(8, 8, 4, 2 * pi, 2 * pi), 1, 0.5);
  CHECK_THROWS_AS(tendency(NudgedSystem{&I, &other}, s, p), AlignmentError);
  CHECK_NOTHROW(tendency(NudgedSystem{&I, &s}, s, p));
}

TEST_CASE("derived fields") {
  const Grid g(16, 16, 8, 2 * pi, 2 * pi);
  const PemState s = random_admissible(g, 8);
  const DerivedFields d = derived_fields(s, PemParams{});
  CHECK(l2_norm(divergence_h(s.u) + ddz(d.u3)) < 1e-12);
  CHECK(l2_norm(divergence_h(s.b) + ddz(d.b3)) < 1e-12);
  // removing grad p from the raw tendency leaves no barotropic divergence
  Tendency raw = explicit_terms(ReferenceSystem{}, s, PemParams{});
  raw.du += diffusion_terms(ReferenceSystem{}, s, PemParams{}).du;
  CHECK(barotropic_divergence(raw.du - d.p.gradient()) < 1e-12);
  CHECK(d.p.at(0, 0) == Complex{});
}
