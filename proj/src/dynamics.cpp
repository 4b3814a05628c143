#include "pemda/dynamics.hpp"

#include <array>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "pemda/errors.hpp"

namespace pemda {

void PemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(fmt::format("{} must be positive (got {})", name, v));
  };
  positive(mu, "mu");
  positive(nu, "nu");
  positive(kappa, "kappa");
  positive(sigma, "sigma");
  positive(h, "h");
  positive(L1, "L1");
  positive(L2, "L2");
  if (!(beta_u >= 0.0) || !(beta_b >= 0.0) || !std::isfinite(beta_u) || !std::isfinite(beta_b)) {
    throw ValidationError("nudging gains must be non-negative");
  }
}

namespace {

// Physical-space data of one field entering B(., .), computed on demand.
class AdvectionField {
 public:
  explicit AdvectionField(const VectorField2& w) : w_{dealias(w.x), dealias(w.y)} {}

  const std::array<PhysicalField, 3>& velocity() {
    if (!velocity_) {
      velocity_.emplace(std::array<PhysicalField, 3>{transform_to_physical(w_.x), transform_to_physical(w_.y),
                                                     transform_to_physical(vertical_component(w_))});
    }
    return *velocity_;
  }

  // gradient()[i][d]: derivative of component i along x, y, z.
  const std::array<std::array<PhysicalField, 3>, 2>& gradient() {
    if (!gradient_) {
      auto grad = [](const SpectralField& f) {
        return std::array<PhysicalField, 3>{transform_to_physical(ddx(f)), transform_to_physical(ddy(f)),
                                            transform_to_physical(ddz(f))};
      };
      gradient_.emplace(std::array<std::array<PhysicalField, 3>, 2>{grad(w_.x), grad(w_.y)});
    }
    return *gradient_;
  }

 private:
  VectorField2 w_;
  std::optional<std::array<PhysicalField, 3>> velocity_;
  std::optional<std::array<std::array<PhysicalField, 3>, 2>> gradient_;
};

// Accumulates sums of +-B(a, w) in physical space, then transforms once.
class AdvectionSum {
 public:
  explicit AdvectionSum(const Grid& g) : out_{PhysicalField(g), PhysicalField(g)} {}

  void add(double sign, AdvectionField& advector, AdvectionField& advected) {
    const auto& a = advector.velocity();
    const auto& g = advected.gradient();
    const std::size_t n = out_[0].values.size();
    for (int i = 0; i < 2; ++i) {
      double* o = out_[i].values.data();
      const double* gx = g[i][0].values.data();
      const double* gy = g[i][1].values.data();
      const double* gz = g[i][2].values.data();
      const double* a1 = a[0].values.data();
      const double* a2 = a[1].values.data();
      const double* a3 = a[2].values.data();
      for (std::size_t p = 0; p < n; ++p) o[p] += sign * (a1[p] * gx[p] + a2[p] * gy[p] + a3[p] * gz[p]);
    }
  }

  VectorField2 result() const {
    return {dealias(transform_to_spectral(out_[0], Parity::Even)),
            dealias(transform_to_spectral(out_[1], Parity::Even))};
  }

 private:
  std::array<PhysicalField, 2> out_;
};

void require_aligned(const PemState* external, const PemState& state, const char* what) {
  if (external == nullptr) throw AlignmentError(fmt::format("{} is missing", what));
  const double tol = 1e-9 * std::max(1.0, std::abs(state.time));
  if (std::abs(external->time - state.time) > tol) {
    throw AlignmentError(fmt::format("{} at t = {} is not aligned with the state at t = {}", what, external->time,
                                     state.time));
  }
  if (!external->grid().same_shape(state.grid())) throw AlignmentError(fmt::format("{} lives on another grid", what));
}

const Interpolant& require_interp(const Interpolant* interp) {
  if (interp == nullptr) throw ValidationError("nudged system requires an interpolant");
  return *interp;
}

void require_tied(const PemParams& p) {
  if (p.kappa != p.mu || p.sigma != p.nu) {
    throw ValidationError("sensitivity systems require kappa == mu and sigma == nu");
  }
}

VectorField2 laplacian_h(const VectorField2& w) { return {laplacian_h(w.x), laplacian_h(w.y)}; }

}  // namespace

VectorField2 trilinear_B(const VectorField2& advector, const VectorField2& advected) {
  AdvectionField a(advector);
  AdvectionField w(advected);
  AdvectionSum sum(advector.grid());
  sum.add(1.0, a, w);
  return sum.result();
}

PressureField pressure_solve(const VectorField2& rhs) {
  const Grid& g = rhs.grid();
  PressureField p(g);
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double ky = iy == g.ny() / 2 ? 0.0 : g.ky(iy);
    for (int ix = 0; ix < g.nxh(); ++ix) {
      const double kx = ix == g.nx() / 2 ? 0.0 : g.kx(ix);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      // -k^2 p = i k . c  (c the z-mean coefficients of rhs)
      const Complex div = Complex(0.0, 1.0) * (kx * rhs.x.at(ix, iy, 0) + ky * rhs.y.at(ix, iy, 0));
      p.at(ix, iy) = -div / k2;
    }
  }
  return p;
}

VectorField2 pressure_gradient(const VectorField2& rhs) { return pressure_solve(rhs).gradient(); }

Diffusivities diffusivities(const SystemKind& kind, const PemParams& params) {
  if (const auto* dq = std::get_if<DifferenceQuotientSystem>(&kind)) {
    return {dq->mu2, params.nu, dq->mu2, params.nu};
  }
  return {params.mu, params.nu, params.kappa, params.sigma};
}

Tendency explicit_terms(const SystemKind& kind, const PemState& state, const PemParams& params) {
  const Grid& g = state.grid();
  AdvectionSum du(g), db(g);
  Tendency t{VectorField2::zero(g), VectorField2::zero(g)};

  std::visit(
      [&](const auto& sys) {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, ReferenceSystem> || std::is_same_v<T, NudgedSystem>) {
          AdvectionField u(state.u), b(state.b);
          du.add(-1.0, u, u);
          du.add(1.0, b, b);
          db.add(-1.0, u, b);
          db.add(1.0, b, u);
          t.du = du.result();
          t.db = db.result();
          if constexpr (std::is_same_v<T, NudgedSystem>) {
            const Interpolant& I = require_interp(sys.interp);
            require_aligned(sys.observation, state, "observation");
            if (params.beta_u != 0.0) t.du.axpy(-params.beta_u, I.apply(state.u - sys.observation->u));
            if (params.beta_b != 0.0) t.db.axpy(-params.beta_b, I.apply(state.b - sys.observation->b));
          }
        } else if constexpr (std::is_same_v<T, SensitivitySystem>) {
          const Interpolant& I = require_interp(sys.interp);
          require_aligned(sys.base, state, "sensitivity base state");
          require_tied(params);
          AdvectionField su(state.u), sb(state.b), bu(sys.base->u), bb(sys.base->b);
          du.add(-1.0, su, bu);
          du.add(-1.0, bu, su);
          du.add(1.0, sb, bb);
          du.add(1.0, bb, sb);
          db.add(-1.0, su, bb);
          db.add(-1.0, bu, sb);
          db.add(1.0, bb, su);
          db.add(1.0, sb, bu);
          t.du = du.result();
          t.db = db.result();
          if (params.beta_u != 0.0) t.du.axpy(-params.beta_u, I.apply(state.u));
          if (params.beta_b != 0.0) t.db.axpy(-params.beta_b, I.apply(state.b));
        } else {
          const Interpolant& I = require_interp(sys.interp);
          require_aligned(sys.base1, state, "difference-quotient base 1");
          require_aligned(sys.base2, state, "difference-quotient base 2");
          require_tied(params);
          if (sys.mu1 == sys.mu2) throw ValidationError("difference quotient requires mu1 != mu2");
          AdvectionField qu(state.u), qb(state.b);
          AdvectionField u1(sys.base1->u), b1(sys.base1->b), u2(sys.base2->u), b2(sys.base2->b);
          du.add(-1.0, qu, u1);
          du.add(-1.0, u2, qu);
          du.add(1.0, qb, b1);
          du.add(1.0, b2, qb);
          db.add(-1.0, qu, b1);
          db.add(-1.0, u2, qb);
          db.add(1.0, qb, u1);
          db.add(1.0, b2, qu);
          t.du = du.result();
          t.db = db.result();
          if (params.beta_u != 0.0) t.du.axpy(-params.beta_u, I.apply(state.u));
          if (params.beta_b != 0.0) t.db.axpy(-params.beta_b, I.apply(state.b));
        }
      },
      kind);
  return t;
}

Tendency forcing_terms(const SystemKind& kind, const PemState& state, const PemParams& params) {
  const Grid& g = state.grid();
  if (const auto* s = std::get_if<SensitivitySystem>(&kind)) {
    require_aligned(s->base, state, "sensitivity base state");
    require_tied(params);
    return {laplacian_h(s->base->u), laplacian_h(s->base->b)};
  }
  if (const auto* dq = std::get_if<DifferenceQuotientSystem>(&kind)) {
    require_aligned(dq->base1, state, "difference-quotient base 1");
    require_tied(params);
    return {laplacian_h(dq->base1->u), laplacian_h(dq->base1->b)};
  }
  return {VectorField2::zero(g), VectorField2::zero(g)};
}

Tendency diffusion_terms(const SystemKind& kind, const PemState& state, const PemParams& params) {
  const Diffusivities d = diffusivities(kind, params);
  auto diffuse = [](const VectorField2& w, double horizontal, double vertical) {
    VectorField2 out{horizontal * laplacian_h(w.x), horizontal * laplacian_h(w.y)};
    out.x.axpy(vertical, ddz2(w.x));
    out.y.axpy(vertical, ddz2(w.y));
    return out;
  };
  return {diffuse(state.u, d.horizontal_u, d.vertical_u), diffuse(state.b, d.horizontal_b, d.vertical_b)};
}

Tendency tendency(const SystemKind& kind, const PemState& state, const PemParams& params) {
  params.validate();
  Tendency t = explicit_terms(kind, state, params);
  const Tendency f = forcing_terms(kind, state, params);
  const Tendency d = diffusion_terms(kind, state, params);
  t.du += f.du;
  t.du += d.du;
  t.db += f.db;
  t.db += d.db;
  t.drift_u = barotropic_divergence(t.du);
  t.drift_b = barotropic_divergence(t.db);
  t.du = project_barotropic(t.du);
  t.db = project_barotropic(t.db);
  return t;
}

double dissipation(const PemState& s, const PemParams& p) {
  const NormReport n = norms(s, false);
  return p.mu * n.grad_u_l2 * n.grad_u_l2 + p.nu * n.dz_u_l2 * n.dz_u_l2 + p.kappa * n.grad_b_l2 * n.grad_b_l2 +
         p.sigma * n.dz_b_l2 * n.dz_b_l2;
}

double energy_budget(const PemState& state, const Tendency& t, const PemParams& params) {
  const double d = dissipation(state, params);
  const double r = inner_product(t.du, state.u) + inner_product(t.db, state.b) + d;
  return d > 0.0 ? std::abs(r) / d : std::abs(r);
}

DerivedFields derived_fields(const PemState& state, const PemParams& params) {
  const SystemKind kind = ReferenceSystem{};
  Tendency t = explicit_terms(kind, state, params);
  t.du += diffusion_terms(kind, state, params).du;
  return {vertical_component(state.u), vertical_component(state.b), pressure_solve(t.du)};
}

}  // namespace pemda
