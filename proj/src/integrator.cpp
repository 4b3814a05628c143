#include "pemda/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pemda/errors.hpp"

namespace pemda {

std::size_t IntegratorConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

void IntegratorConfig::validate(const PemParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError(fmt::format("dt must be positive (got {})", dt));
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw ValidationError(fmt::format("t_end must be positive (got {})", t_end));
  }
  if (checkpoint_stride < 1) throw ValidationError("checkpoint_stride must be >= 1");
  const double n = t_end / dt;
  if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n)) {
    throw ValidationError(fmt::format("t_end = {} is not a whole number of steps of dt = {}", t_end, dt));
  }
  const double beta = std::max(params.beta_u, params.beta_b);
  if (dt * beta >= 0.5) {
    throw ValidationError(fmt::format("dt * max(beta_u, beta_b) = {} must stay below 0.5", dt * beta));
  }
}

namespace {

Tendency combine(double a, const Tendency& x, double b, const Tendency& y) {
  Tendency out{a * x.du, a * x.db};
  out.du.axpy(b, y.du);
  out.db.axpy(b, y.db);
  return out;
}

Tendency& operator+=(Tendency& a, const Tendency& b) {
  a.du += b.du;
  a.db += b.db;
  return a;
}

VectorField2 crank_nicolson(const VectorField2& x, const VectorField2& rhs, double horizontal, double vertical,
                            double dt) {
  const Grid& g = x.grid();
  VectorField2 num = x;
  for (auto [dst, src] : {std::pair{&num.x, &rhs.x}, std::pair{&num.y, &rhs.y}}) {
    auto c = dst->coeffs();
    auto r = src->coeffs();
    for (int iz = 0; iz < g.nz(); ++iz)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nxh(); ++ix) {
          const std::size_t i = g.spectral_index(ix, iy, iz);
          const double L = -(horizontal * (g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy)) + vertical * g.kz(iz) * g.kz(iz));
          c[i] = (1.0 + 0.5 * dt * L) * c[i] + dt * r[i];
        }
  }
  num = project_barotropic(num);
  for (SpectralField* f : {&num.x, &num.y}) {
    auto c = f->coeffs();
    for (int iz = 0; iz < g.nz(); ++iz)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nxh(); ++ix) {
          const double L = -(horizontal * (g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy)) + vertical * g.kz(iz) * g.kz(iz));
          c[g.spectral_index(ix, iy, iz)] /= 1.0 - 0.5 * dt * L;
        }
  }
  return {project_parity(num.x, Parity::Even), project_parity(num.y, Parity::Even)};
}

void require_finite(const PemState& s, const char* what) {
  if (!s.all_finite()) throw BlowUpError(fmt::format("non-finite {} at t = {}", what, s.time), s.time);
}

}  // namespace

PemState implicit_update(const PemState& x, const Tendency& rhs, const Diffusivities& d, double dt, double t_new) {
  return {crank_nicolson(x.u, rhs.du, d.horizontal_u, d.vertical_u, dt),
          crank_nicolson(x.b, rhs.db, d.horizontal_b, d.vertical_b, dt), t_new};
}

double energy(const PemState& s) { return l2_norm_squared(s.u) + l2_norm_squared(s.b); }

Integrator::Integrator(PemState initial, PemParams params, IntegratorConfig cfg)
    : params_(params), cfg_(cfg), state_(std::move(initial)), previous_(state_) {
  params_.validate();
  cfg_.validate(params_);
  if (state_.time != 0.0) throw ValidationError("initial state must start at t = 0");
  require_finite(state_, "initial state");
}

void Integrator::advance(const StepExternals& ext) {
  try {
    step(ext);
  } catch (const NonFiniteError& e) {
    throw BlowUpError(fmt::format("non-finite values while stepping from t = {}: {}", state_.time, e.what()),
                      state_.time);
  }
}

void Integrator::step(const StepExternals& ext) {
  const double dt = cfg_.dt;
  const double t1 = time_at(steps_ + 1);
  const Grid& g = state_.grid();
  const Diffusivities d = diffusivities(ext.start, params_);
  const PemState clock1 = PemState::zero(g, t1);

  const Tendency e0 = explicit_terms(ext.start, state_, params_);
  const Tendency f0 = forcing_terms(ext.start, state_, params_);
  const Tendency f1 = forcing_terms(ext.end, clock1, params_);

  std::optional<PemState> next;
  if (!explicit_prev_) {
    // Heun bootstrap.
    Tendency rhs = e0;
    rhs += combine(0.5, f0, 0.5, forcing_terms(ext.stage, clock1, params_));
    PemState stage = implicit_update(state_, rhs, d, dt, t1);
    require_finite(stage, "bootstrap stage");
    const Tendency es = explicit_terms(ext.stage, stage, params_);
    Tendency rhs2 = combine(0.5, e0, 0.5, es);
    rhs2 += combine(0.5, f0, 0.5, f1);
    next.emplace(implicit_update(state_, rhs2, d, dt, t1));
    stage_ = std::move(stage);
  } else {
    Tendency rhs = combine(1.5, e0, -0.5, *explicit_prev_);
    rhs += combine(0.5, f0, 0.5, f1);
    next.emplace(implicit_update(state_, rhs, d, dt, t1));
  }
  require_finite(*next, "state");

  VectorField2 raw_u = e0.du + f0.du;
  VectorField2 raw_b = e0.db + f0.db;
  info_.drift_u = barotropic_divergence(raw_u);
  info_.drift_b = barotropic_divergence(raw_b);

  const PemState mid{0.5 * (state_.u + next->u), 0.5 * (state_.b + next->b), 0.5 * (state_.time + t1)};
  const double diss = dissipation(mid, params_);
  const double r = std::abs((energy(*next) - energy(state_)) / dt + 2.0 * diss);
  info_.budget_residual = diss > 0.0 ? r / diss : r;

  explicit_prev_ = e0;
  previous_ = std::move(state_);
  state_ = std::move(*next);
  ++steps_;
}

}  // namespace pemda
