#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "pemda/dynamics.hpp"

namespace pemda {

struct IntegratorConfig {
  double dt = 2e-3;
  double t_end = 1.0;
  int checkpoint_stride = 1;
  std::uint64_t seed = 0;

  /// Number of steps, t_end / dt rounded to the nearest integer.
  std::size_t steps() const;
  /// Throws ValidationError for dt <= 0, t_end <= 0, stride < 1, or when
  /// dt * max(beta_u, beta_b) >= 0.5.
  void validate(const PemParams& params) const;
};

/// External fields needed by one step from t_n to t_{n+1}: the system at t_n,
/// at the bootstrap stage (first step only; time t_{n+1}) and at t_{n+1}.
struct StepExternals {
  SystemKind start;
  SystemKind stage;
  SystemKind end;

  static StepExternals uniform(const SystemKind& kind) { return {kind, kind, kind}; }
};

struct StepInfo {
  // Barotropic divergence removed from the tendency at t_n.
  double drift_u = 0.0;
  double drift_b = 0.0;
  // |(E^{n+1} - E^n)/dt + 2 D(midpoint)| / D(midpoint) with E = ||u||^2 + ||b||^2.
  double budget_residual = 0.0;
};

/// IMEX CNAB2 integrator: diffusion by Crank-Nicolson (diagonal in Fourier
/// space), advection, Lorentz and nudging terms by AB2, inhomogeneous forcing
/// by the trapezoidal rule. The first step is a Heun predictor-corrector with
/// the same implicit treatment; its predictor ("stage") is kept so tangent and
/// difference-quotient runs can reproduce the scheme's exact derivative.
class Integrator {
 public:
  Integrator(PemState initial, PemParams params, IntegratorConfig cfg);

  /// Advances one step. Throws BlowUpError if the new state is not finite.
  void advance(const StepExternals& ext);

  const PemState& state() const { return state_; }
  const PemState& previous() const { return previous_; }
  /// Predictor of the first step; null before the first step and after later ones.
  const PemState* stage() const { return steps_ == 1 && stage_ ? &*stage_ : nullptr; }
  std::size_t steps_taken() const { return steps_; }
  double time() const { return state_.time; }
  double time_at(std::size_t n) const { return static_cast<double>(n) * cfg_.dt; }
  const StepInfo& last_info() const { return info_; }
  const PemParams& params() const { return params_; }
  const IntegratorConfig& config() const { return cfg_; }

 private:
  void step(const StepExternals& ext);

  PemParams params_;
  IntegratorConfig cfg_;
  PemState state_;
  PemState previous_;
  std::optional<PemState> stage_;
  std::optional<Tendency> explicit_prev_;
  std::size_t steps_ = 0;
  StepInfo info_;
};

/// Crank-Nicolson update x_new = P[(1 + dt/2 L) x + dt rhs] / (1 - dt/2 L)
/// with L the diagonal diffusion operator and P the barotropic projection.
PemState implicit_update(const PemState& x, const Tendency& rhs, const Diffusivities& d, double dt, double t_new);

/// Energy ||u||^2 + ||b||^2.
double energy(const PemState& s);

}  // namespace pemda
