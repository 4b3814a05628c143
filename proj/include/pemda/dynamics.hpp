#pragma once

#include <variant>

#include "pemda/interpolant.hpp"
#include "pemda/params.hpp"
#include "pemda/state.hpp"

namespace pemda {

// The four right-hand sides. External fields are borrowed, not owned; they
// must outlive the call and carry the same time stamp as the evaluated state.

/// Unforced primitive equations with magnetic field.
struct ReferenceSystem {};

/// Assimilation system nudged towards `observation` (the reference solution
/// at the same time) through I_h.
struct NudgedSystem {
  const Interpolant* interp = nullptr;
  const PemState* observation = nullptr;
};

/// Tangent (sensitivity) system for d/dmu of an assimilation trajectory, with
/// the magnetic diffusivity tied to the viscosity (kappa = mu, sigma = nu).
/// `base` is the assimilation state at the evaluation time.
struct SensitivitySystem {
  const Interpolant* interp = nullptr;
  const PemState* base = nullptr;
};

/// Exact equations of (u1 - u2) / (mu1 - mu2) for two assimilation
/// trajectories run at viscosities mu1 and mu2.
struct DifferenceQuotientSystem {
  const Interpolant* interp = nullptr;
  const PemState* base1 = nullptr;
  const PemState* base2 = nullptr;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

using SystemKind = std::variant<ReferenceSystem, NudgedSystem, SensitivitySystem, DifferenceQuotientSystem>;

struct Tendency {
  VectorField2 du;
  VectorField2 db;
  // Barotropic divergence removed by the projection (a drift diagnostic).
  double drift_u = 0.0;
  double drift_b = 0.0;
};

/// Dealiased B(a, w) = (a . grad_h) w + a3 dz w with a3 = vertical_component(a).
VectorField2 trilinear_B(const VectorField2& advector, const VectorField2& advected);

/// Zero-mean 2D pressure p with lap_h p = div_h (vertical average of rhs).
PressureField pressure_solve(const VectorField2& rhs);
/// grad_h p broadcast over z, for p from pressure_solve().
VectorField2 pressure_gradient(const VectorField2& rhs);

/// Diagonal diffusion coefficients of a system.
struct Diffusivities {
  double horizontal_u, vertical_u, horizontal_b, vertical_b;
};
Diffusivities diffusivities(const SystemKind& kind, const PemParams& params);

/// Advection, Lorentz and nudging terms (unprojected, tendency sign).
Tendency explicit_terms(const SystemKind& kind, const PemState& state, const PemParams& params);
/// State-independent inhomogeneity: lap_h of the base field for the
/// Sensitivity and DifferenceQuotient systems, zero otherwise.
Tendency forcing_terms(const SystemKind& kind, const PemState& state, const PemParams& params);
/// Diffusion applied to the state: (mu lap_h + nu dzz) u, (kappa lap_h + sigma dzz) b.
Tendency diffusion_terms(const SystemKind& kind, const PemState& state, const PemParams& params);

/// Full right-hand side with the barotropic (pressure) projection applied to
/// both du and db.
Tendency tendency(const SystemKind& kind, const PemState& state, const PemParams& params);

/// Relative residual of the semi-discrete energy identity:
/// |<du,u> + <db,b> + mu|grad u|^2 + nu|dz u|^2 + kappa|grad b|^2 + sigma|dz b|^2| / dissipation.
double energy_budget(const PemState& state, const Tendency& t, const PemParams& params);

/// Dissipation mu|grad u|^2 + nu|dz u|^2 + kappa|grad b|^2 + sigma|dz b|^2.
double dissipation(const PemState& state, const PemParams& params);

/// u3, b3 and the reference-system pressure for a state.
DerivedFields derived_fields(const PemState& state, const PemParams& params);

}  // namespace pemda
