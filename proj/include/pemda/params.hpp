#pragma once

#include <numbers>

namespace pemda {

/// Physical and assimilation parameters.
///   mu, nu       horizontal / vertical viscosity
///   kappa, sigma horizontal / vertical magnetic diffusivity
///   beta_u, beta_b nudging gains, h observation resolution
struct PemParams {
  double mu = 1.0;
  double nu = 1.0;
  double kappa = 1.0;
  double sigma = 1.0;
  double beta_u = 0.0;
  double beta_b = 0.0;
  double h = 1.0;
  double L1 = 2.0 * std::numbers::pi;
  double L2 = 2.0 * std::numbers::pi;

  /// Throws ValidationError unless the viscosities, h and periods are
  /// positive and the gains non-negative.
  void validate() const;
};

}  // namespace pemda
