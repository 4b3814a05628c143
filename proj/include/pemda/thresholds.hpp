#pragma once

#include <string>

#include "pemda/params.hpp"

namespace pemda {

/// Sufficient conditions for exponential synchronization, evaluated from the
/// generic constant C, the uniform bound k0 and the interpolant constant C_h^1.
struct ParamThresholds {
  double R1 = 0, R2 = 0, R3 = 0;
  double beta_min = 0;  // 2 (R1 + R2 + R3)
  // min over u, b of sqrt(mu nu / (mu + 4 nu)) / (beta C_h^1); infinite when both gains vanish.
  double h_max = 0;
  double inputs_C = 0, inputs_k0 = 0, inputs_Ch1 = 0;
  bool beta_ok = false;  // beta_u, beta_b >= beta_min
  bool h_ok = false;     // 0 < h <= h_max
  // Non-empty when the inputs are degenerate (C k0 = 0).
  std::string warning;
};

/// Requires C, k0 >= 0 and Ch1 > 0 besides valid params.
ParamThresholds compute_thresholds(const PemParams& params, double C, double k0, double Ch1);

}  // namespace pemda
