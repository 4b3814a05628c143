#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pemda/spectral.hpp"

namespace pemda {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Invariant suite on grid g: transforms, Parseval, basis derivatives,
/// vertical integration, incompressibility of derived fields, B cancellation,
/// semi-discrete energy identity, interpolant constants and a manufactured
/// diffusion decay.
std::vector<CheckResult> run_verify_suite(const Grid& g, std::uint64_t seed);

}  // namespace pemda
