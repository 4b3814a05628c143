#include "pemda/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pemda/errors.hpp"

namespace pemda {

ParamThresholds compute_thresholds(const PemParams& p, double C, double k0, double Ch1) {
  p.validate();
  if (!(C >= 0.0) || !(k0 >= 0.0) || !std::isfinite(C) || !std::isfinite(k0)) {
    throw ValidationError("C and k0 must be finite and non-negative");
  }
  if (!(Ch1 > 0.0) || !std::isfinite(Ch1)) throw ValidationError("Ch1 must be positive");

  const double mu = p.mu, nu = p.nu;
  const double a = C * k0;
  const double a2 = a * a, a4 = a2 * a2;

  ParamThresholds t;
  t.inputs_C = C;
  t.inputs_k0 = k0;
  t.inputs_Ch1 = Ch1;
  t.R1 = a + 8 * a2 / mu + 0.75 * std::pow(2 * a, 4.0 / 3.0) * std::cbrt(4 / mu) + 2 * a2 / nu +
         16 * a4 / (mu * nu * nu) + 432 * a4 / (mu * mu * mu);
  t.R2 = a + 6 * a2 / mu + 2 * a2 / nu + 16 * a4 / (mu * nu * nu) + 64 * a4 / (mu * mu * mu);
  t.R3 = a + 2 * a2 / mu;
  t.beta_min = 2 * (t.R1 + t.R2 + t.R3);

  const double root = std::sqrt(mu * nu / (mu + 4 * nu));
  const double inf = std::numeric_limits<double>::infinity();
  auto bound = [&](double beta) { return beta > 0.0 ? root / (beta * Ch1) : inf; };
  t.h_max = std::min(bound(p.beta_u), bound(p.beta_b));
  t.beta_ok = p.beta_u >= t.beta_min && p.beta_b >= t.beta_min;
  t.h_ok = p.h > 0.0 && p.h <= t.h_max;
  if (a == 0.0) t.warning = fmt::format("degenerate inputs: C * k0 = 0 makes every threshold vanish");
  return t;
}

}  // namespace pemda
