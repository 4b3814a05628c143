#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "pemda/errors.hpp"
#include "pemda/experiments.hpp"

namespace pemda {

DecayFit fit_decay_rate(const std::vector<RunRecord>& records, double t_start, double t_stop) {
  if (!(t_stop >= t_start)) throw ValidationError("fit_decay_rate: empty window");
  std::vector<double> ts, ys;
  for (const RunRecord& r : records) {
    if (r.t < t_start || r.t > t_stop) continue;
    if (!r.err_l2) throw ValidationError("fit_decay_rate: record without an error value");
    if (!(*r.err_l2 > 0.0)) {
      throw ValidationError(fmt::format("fit_decay_rate: non-positive error {} at t = {}", *r.err_l2, r.t));
    }
    ts.push_back(r.t);
    ys.push_back(std::log(*r.err_l2));
  }
  const std::size_t n = ts.size();
  if (n < 2) throw ValidationError("fit_decay_rate: fewer than two records in the window");
  const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double ctt = 0, cty = 0, cyy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = ts[i] - tm, dy = ys[i] - ym;
    ctt += dt * dt;
    cty += dt * dy;
    cyy += dy * dy;
  }
  if (!(ctt > 0.0)) throw ValidationError("fit_decay_rate: records do not span a time interval");
  DecayFit fit;
  fit.points = n;
  // Log values equal up to rounding: a flat line fits perfectly.
  const double eps = std::numeric_limits<double>::epsilon();
  if (cyy <= 16 * eps * eps * n * std::max(1.0, ym * ym)) {
    fit.rate = 0.0;
    fit.r2 = 1.0;
    return fit;
  }
  fit.rate = cty / ctt;
  fit.r2 = (cty * cty) / (ctt * cyy);
  return fit;
}

DecayWindow select_decay_window(const std::vector<RunRecord>& records) {
  DecayWindow w;
  if (records.empty() || !records.front().err_l2) return w;
  const double e0 = *records.front().err_l2;
  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t start = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].err_l2 && *records[i].err_l2 < 0.5 * e0) {
      start = i;
      break;
    }
  }
  if (start == records.size()) return w;
  std::size_t stop = records.size() - 1;
  for (std::size_t i = start; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    const double scale = std::hypot(r.norms.l2_u, r.norms.l2_b);
    if (!r.err_l2 || std::sqrt(*r.err_l2) < 1e3 * eps * scale) {
      stop = i == start ? i : i - 1;
      break;
    }
  }
  w.t_start = records[start].t;
  w.t_stop = records[stop].t;
  w.found = stop > start;
  return w;
}

}  // namespace pemda
