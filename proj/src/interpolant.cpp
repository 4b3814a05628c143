#include "pemda/interpolant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "pemda/errors.hpp"
#include "pemda/random.hpp"

namespace pemda {

InterpolantKind parse_interpolant_kind(std::string_view name) {
  if (name == "spectral" || name == "spectral_truncation" || name == "SpectralTruncation") {
    return InterpolantKind::SpectralTruncation;
  }
  if (name == "box" || name == "box_average" || name == "BoxAverage") return InterpolantKind::BoxAverage;
  throw ValidationError(fmt::format("unknown interpolant kind '{}' (expected spectral or box)", name));
}

const char* to_string(InterpolantKind kind) {
  return kind == InterpolantKind::SpectralTruncation ? "spectral" : "box";
}

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

int boxes_along(double period, double h, const char* axis) {
  const double ratio = period / h;
  const double r = std::round(ratio);
  if (r < 1.0 || std::abs(ratio - r) > 1e-9 * ratio) {
    throw ValidationError(fmt::format("box average: h = {} does not divide the {} period {}", h, axis, period));
  }
  return static_cast<int>(r);
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

Interpolant::Interpolant(InterpolantKind kind, double h, Grid grid) : kind_(kind), h_(h), grid_(std::move(grid)) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("interpolant resolution h must be positive");
  if (kind_ != InterpolantKind::BoxAverage) return;

  nbx_ = boxes_along(grid_.L1(), h, "x");
  nby_ = boxes_along(grid_.L2(), h, "y");
  nbz_ = boxes_along(Grid::Lz(), h, "z");
  const Grid& g = grid_;
  const double x0 = 0.5 * h, y0 = 0.5 * h, z0 = -1.0 + 0.5 * h;
  auto add = [&](std::size_t storage, bool conj, int m, int n, int q, bool kept) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double kx = two_pi * m / g.L1(), ky = two_pi * n / g.L2(), kz = std::numbers::pi * q;
    ModeEntry e;
    e.storage = storage;
    e.conjugate = conj;
    e.cls = (std::size_t(wrap(m, nbx_)) * nby_ + wrap(n, nby_)) * nbz_ + wrap(q, nbz_);
    e.sinc = sinc(0.5 * kx * h) * sinc(0.5 * ky * h) * sinc(0.5 * kz * h);
    e.phase = std::polar(1.0, kx * x0 + ky * y0 + kz * z0);
    e.kept = kept;
    modes_.push_back(e);
  };
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nxh(); ++ix) {
        if (g.is_nyquist(ix, iy, iz)) continue;
        const std::size_t idx = g.spectral_index(ix, iy, iz);
        const int m = g.mode_x(ix), n = g.mode_y(iy), q = g.mode_z(iz);
        const bool kept = g.dealias_kept(ix, iy, iz);
        add(idx, false, m, n, q, kept);
        if (ix > 0) add(idx, true, -m, -n, -q, kept);
      }
  kept_sinc2_.assign(std::size_t(nbx_) * nby_ * nbz_, 0.0);
  for (const ModeEntry& e : modes_) {
    if (e.kept) kept_sinc2_[e.cls] += e.sinc * e.sinc;
  }
}

std::vector<Complex> Interpolant::class_sums(const SpectralField& w) const {
  if (!w.grid().same_shape(grid_)) throw ValidationError("interpolant applied to a field on another grid");
  std::vector<Complex> sums(kept_sinc2_.size());
  auto c = w.coeffs();
  for (const ModeEntry& e : modes_) {
    const Complex coef = e.conjugate ? std::conj(c[e.storage]) : c[e.storage];
    sums[e.cls] += e.sinc * coef * e.phase;
  }
  return sums;
}

SpectralField Interpolant::apply(const SpectralField& w) const {
  if (!w.grid().same_shape(grid_)) throw ValidationError("interpolant applied to a field on another grid");
  SpectralField out(grid_, w.parity());
  if (kind_ == InterpolantKind::SpectralTruncation) {
    const double cutoff = std::numbers::pi / h_ * (1.0 + 1e-12);
    const Grid& g = grid_;
    for (int iz = 0; iz < g.nz(); ++iz)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nxh(); ++ix) {
          if (g.is_nyquist(ix, iy, iz)) continue;
          const double kmax = std::max({std::abs(g.kx(ix)), std::abs(g.ky(iy)), std::abs(g.kz(iz))});
          if (kmax <= cutoff) out.at(ix, iy, iz) = w.at(ix, iy, iz);
        }
    return out;
  }
  const std::vector<Complex> sums = class_sums(w);
  auto dst = out.coeffs();
  for (const ModeEntry& e : modes_) {
    if (e.conjugate || !e.kept) continue;
    const double den = kept_sinc2_[e.cls];
    if (den <= 1e-14) continue;
    dst[e.storage] = e.sinc * std::conj(e.phase) * sums[e.cls] / den;
  }
  return out;
}

VectorField2 Interpolant::apply(const VectorField2& w) const { return {apply(w.x), apply(w.y)}; }

SpectralField Interpolant::piecewise_constant_dealiased(const SpectralField& w) const {
  if (kind_ != InterpolantKind::BoxAverage) return apply(w);
  const std::vector<Complex> sums = class_sums(w);
  SpectralField out(grid_, w.parity());
  auto dst = out.coeffs();
  for (const ModeEntry& e : modes_) {
    if (e.conjugate || !e.kept) continue;
    dst[e.storage] = e.sinc * std::conj(e.phase) * sums[e.cls];
  }
  return out;
}

std::vector<double> Interpolant::box_means(const SpectralField& w) const {
  if (kind_ != InterpolantKind::BoxAverage) throw ValidationError("box_means requires a BoxAverage interpolant");
  // Mean over box j: sum over lattice classes r of G(r) e^{2 pi i r.j / nb}.
  const std::vector<Complex> g = class_sums(w);
  auto twiddles = [](int n) {
    std::vector<Complex> t(std::size_t(n) * n);
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < n; ++j) t[std::size_t(r) * n + j] = std::polar(1.0, 2.0 * std::numbers::pi * r * j / n);
    return t;
  };
  const auto tx = twiddles(nbx_), ty = twiddles(nby_), tz = twiddles(nbz_);
  // g is laid out [rx][ry][rz]; transform rz -> jz, ry -> jy, rx -> jx.
  std::vector<Complex> a(g.size()), b(g.size());
  for (int rx = 0; rx < nbx_; ++rx)
    for (int ry = 0; ry < nby_; ++ry)
      for (int jz = 0; jz < nbz_; ++jz) {
        Complex s{};
        for (int rz = 0; rz < nbz_; ++rz) s += g[(std::size_t(rx) * nby_ + ry) * nbz_ + rz] * tz[std::size_t(rz) * nbz_ + jz];
        a[(std::size_t(rx) * nby_ + ry) * nbz_ + jz] = s;
      }
  for (int rx = 0; rx < nbx_; ++rx)
    for (int jy = 0; jy < nby_; ++jy)
      for (int jz = 0; jz < nbz_; ++jz) {
        Complex s{};
        for (int ry = 0; ry < nby_; ++ry) s += a[(std::size_t(rx) * nby_ + ry) * nbz_ + jz] * ty[std::size_t(ry) * nby_ + jy];
        b[(std::size_t(rx) * nby_ + jy) * nbz_ + jz] = s;
      }
  std::vector<double> means(g.size());
  for (int jz = 0; jz < nbz_; ++jz)
    for (int jy = 0; jy < nby_; ++jy)
      for (int jx = 0; jx < nbx_; ++jx) {
        Complex s{};
        for (int rx = 0; rx < nbx_; ++rx) s += b[(std::size_t(rx) * nby_ + jy) * nbz_ + jz] * tx[std::size_t(rx) * nbx_ + jx];
        means[(std::size_t(jz) * nby_ + jy) * nbx_ + jx] = s.real();
      }
  return means;
}

double Interpolant::observation_norm(const SpectralField& w) const {
  if (kind_ != InterpolantKind::BoxAverage) return l2_norm(apply(w));
  double sum = 0.0;
  for (double m : box_means(w)) sum += m * m;
  return std::sqrt(sum * h_ * h_ * h_);
}

ConstantsReport measure_constants(const Interpolant& interp, int trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("measure_constants: trials must be >= 1");
  const Grid& g = interp.grid();
  const FieldSpectrum band = FieldSpectrum::dealiased_band(g);
  const bool box = interp.kind() == InterpolantKind::BoxAverage;

  ConstantsReport r;
  r.trials = trials;
  std::optional<SpectralField> first;
  for (int t = 0; t < trials; ++t) {
    const SpectralField w = random_field(g, Parity::Even, band, seed, 100 + static_cast<std::uint64_t>(t));
    const double norm = l2_norm(w);
    const double image = interp.observation_norm(w);
    const double err = box ? std::sqrt(std::max(0.0, norm * norm - image * image)) : l2_norm(w - interp.apply(w));
    r.measured_C1 = std::max(r.measured_C1, err / (interp.h() * h1_norm(w)));
    r.measured_C2 = std::max(r.measured_C2, image / norm);
    if (!first) first = w;
  }
  // Power iteration on the (self-adjoint) compressed operator.
  SpectralField v = *first;
  double estimate = 0.0;
  for (int it = 0; it < 30; ++it) {
    SpectralField next = interp.piecewise_constant_dealiased(v);
    const double n = l2_norm(next);
    if (n == 0.0) break;
    v = (1.0 / n) * std::move(next);
    estimate = interp.observation_norm(v) / l2_norm(v);
  }
  r.measured_C2 = std::max(r.measured_C2, estimate);
  return r;
}

double commutes_with_div_check(const Interpolant& interp, const VectorField2& w) {
  return l2_norm(divergence_h(interp.apply(w)) - interp.apply(divergence_h(w)));
}

}  // namespace pemda
