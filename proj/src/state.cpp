#include "pemda/state.hpp"

#include <algorithm>
#include <cmath>

#include "pemda/errors.hpp"

namespace pemda {

// ---------------------------------------------------------------------------
// VectorField2

VectorField2& VectorField2::operator+=(const VectorField2& o) { return axpy(1.0, o); }
VectorField2& VectorField2::operator-=(const VectorField2& o) { return axpy(-1.0, o); }

VectorField2& VectorField2::operator*=(double a) {
  x *= a;
  y *= a;
  return *this;
}

VectorField2& VectorField2::axpy(double a, const VectorField2& o) {
  x.axpy(a, o.x);
  y.axpy(a, o.y);
  return *this;
}

VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
VectorField2 operator*(double s, VectorField2 a) { return a *= s; }

double inner_product(const VectorField2& a, const VectorField2& b) {
  return inner_product(a.x, b.x) + inner_product(a.y, b.y);
}

double l2_norm_squared(const VectorField2& w) { return l2_norm_squared(w.x) + l2_norm_squared(w.y); }

bool PemState::all_finite() const {
  return u.x.all_finite() && u.y.all_finite() && b.x.all_finite() && b.y.all_finite();
}

PemState difference(const PemState& a, const PemState& b) { return {a.u - b.u, a.b - b.b, a.time}; }

// ---------------------------------------------------------------------------
// Pressure

SpectralField PressureField::broadcast() const {
  SpectralField out(grid, Parity::Even);
  for (int iy = 0; iy < grid.ny(); ++iy)
    for (int ix = 0; ix < grid.nxh(); ++ix) out.at(ix, iy, 0) = at(ix, iy);
  return out;
}

VectorField2 PressureField::gradient() const {
  const SpectralField p3 = broadcast();
  return {ddx(p3), ddy(p3)};
}

// ---------------------------------------------------------------------------
// Diagnostic fields

SpectralField divergence_h(const VectorField2& w) { return ddx(w.x) + ddy(w.y); }

double barotropic_divergence(const VectorField2& w) { return z_mean_norm(divergence_h(w)); }

namespace {

double grad_h_norm(const VectorField2& w) {
  return std::sqrt(l2_norm_squared(ddx(w.x)) + l2_norm_squared(ddy(w.x)) + l2_norm_squared(ddx(w.y)) +
                   l2_norm_squared(ddy(w.y)));
}

}  // namespace

SpectralField vertical_component(const VectorField2& w) {
  const SpectralField div = divergence_h(w);
  return -integrate_z_from_zero(div, grad_h_norm(w));
}

std::pair<VectorField2, VectorField2> elsasser(const PemState& s) { return {s.u + s.b, s.u - s.b}; }

PemState from_elsasser(const VectorField2& A, const VectorField2& Astar, double time) {
  return {0.5 * (A + Astar), 0.5 * (A - Astar), time};
}

// ---------------------------------------------------------------------------
// Norms

namespace {

struct ModalSums {
  double s0 = 0, sh = 0, sz = 0, s4 = 0;
};

void accumulate(const SpectralField& f, ModalSums& m) {
  const Grid& g = f.grid();
  for (int iz = 0; iz < g.nz(); ++iz) {
    const double kz2 = iz == g.nz() / 2 ? 0.0 : g.kz(iz) * g.kz(iz);
    for (int iy = 0; iy < g.ny(); ++iy) {
      const double ky2 = iy == g.ny() / 2 ? 0.0 : g.ky(iy) * g.ky(iy);
      for (int ix = 0; ix < g.nxh(); ++ix) {
        const double kx2 = ix == g.nx() / 2 ? 0.0 : g.kx(ix) * g.kx(ix);
        const double w = g.parseval_weight(ix) * std::norm(f.at(ix, iy, iz)) * g.volume();
        const double kh2 = kx2 + ky2;
        const double k2 = kh2 + kz2;
        m.s0 += w;
        m.sh += w * kh2;
        m.sz += w * kz2;
        m.s4 += w * k2 * k2;
      }
    }
  }
}

}  // namespace

double h1_norm(const SpectralField& f) {
  ModalSums m;
  accumulate(f, m);
  return std::sqrt(m.s0 + m.sh + m.sz);
}

namespace {

ModalSums sums(const VectorField2& w) {
  ModalSums m;
  accumulate(w.x, m);
  accumulate(w.y, m);
  return m;
}

double l4_norm(const VectorField2& w) {
  const Grid fine = w.grid().padded(1.5);
  const PhysicalField a = transform_to_physical(resample(w.x, fine));
  const PhysicalField b = transform_to_physical(resample(w.y, fine));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double m2 = a.values[i] * a.values[i] + b.values[i] * b.values[i];
    sum += m2 * m2;
  }
  const double dv = fine.volume() / static_cast<double>(fine.physical_size());
  return std::pow(sum * dv, 0.25);
}

}  // namespace

NormReport norms(const PemState& s, bool with_l4) {
  NormReport r;
  const ModalSums mu = sums(s.u);
  const ModalSums mb = sums(s.b);
  r.l2_u = std::sqrt(mu.s0);
  r.l2_b = std::sqrt(mb.s0);
  r.grad_u_l2 = std::sqrt(mu.sh);
  r.grad_b_l2 = std::sqrt(mb.sh);
  r.dz_u_l2 = std::sqrt(mu.sz);
  r.dz_b_l2 = std::sqrt(mb.sz);
  r.h1_u = std::sqrt(mu.s0 + mu.sh + mu.sz);
  r.h1_b = std::sqrt(mb.s0 + mb.sh + mb.sz);
  r.h2_u = std::sqrt(mu.s0 + mu.sh + mu.sz + mu.s4);
  r.h2_b = std::sqrt(mb.s0 + mb.sh + mb.sz + mb.s4);
  if (!with_l4) return r;
  const auto [A, Astar] = elsasser(s);
  r.l4_A = l4_norm(A);
  r.l4_Astar = l4_norm(Astar);
  return r;
}

NormReport error_norms(const PemState& a, const PemState& b) {
  if (!a.grid().same_shape(b.grid())) throw ValidationError("error_norms: states on different grids");
  return norms(difference(a, b));
}

// ---------------------------------------------------------------------------
// Admissibility

VectorField2 project_barotropic(const VectorField2& w) {
  VectorField2 out = w;
  const Grid& g = w.grid();
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double ky = iy == g.ny() / 2 ? 0.0 : g.ky(iy);
    for (int ix = 0; ix < g.nxh(); ++ix) {
      const double kx = ix == g.nx() / 2 ? 0.0 : g.kx(ix);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      Complex& cx = out.x.at(ix, iy, 0);
      Complex& cy = out.y.at(ix, iy, 0);
      const Complex kc = (kx * cx + ky * cy) / k2;
      cx -= kx * kc;
      cy -= ky * kc;
    }
  }
  return out;
}

PemState make_admissible(const PemState& s) {
  auto even = [](const VectorField2& w) {
    return VectorField2{project_parity(w.x, Parity::Even), project_parity(w.y, Parity::Even)};
  };
  return {project_barotropic(even(s.u)), project_barotropic(even(s.b)), s.time};
}

AdmissibilityReport check_admissible(const PemState& s) {
  AdmissibilityReport r;
  for (const SpectralField* f : {&s.u.x, &s.u.y, &s.b.x, &s.b.y}) {
    const double d = f->parity() == Parity::Even ? parity_defect(*f) : 1.0;
    r.parity_defect = std::max(r.parity_defect, d);
  }
  auto rel = [](const VectorField2& w) {
    const double scale = grad_h_norm(w);
    const double bd = barotropic_divergence(w);
    return scale > 0.0 ? bd / scale : bd;
  };
  r.baro_div_u = rel(s.u);
  r.baro_div_b = rel(s.b);
  return r;
}

}  // namespace pemda
