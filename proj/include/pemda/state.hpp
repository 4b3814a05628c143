#pragma once

#include <filesystem>
#include <utility>

#include "pemda/spectral.hpp"

namespace pemda {

/// Horizontal vector field (w1, w2).
struct VectorField2 {
  SpectralField x;
  SpectralField y;

  static VectorField2 zero(const Grid& g, Parity p = Parity::Even) {
    return {SpectralField(g, p), SpectralField(g, p)};
  }
  const Grid& grid() const { return x.grid(); }

  VectorField2& operator+=(const VectorField2& o);
  VectorField2& operator-=(const VectorField2& o);
  VectorField2& operator*=(double a);
  VectorField2& axpy(double a, const VectorField2& o);
};

VectorField2 operator+(VectorField2 a, const VectorField2& b);
VectorField2 operator-(VectorField2 a, const VectorField2& b);
VectorField2 operator*(double s, VectorField2 a);

double inner_product(const VectorField2& a, const VectorField2& b);
double l2_norm_squared(const VectorField2& w);

/// Prognostic state: horizontal velocity u and magnetic field b, both even in z.
struct PemState {
  VectorField2 u;
  VectorField2 b;
  double time = 0.0;

  static PemState zero(const Grid& g, double t = 0.0) {
    return {VectorField2::zero(g), VectorField2::zero(g), t};
  }
  const Grid& grid() const { return u.x.grid(); }
  bool all_finite() const;
};

/// Componentwise a - b; the time stamp is taken from a.
PemState difference(const PemState& a, const PemState& b);

/// z-independent 2D field stored as horizontal Fourier coefficients [n][m].
struct PressureField {
  Grid grid;
  std::vector<Complex> coeffs;

  explicit PressureField(Grid g) : grid(std::move(g)), coeffs(std::size_t(grid.ny()) * grid.nxh()) {}
  Complex& at(int ix, int iy) { return coeffs[std::size_t(iy) * grid.nxh() + ix]; }
  Complex at(int ix, int iy) const { return coeffs[std::size_t(iy) * grid.nxh() + ix]; }
  /// The field broadcast over z as an Even 3D field.
  SpectralField broadcast() const;
  /// Horizontal gradient broadcast over z.
  VectorField2 gradient() const;
};

struct DerivedFields {
  SpectralField u3;
  SpectralField b3;
  PressureField p;
};

SpectralField divergence_h(const VectorField2& w);

/// ||f||_{H1} = sqrt(||f||^2 + ||grad_h f||^2 + ||dz f||^2).
double h1_norm(const SpectralField& f);

/// L2 norm over the domain of the vertical average of div_h w.
double barotropic_divergence(const VectorField2& w);

/// w3 = -int_0^z div_h w ds. Requires the vertical average of div_h w to
/// vanish (periodicity of w3); otherwise throws SolvabilityError.
SpectralField vertical_component(const VectorField2& w);

/// Elsasser variables A = u + b, A* = u - b.
std::pair<VectorField2, VectorField2> elsasser(const PemState& s);
/// Inverse of elsasser(): u = (A + A*) / 2, b = (A - A*) / 2.
PemState from_elsasser(const VectorField2& A, const VectorField2& Astar, double time = 0.0);

struct NormReport {
  double l2_u = 0, l2_b = 0;
  double l4_A = 0, l4_Astar = 0;
  double h1_u = 0, h1_b = 0;
  double h2_u = 0, h2_b = 0;
  double dz_u_l2 = 0, dz_b_l2 = 0;
  // Horizontal-only seminorms ||grad_h w||_2.
  double grad_u_l2 = 0, grad_b_l2 = 0;

  bool operator==(const NormReport&) const = default;
};

// Norm conventions: ||w||_{H1}^2 = ||w||^2 + ||grad_h w||^2 + ||dz w||^2 and
// ||w||_{H2}^2 additionally sums all second derivatives. L4 norms of the
// Elsasser variables use |A| = sqrt(A1^2 + A2^2) and exact quadrature on a
// 3/2-padded grid.
// with_l4 = false skips the padded-grid quadrature and leaves the L4 fields 0.
NormReport norms(const PemState& s, bool with_l4 = true);
NormReport error_norms(const PemState& a, const PemState& b);

/// Returned by check_admissible(): how far a state is from the invariants.
struct AdmissibilityReport {
  double parity_defect = 0;   // max relative odd content over components
  double baro_div_u = 0;      // barotropic_divergence(u) / ||grad_h u||
  double baro_div_b = 0;
  bool ok(double tol = 1e-10) const {
    return parity_defect <= tol && baro_div_u <= tol && baro_div_b <= tol;
  }
};
AdmissibilityReport check_admissible(const PemState& s);

/// Removes the z-mean divergent part: the q = 0 modes are replaced by their
/// 2D Leray projection. Returns the projected field.
VectorField2 project_barotropic(const VectorField2& w);

/// Even-parity projection of all components plus barotropic projection.
PemState make_admissible(const PemState& s);

// PEMSNAP1 snapshot: "PEMSNAP1", u32 nx, ny, nz, f64 L1, L2, time, then the
// physical samples of u1, u2, b1, b2 (x fastest), all little-endian.
void write_snapshot(const std::filesystem::path& path, const PemState& s);
PemState read_snapshot(const std::filesystem::path& path, double dealias_fraction = 2.0 / 3.0);

}  // namespace pemda
