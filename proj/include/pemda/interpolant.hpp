#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pemda/state.hpp"

namespace pemda {

enum class InterpolantKind { SpectralTruncation, BoxAverage };

InterpolantKind parse_interpolant_kind(std::string_view name);
const char* to_string(InterpolantKind kind);

/// Observation operator I_h at resolution h, acting componentwise in all three
/// coordinates.
///
/// SpectralTruncation keeps the modes with max(|kx|,|ky|,|kz|) <= pi/h.
///
/// BoxAverage observes the mean of the field over each cube of side h (the
/// cubes tile the slab, so h must divide L1, L2 and 2). Box means are computed
/// exactly from the Fourier coefficients. apply() returns the band-limited
/// field in the solver's space whose box means equal the observed ones (the
/// least-squares reconstruction from dealiased box indicators), which makes
/// it idempotent.
class Interpolant {
 public:
  Interpolant(InterpolantKind kind, double h, Grid grid);

  InterpolantKind kind() const { return kind_; }
  double h() const { return h_; }
  const Grid& grid() const { return grid_; }

  SpectralField apply(const SpectralField& w) const;
  VectorField2 apply(const VectorField2& w) const;

  // Box lattice (BoxAverage only).
  int boxes_x() const { return nbx_; }
  int boxes_y() const { return nby_; }
  int boxes_z() const { return nbz_; }
  /// Means over each box, flat [jz][jy][jx]; box (jx,jy,jz) covers
  /// [jx h, (jx+1) h) x [jy h, (jy+1) h) x [-1 + jz h, -1 + (jz+1) h).
  std::vector<double> box_means(const SpectralField& w) const;
  /// L2 norm of the piecewise-constant function built from the box means.
  double observation_norm(const SpectralField& w) const;
  /// The piecewise-constant box-mean function projected onto the dealiased
  /// modes (used for operator-norm estimates).
  SpectralField piecewise_constant_dealiased(const SpectralField& w) const;

 private:
  struct ModeEntry {
    std::size_t storage;  // index into the half spectrum
    bool conjugate;       // entry represents the conjugate partner (-m,-n,-q)
    std::size_t cls;      // lattice class
    double sinc;          // product of sinc(k_i h / 2)
    Complex phase;        // e^{i k . x0}, x0 the centre of box (0,0,0)
    bool kept;
  };
  std::vector<Complex> class_sums(const SpectralField& w) const;

  InterpolantKind kind_;
  double h_;
  Grid grid_;
  int nbx_ = 0, nby_ = 0, nbz_ = 0;
  std::vector<ModeEntry> modes_;
  std::vector<double> kept_sinc2_;  // per class: sum of sinc^2 over kept modes
};

struct ConstantsReport {
  double measured_C1 = 0;  // sup ||w - I_h w||_2 / (h ||w||_H1)
  double measured_C2 = 0;  // operator-norm estimate of I_h in L2
  int trials = 0;
};

/// Empirical constants of the approximation and boundedness axioms over
/// `trials` random smooth fields (modes up to the dealiasing cutoff).
/// For BoxAverage the constants are those of the box-mean observation
/// operator itself (piecewise-constant output, exact L2 norms).
ConstantsReport measure_constants(const Interpolant& interp, int trials, std::uint64_t seed);

/// ||div_h I_h(w) - I_h(div_h w)||_2.
double commutes_with_div_check(const Interpolant& interp, const VectorField2& w);

}  // namespace pemda
