#pragma once

#include <cstdint>

#include "pemda/state.hpp"

namespace pemda {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so consumers never share hidden state and results
/// do not depend on call order.
///
/// Stream layout used by the library:
///   random_state:   streams 1..4 are u1, u2, b1, b2; stream 5 is the mean-flow
///                   direction.
///   random_field:   caller-supplied stream; counter = 2 * spectral index (+1
///                   for the imaginary part).
///   measure_constants: stream = 100 + trial.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * 0x9E3779B97F4A7C15ull); }
  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const { return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53; }
  /// Standard normal (Box-Muller on counters 2c and 2c + 1).
  double normal(std::uint64_t counter) const;

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t key_;
};

struct FieldSpectrum {
  // Largest |mode index| excited per direction.
  int max_mode_x = 2;
  int max_mode_y = 2;
  int max_mode_z = 2;
  // Amplitudes scale like (1 + |k|^2)^(-slope / 2).
  double slope = 2.0;
  bool zero_mean = true;

  /// Lowest ceil(N/4) modes in each direction.
  static FieldSpectrum quarter_band(const Grid& g);
  /// Every mode kept by the dealiasing cutoff.
  static FieldSpectrum dealiased_band(const Grid& g);
};

/// Random real, parity-pure, band-limited field. Deterministic in (seed, stream).
SpectralField random_field(const Grid& g, Parity parity, const FieldSpectrum& spectrum, std::uint64_t seed,
                           std::uint64_t stream);

struct InitSpec {
  std::uint64_t seed = 0;
  double norm_u = 1.0;  // ||u0||_2
  double norm_b = 1.0;  // ||b0||_2
  // Fraction of each field's energy carried by a spatially uniform component.
  double mean_fraction = 0.0;
  double slope = 2.0;
};

/// Admissible random initial state: even in z, barotropically divergence-free,
/// band-limited to the lowest ceil(N/4) modes, with the requested L2 norms.
PemState random_state(const Grid& g, const InitSpec& spec);

}  // namespace pemda
