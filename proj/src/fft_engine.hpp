#pragma once

#include <fftw3.h>

#include <complex>
#include <memory>
#include <span>

namespace pemda {

// Owns a pair of 3D real<->complex FFTW plans for one grid shape. Plans are
// built with FFTW_ESTIMATE so results are bit-reproducible run to run, and
// executed through the new-array interface, which is safe to call
// concurrently.
class FftEngine {
 public:
  FftEngine(int nx, int ny, int nz);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  // Engine shared by every grid of this shape; plans live until exit.
  static std::shared_ptr<const FftEngine> shared(int nx, int ny, int nz);
  FftEngine& operator=(const FftEngine&) = delete;

  // Unnormalized forward DFT (e^{-i...}).
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  // Unnormalized inverse DFT; `in` is consumed.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

 private:
  int nx_, ny_, nz_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

}  // namespace pemda
