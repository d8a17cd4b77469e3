#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hsadapt {

/// Real-to-complex 2-D DFT of a fixed height x width plane (FFTW, estimate-mode
/// plans, so transforms are bit-reproducible). The spectrum holds
/// height x (width / 2 + 1) coefficients. execute() is safe to call concurrently.
class RealFft2D {
 public:
  RealFft2D(std::size_t height, std::size_t width);
  ~RealFft2D();
  RealFft2D(const RealFft2D&) = delete;
  RealFft2D& operator=(const RealFft2D&) = delete;

  std::size_t spectrum_size() const noexcept { return height_ * (width_ / 2 + 1); }

  void forward(std::span<const double> plane, std::span<std::complex<double>> spectrum) const;
  /// Inverse transform including the 1 / (height width) normalization.
  void inverse(std::span<const std::complex<double>> spectrum, std::span<double> plane) const;

 private:
  struct Plans;
  std::size_t height_;
  std::size_t width_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace hsadapt
