#pragma once

#include "hsadapt/image.hpp"

namespace hsadapt {

inline constexpr double kPsnrCap = 99.0;

struct MetricReport {
  double psnr = 0.0;       ///< dB, peak 1.0
  double sam = 0.0;        ///< radians
  double ssim = 0.0;       ///< band-averaged
  double wall_time = 0.0;  ///< seconds per patch
};

/// 10 log10(1 / MSE) over all samples; `cap` when MSE < 1e-12.
double psnr(const HSImage& reference, const HSImage& estimate, double cap = kPsnrCap);

/// Mean spectral angle over pixels. Pixels where either spectrum has norm < 1e-12
/// are left out; throws DegenerateError if none remain.
double sam(const HSImage& reference, const HSImage& estimate);

/// Per-band SSIM (11x11 Gaussian window, std 1.5, K1 = 0.01, K2 = 0.03, L = 1),
/// valid-region average, then mean over bands.
double ssim(const HSImage& reference, const HSImage& estimate);

MetricReport evaluate(const HSImage& reference, const HSImage& estimate, double wall_time = 0.0);

}  // namespace hsadapt
