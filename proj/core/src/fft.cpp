#include "hsadapt/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "hsadapt/errors.hpp"

namespace hsadapt {
namespace {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw Error("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

}  // namespace

struct RealFft2D::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft2D::RealFft2D(std::size_t height, std::size_t width)
    : height_(height), width_(width), plans_(std::make_unique<Plans>()) {
  if (height == 0 || width == 0) throw DimensionError("FFT plane must be non-empty");
  const std::size_t n = height * width;
  FftwBuffer real(n * sizeof(double));
  FftwBuffer spec(spectrum_size() * sizeof(fftw_complex));
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_r2c_2d(static_cast<int>(height), static_cast<int>(width),
                                         static_cast<double*>(real.ptr),
                                         static_cast<fftw_complex*>(spec.ptr), FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_c2r_2d(static_cast<int>(height), static_cast<int>(width),
                                         static_cast<fftw_complex*>(spec.ptr),
                                         static_cast<double*>(real.ptr), FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->inverse) throw Error("FFTW planning failed");
}

RealFft2D::~RealFft2D() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->inverse) fftw_destroy_plan(plans_->inverse);
}

void RealFft2D::forward(std::span<const double> plane,
                        std::span<std::complex<double>> spectrum) const {
  const std::size_t n = height_ * width_;
  FftwBuffer real(n * sizeof(double));
  FftwBuffer spec(spectrum_size() * sizeof(fftw_complex));
  std::memcpy(real.ptr, plane.data(), n * sizeof(double));
  fftw_execute_dft_r2c(plans_->forward, static_cast<double*>(real.ptr),
                       static_cast<fftw_complex*>(spec.ptr));
  std::memcpy(spectrum.data(), spec.ptr, spectrum_size() * sizeof(fftw_complex));
}

void RealFft2D::inverse(std::span<const std::complex<double>> spectrum,
                        std::span<double> plane) const {
  const std::size_t n = height_ * width_;
  FftwBuffer real(n * sizeof(double));
  FftwBuffer spec(spectrum_size() * sizeof(fftw_complex));
  // c2r destroys its input, so always work on a copy.
  std::memcpy(spec.ptr, spectrum.data(), spectrum_size() * sizeof(fftw_complex));
  fftw_execute_dft_c2r(plans_->inverse, static_cast<fftw_complex*>(spec.ptr),
                       static_cast<double*>(real.ptr));
  const double scale = 1.0 / static_cast<double>(n);
  const auto* src = static_cast<const double*>(real.ptr);
  for (std::size_t i = 0; i < n; ++i) plane[i] = src[i] * scale;
}

}  // namespace hsadapt
