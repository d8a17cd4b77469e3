#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsadapt/filters.hpp"
#include "hsadapt/image.hpp"

namespace hsadapt {

enum class DegradationKind { identity, gaussian_blur, downsample };

std::string_view to_string(DegradationKind kind);

/// Linear observation operator A of y = A x + n, with circular boundaries.
/// Blur: per-band convolution. Downsample: low-pass convolution followed by
/// keeping every `factor`-th sample in each direction, grid anchored at (0, 0).
class DegradationOp {
 public:
  static DegradationOp identity(std::size_t height, std::size_t width);
  static DegradationOp gaussian_blur(std::size_t height, std::size_t width,
                                     double kernel_std = 2.0, std::size_t support = 9);
  static DegradationOp downsample(std::size_t height, std::size_t width, std::size_t factor = 4,
                                  double kernel_std = 1.6, std::size_t support = 13);

  DegradationKind kind() const noexcept { return kind_; }
  const Kernel2D& kernel() const noexcept { return kernel_; }
  /// 1-D factor of the (separable) kernel.
  const std::vector<double>& taps() const noexcept { return taps_; }
  double kernel_std() const noexcept { return kernel_std_; }
  std::size_t factor() const noexcept { return factor_; }
  std::size_t input_height() const noexcept { return in_h_; }
  std::size_t input_width() const noexcept { return in_w_; }
  std::size_t output_height() const noexcept { return in_h_ / factor_; }
  std::size_t output_width() const noexcept { return in_w_ / factor_; }

  /// One-line description recorded in result headers.
  std::string describe() const;

 private:
  DegradationOp(DegradationKind kind, std::size_t h, std::size_t w)
      : kind_(kind), in_h_(h), in_w_(w) {}

  DegradationKind kind_;
  std::size_t in_h_;
  std::size_t in_w_;
  std::size_t factor_ = 1;
  double kernel_std_ = 0.0;
  Kernel2D kernel_;
  std::vector<double> taps_{1.0};
};

HSImage apply(const DegradationOp& op, const HSImage& x);
HSImage adjoint(const DegradationOp& op, const HSImage& y);

/// Single-plane forms used by the iterative solvers.
void apply_plane(const DegradationOp& op, std::span<const double> in, std::span<double> out);
void adjoint_plane(const DegradationOp& op, std::span<const double> in, std::span<double> out);

/// x + n with n i.i.d. N(0, sigma^2); not clipped. sigma == 0 returns x unchanged.
HSImage add_awgn(const HSImage& x, double sigma, std::uint64_t seed);

enum class Task { denoise_10, denoise_20, deblur, sisr4 };

std::string_view to_string(Task task);
/// Accepts "denoise10", "denoise_10", ... ; throws ParameterError otherwise.
Task parse_task(std::string_view name);

struct DegradationParams {
  double blur_std = 2.0;
  std::size_t blur_support = 9;
  std::size_t sr_factor = 4;
  double sr_kernel_std = 1.6;
  std::size_t sr_kernel_support = 13;
};

struct TaskSetup {
  DegradationOp op;
  double sigma;
};

/// Operator and noise level for a task on a height x width ground truth.
TaskSetup make_task(Task task, std::size_t height, std::size_t width,
                    const DegradationParams& params = {});

/// Bilinear x`factor` upsampling on the (0, 0)-anchored grid with periodic wrap:
/// low-res sample (i, j) lands on high-res pixel (factor i, factor j).
HSImage bilinear_upsample(const HSImage& y, std::size_t factor);

}  // namespace hsadapt
