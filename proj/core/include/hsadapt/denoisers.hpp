#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hsadapt/image.hpp"

namespace hsadapt {

enum class DenoiserKind { gaussian_kernel, wavelet_soft_threshold, identity, zero, external, custom };

std::string_view to_string(DenoiserKind kind);

/// A frozen low-dimensional denoiser D_sigma acting on c-channel latents.
/// Implementations are stateless: the output is a pure function of (z, sigma).
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  std::size_t arity() const noexcept { return arity_; }
  bool concurrent_safe() const noexcept { return concurrent_safe_; }
  DenoiserKind kind() const noexcept { return kind_; }

  /// True when z -> D(z, sigma) is linear for every fixed sigma.
  virtual bool is_linear() const noexcept { return false; }

  /// Validates arity and sigma, then runs the map. Output has the input's shape.
  LatentImage denoise(const LatentImage& z, double sigma) const;

 protected:
  Denoiser(DenoiserKind kind, std::size_t arity, bool concurrent_safe);
  virtual LatentImage run(const LatentImage& z, double sigma) const = 0;

 private:
  DenoiserKind kind_;
  std::size_t arity_;
  bool concurrent_safe_;
};

using DenoiserHandle = std::shared_ptr<const Denoiser>;

/// Maps the noise level sigma to a denoiser strength parameter.
using StrengthRule = std::function<double(double)>;

DenoiserHandle identity_denoiser(std::size_t arity);
DenoiserHandle zero_denoiser(std::size_t arity);

struct GaussianKernelOptions {
  /// sigma -> kernel std in pixels. Default 10 * sigma.
  StrengthRule width_rule = [](double sigma) { return 10.0 * sigma; };
  /// For arity 3: widths of the two chroma channels of an orthonormal opponent
  /// basis are multiplied by this factor (luma keeps width_rule). 1 disables the
  /// basis change and filters each channel independently.
  double chroma_width_scale = 1.0;
};

/// Circular convolution with a normalized, truncated (radius ceil(3 std)) Gaussian.
/// Linear and non-expansive for every sigma.
DenoiserHandle gaussian_kernel_denoiser(std::size_t arity, GaussianKernelOptions options = {});

/// The 1-D taps the Gaussian denoiser uses at `sigma` (the 2-D kernel is their outer product).
std::vector<double> gaussian_denoiser_taps(double sigma, const GaussianKernelOptions& options = {});

/// Orthonormal opponent basis used by the arity-3 Gaussian denoiser: rows are
/// luma (1,1,1)/sqrt3 and the chroma axes (1,0,-1)/sqrt2, (1,-2,1)/sqrt6.
const std::array<std::array<double, 3>, 3>& opponent_basis();

struct WaveletOptions {
  /// sigma -> soft threshold tau. Default 3 * sigma.
  StrengthRule threshold_rule = [](double sigma) { return 3.0 * sigma; };
  std::size_t levels = 3;
};

/// Multi-level orthonormal Haar transform per channel, soft-thresholding of the
/// detail coefficients, inverse transform. Needs height, width >= 8. Odd lengths carry
/// their last sample to the next level unscaled, so constants are reproduced exactly
/// only when each level splits evenly.
DenoiserHandle wavelet_soft_threshold_denoiser(std::size_t arity, WaveletOptions options = {});

struct ExternalDenoiserOptions {
  /// Shell command with {input}, {output} and {sigma} placeholders.
  std::string command_template;
  std::filesystem::path workdir;
  std::size_t arity = 3;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
  /// Give every call its own subdirectory; only then may calls overlap.
  bool unique_call_dirs = false;
};

/// Process bridge: writes z as HSB to {input}, runs the command, reads {output}.
DenoiserHandle external_denoiser(ExternalDenoiserOptions options);

}  // namespace hsadapt
