#include "hsadapt/denoisers.hpp"

#include <cmath>
#include <numbers>

#include "hsadapt/filters.hpp"

namespace hsadapt {

std::string_view to_string(DenoiserKind kind) {
  switch (kind) {
    case DenoiserKind::gaussian_kernel: return "gaussian_kernel";
    case DenoiserKind::wavelet_soft_threshold: return "wavelet_soft_threshold";
    case DenoiserKind::identity: return "identity";
    case DenoiserKind::zero: return "zero";
    case DenoiserKind::external: return "external";
    case DenoiserKind::custom: return "custom";
  }
  return "unknown";
}

Denoiser::Denoiser(DenoiserKind kind, std::size_t arity, bool concurrent_safe)
    : kind_(kind), arity_(arity), concurrent_safe_(concurrent_safe) {
  if (arity != 1 && arity != 3)
    throw ParameterError("denoiser arity must be 1 or 3, got " + std::to_string(arity));
}

LatentImage Denoiser::denoise(const LatentImage& z, double sigma) const {
  if (z.channels() != arity_)
    throw DimensionError("denoiser expects " + std::to_string(arity_) + " channels, got " +
                         std::to_string(z.channels()));
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ParameterError("denoiser sigma must be finite and >= 0");
  LatentImage out = run(z, sigma);
  if (!(out.shape() == z.shape()))
    throw DimensionError("denoiser changed the image shape");
  return out;
}

namespace {

class IdentityDenoiser final : public Denoiser {
 public:
  explicit IdentityDenoiser(std::size_t arity)
      : Denoiser(DenoiserKind::identity, arity, true) {}
  bool is_linear() const noexcept override { return true; }

 protected:
  LatentImage run(const LatentImage& z, double) const override { return z; }
};

class ZeroDenoiser final : public Denoiser {
 public:
  explicit ZeroDenoiser(std::size_t arity) : Denoiser(DenoiserKind::zero, arity, true) {}
  bool is_linear() const noexcept override { return true; }

 protected:
  LatentImage run(const LatentImage& z, double) const override {
    return LatentImage(z.shape(), 0.0);
  }
};

class GaussianKernelDenoiser final : public Denoiser {
 public:
  GaussianKernelDenoiser(std::size_t arity, GaussianKernelOptions options)
      : Denoiser(DenoiserKind::gaussian_kernel, arity, true), options_(std::move(options)) {
    if (!(options_.chroma_width_scale > 0.0))
      throw ParameterError("chroma width scale must be > 0");
  }
  bool is_linear() const noexcept override { return true; }

 protected:
  LatentImage run(const LatentImage& z, double sigma) const override {
    const double width = options_.width_rule(sigma);
    if (!(width >= 0.0)) throw ParameterError("Gaussian width rule returned a negative std");
    const auto luma = gaussian_taps(width, gaussian_radius(width));
    LatentImage out(z.shape(), 0.0);

    if (arity() != 3 || options_.chroma_width_scale == 1.0) {
      for (std::size_t c = 0; c < z.channels(); ++c)
        circular_convolve_separable(z.band(c), out.band(c), z.height(), z.width(), luma);
      return out;
    }

    const double chroma_width = width * options_.chroma_width_scale;
    const auto chroma = gaussian_taps(chroma_width, gaussian_radius(chroma_width));
    const auto& basis = opponent_basis();
    const std::size_t n = z.plane_size();

    LatentImage opponent(z.shape(), 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      auto dst = opponent.band(k);
      for (std::size_t c = 0; c < 3; ++c) {
        const double w = basis[k][c];
        const auto src = z.band(c);
        for (std::size_t p = 0; p < n; ++p) dst[p] += w * src[p];
      }
    }
    LatentImage filtered(z.shape(), 0.0);
    for (std::size_t k = 0; k < 3; ++k)
      circular_convolve_separable(opponent.band(k), filtered.band(k), z.height(), z.width(),
                                  k == 0 ? luma : chroma);
    for (std::size_t c = 0; c < 3; ++c) {
      auto dst = out.band(c);
      for (std::size_t k = 0; k < 3; ++k) {
        const double w = basis[k][c];
        const auto src = filtered.band(k);
        for (std::size_t p = 0; p < n; ++p) dst[p] += w * src[p];
      }
    }
    return out;
  }

 private:
  GaussianKernelOptions options_;
};

// One orthonormal Haar analysis step on `n` samples spaced by `stride`.
// Odd lengths carry the last sample into the approximation half unchanged.
void haar_forward_1d(double* x, std::size_t n, std::size_t stride, std::vector<double>& scratch) {
  const std::size_t pairs = n / 2;
  const std::size_t approx = n - pairs;
  scratch.resize(n);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = x[(2 * i) * stride];
    const double b = x[(2 * i + 1) * stride];
    scratch[i] = (a + b) * std::numbers::sqrt2 / 2.0;
    scratch[approx + i] = (a - b) * std::numbers::sqrt2 / 2.0;
  }
  if (n % 2 == 1) scratch[pairs] = x[(n - 1) * stride];
  for (std::size_t i = 0; i < n; ++i) x[i * stride] = scratch[i];
}

void haar_inverse_1d(double* x, std::size_t n, std::size_t stride, std::vector<double>& scratch) {
  const std::size_t pairs = n / 2;
  const std::size_t approx = n - pairs;
  scratch.resize(n);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = x[i * stride];
    const double d = x[(approx + i) * stride];
    scratch[2 * i] = (a + d) * std::numbers::sqrt2 / 2.0;
    scratch[2 * i + 1] = (a - d) * std::numbers::sqrt2 / 2.0;
  }
  if (n % 2 == 1) scratch[n - 1] = x[pairs * stride];
  for (std::size_t i = 0; i < n; ++i) x[i * stride] = scratch[i];
}

class WaveletDenoiser final : public Denoiser {
 public:
  WaveletDenoiser(std::size_t arity, WaveletOptions options)
      : Denoiser(DenoiserKind::wavelet_soft_threshold, arity, true), options_(std::move(options)) {
    if (options_.levels < 1) throw ParameterError("wavelet levels must be >= 1");
  }

 protected:
  LatentImage run(const LatentImage& z, double sigma) const override {
    if (z.height() < 8 || z.width() < 8)
      throw DimensionError("wavelet denoiser needs height, width >= 8, got " +
                           to_string(z.shape()));
    const double tau = options_.threshold_rule(sigma);
    if (!(tau >= 0.0)) throw ParameterError("wavelet threshold rule returned a negative value");

    const std::size_t h = z.height();
    const std::size_t w = z.width();
    LatentImage out = z;
    std::vector<double> scratch;
    std::vector<std::pair<std::size_t, std::size_t>> regions;

    for (std::size_t c = 0; c < out.channels(); ++c) {
      double* plane = out.band(c).data();
      regions.clear();
      std::size_t rh = h, rw = w;
      for (std::size_t level = 0; level < options_.levels && rh >= 2 && rw >= 2; ++level) {
        regions.emplace_back(rh, rw);
        for (std::size_t i = 0; i < rh; ++i) haar_forward_1d(plane + i * w, rw, 1, scratch);
        for (std::size_t j = 0; j < rw; ++j) haar_forward_1d(plane + j, rh, w, scratch);
        rh = (rh + 1) / 2;
        rw = (rw + 1) / 2;
      }

      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          if (i < rh && j < rw) continue;  // coarsest approximation
          double& v = plane[i * w + j];
          const double mag = std::abs(v) - tau;
          v = mag > 0.0 ? std::copysign(mag, v) : 0.0;
        }

      for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
        const auto [ah, aw] = *it;
        for (std::size_t j = 0; j < aw; ++j) haar_inverse_1d(plane + j, ah, w, scratch);
        for (std::size_t i = 0; i < ah; ++i) haar_inverse_1d(plane + i * w, aw, 1, scratch);
      }
    }
    return out;
  }

 private:
  WaveletOptions options_;
};

}  // namespace

DenoiserHandle identity_denoiser(std::size_t arity) {
  return std::make_shared<IdentityDenoiser>(arity);
}

DenoiserHandle zero_denoiser(std::size_t arity) { return std::make_shared<ZeroDenoiser>(arity); }

DenoiserHandle gaussian_kernel_denoiser(std::size_t arity, GaussianKernelOptions options) {
  return std::make_shared<GaussianKernelDenoiser>(arity, std::move(options));
}

std::vector<double> gaussian_denoiser_taps(double sigma, const GaussianKernelOptions& options) {
  const double width = options.width_rule(sigma);
  return gaussian_taps(width, gaussian_radius(width));
}

const std::array<std::array<double, 3>, 3>& opponent_basis() {
  static const std::array<std::array<double, 3>, 3> basis = [] {
    const double s3 = 1.0 / std::sqrt(3.0);
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    return std::array<std::array<double, 3>, 3>{{
        {s3, s3, s3},
        {s2, 0.0, -s2},
        {s6, -2.0 * s6, s6},
    }};
  }();
  return basis;
}

DenoiserHandle wavelet_soft_threshold_denoiser(std::size_t arity, WaveletOptions options) {
  return std::make_shared<WaveletDenoiser>(arity, std::move(options));
}

}  // namespace hsadapt
