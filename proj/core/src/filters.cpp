#include "hsadapt/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsadapt/errors.hpp"

namespace hsadapt {

std::size_t gaussian_radius(double std_dev) {
  if (!(std_dev >= 0.0) || !std::isfinite(std_dev))
    throw ParameterError("Gaussian std must be finite and >= 0");
  return static_cast<std::size_t>(std::ceil(3.0 * std_dev));
}

std::vector<double> gaussian_taps(double std_dev, std::size_t radius) {
  if (!(std_dev >= 0.0)) throw ParameterError("gaussian_taps: negative or NaN standard deviation");
  std::vector<double> taps(2 * radius + 1, 0.0);
  if (std_dev == 0.0) {
    taps[radius] = 1.0;
    return taps;
  }
  const double denom = 2.0 * std_dev * std_dev;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(radius);
    taps[i] = std::exp(-t * t / denom);
  }
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& v : taps) v /= total;
  return taps;
}

double Kernel2D::sum() const noexcept { return std::accumulate(taps.begin(), taps.end(), 0.0); }

Kernel2D Kernel2D::gaussian(double std_dev, std::size_t side) {
  if (side % 2 == 0) throw ParameterError("kernel support must be odd");
  Kernel2D k;
  k.radius = side / 2;
  const auto g = gaussian_taps(std_dev, k.radius);
  k.taps.assign(side * side, 0.0);
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) k.taps[i * side + j] = g[i] * g[j];
  return k;
}

void circular_convolve_separable(std::span<const double> in, std::span<double> out,
                                 std::size_t height, std::size_t width,
                                 std::span<const double> taps) {
  const std::size_t radius = taps.size() / 2;
  const auto r = static_cast<std::ptrdiff_t>(radius);
  std::vector<double> tmp(height * width, 0.0);

  // Rows. Symmetric taps make convolution and correlation identical.
  std::vector<double> line(width + 2 * radius);
  for (std::size_t i = 0; i < height; ++i) {
    const double* src = in.data() + i * width;
    for (std::size_t j = 0; j < line.size(); ++j)
      line[j] = src[wrap_index(static_cast<std::ptrdiff_t>(j) - r, width)];
    double* dst = tmp.data() + i * width;
    for (std::size_t j = 0; j < width; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * line[j + t];
      dst[j] = acc;
    }
  }

  // Columns.
  std::vector<std::size_t> rows(height + 2 * radius);
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = wrap_index(static_cast<std::ptrdiff_t>(i) - r, height);
  for (std::size_t i = 0; i < height; ++i) {
    double* dst = out.data() + i * width;
    std::fill(dst, dst + width, 0.0);
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const double w = taps[t];
      const double* src = tmp.data() + rows[i + t] * width;
      for (std::size_t j = 0; j < width; ++j) dst[j] += w * src[j];
    }
  }
}

void circular_convolve_2d(std::span<const double> in, std::span<double> out, std::size_t height,
                          std::size_t width, const Kernel2D& kernel, bool correlate) {
  const auto r = static_cast<std::ptrdiff_t>(kernel.radius);
  const std::ptrdiff_t sign = correlate ? 1 : -1;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::ptrdiff_t di = -r; di <= r; ++di) {
    for (std::ptrdiff_t dj = -r; dj <= r; ++dj) {
      const double w = kernel.at(di, dj);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < height; ++i) {
        const std::size_t si = wrap_index(static_cast<std::ptrdiff_t>(i) + sign * di, height);
        const double* src = in.data() + si * width;
        double* dst = out.data() + i * width;
        const std::size_t shift = wrap_index(sign * dj, width);
        // dst[j] += w * src[(j + shift) mod width], split to avoid a modulo per sample.
        const std::size_t head = width - shift;
        for (std::size_t j = 0; j < head; ++j) dst[j] += w * src[j + shift];
        for (std::size_t j = head; j < width; ++j) dst[j] += w * src[j + shift - width];
      }
    }
  }
}

}  // namespace hsadapt
