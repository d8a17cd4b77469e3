#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsadapt {

/// Truncation radius ceil(3 * std) used by every Gaussian in the library.
std::size_t gaussian_radius(double std_dev);

/// Normalized, symmetric Gaussian taps t = -radius..radius. std_dev == 0 gives a unit impulse.
std::vector<double> gaussian_taps(double std_dev, std::size_t radius);

/// Square 2-D kernel with odd side 2 * radius + 1, stored row-major.
struct Kernel2D {
  std::size_t radius = 0;
  std::vector<double> taps{1.0};

  std::size_t side() const noexcept { return 2 * radius + 1; }
  /// Tap at offset (di, dj), both in [-radius, radius].
  double at(std::ptrdiff_t di, std::ptrdiff_t dj) const noexcept {
    const auto r = static_cast<std::ptrdiff_t>(radius);
    return taps[static_cast<std::size_t>((di + r) * static_cast<std::ptrdiff_t>(side()) + dj + r)];
  }
  double sum() const noexcept;

  /// Outer product of 1-D Gaussian taps; side must be odd.
  static Kernel2D gaussian(double std_dev, std::size_t side);
};

/// Circular convolution of one plane with symmetric separable taps (rows, then columns).
void circular_convolve_separable(std::span<const double> in, std::span<double> out,
                                 std::size_t height, std::size_t width,
                                 std::span<const double> taps);

/// out(p) = sum_d k(d) in(p - d) with periodic wrap, or the correlation
/// out(p) = sum_d k(d) in(p + d) when correlate is set (the adjoint).
void circular_convolve_2d(std::span<const double> in, std::span<double> out, std::size_t height,
                          std::size_t width, const Kernel2D& kernel, bool correlate);

/// Index wrap for arbitrary signed offsets.
inline std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) noexcept {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

}  // namespace hsadapt
