#include "hsadapt/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hsadapt/filters.hpp"

namespace hsadapt {
namespace {

constexpr double kFloor = 0.25;  // lower end of both abundances and signatures
constexpr double kPeak = 0.95;

std::vector<double> smoothed_noise(std::size_t h, std::size_t w, double std_dev,
                                   std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(h * w);
  for (double& v : noise) v = normal(rng);
  std::vector<double> out(h * w);
  circular_convolve_separable(noise, out, h, w, gaussian_taps(std_dev, gaussian_radius(std_dev)));
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(out.size()));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

std::vector<double> abundance_map(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  const double coarse_std = std::max(1.0, static_cast<double>(std::min(h, w)) / 10.0);
  auto coarse = smoothed_noise(h, w, coarse_std, rng);
  const auto fine = smoothed_noise(h, w, 1.5, rng);
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] += 0.5 * fine[i];

  const auto [lo, hi] = std::minmax_element(coarse.begin(), coarse.end());
  const double min_v = *lo;
  const double range = *hi - *lo;
  for (double& v : coarse) v = range > 0.0 ? kFloor + (1.0 - kFloor) * (v - min_v) / range : 1.0;
  return coarse;
}

std::vector<double> signature(std::size_t bands, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int bumps = 2 + static_cast<int>(rng() % 2);
  const double span = static_cast<double>(bands);
  std::vector<double> s(bands, 0.0);
  for (int g = 0; g < bumps; ++g) {
    const double center = unit(rng) * std::max(0.0, span - 1.0);
    const double width = std::max(1.0, (0.15 + 0.25 * unit(rng)) * span);
    const double amp = 0.3 + 0.7 * unit(rng);
    for (std::size_t b = 0; b < bands; ++b) {
      const double t = (static_cast<double>(b) - center) / width;
      s[b] += amp * std::exp(-0.5 * t * t);
    }
  }
  const double peak = *std::max_element(s.begin(), s.end());
  for (double& v : s) v = kFloor + (1.0 - kFloor) * v / peak;
  return s;
}

}  // namespace

HSImage make_phantom(const Shape& shape, std::size_t rank, std::uint64_t seed) {
  validate_shape(shape);
  if (rank < 1 || rank > shape.channels)
    throw ParameterError("phantom rank must lie in [1, channels], got " + std::to_string(rank));

  std::mt19937_64 rng(seed);
  HSImage cube(shape, 0.0);
  const std::size_t pixels = shape.pixels();
  for (std::size_t r = 0; r < rank; ++r) {
    const auto abundance = abundance_map(shape.height, shape.width, rng);
    const auto spectrum = signature(shape.channels, rng);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      auto band = cube.band(c);
      for (std::size_t p = 0; p < pixels; ++p) band[p] += abundance[p] * spectrum[c];
    }
  }

  const auto data = cube.data();
  const double peak = *std::max_element(data.begin(), data.end());
  const double scale = kPeak / peak;
  for (double& v : cube.data()) v *= scale;
  return cube;
}

}  // namespace hsadapt
