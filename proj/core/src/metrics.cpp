#include "hsadapt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hsadapt/filters.hpp"

namespace hsadapt {
namespace {

constexpr std::size_t kSsimSide = 11;
constexpr double kSsimStd = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

// Valid-region separable filtering: output is (h - side + 1) x (w - side + 1).
std::vector<double> filter_valid(std::span<const double> in, std::size_t h, std::size_t w,
                                 std::span<const double> taps) {
  const std::size_t side = taps.size();
  const std::size_t oh = h - side + 1;
  const std::size_t ow = w - side + 1;
  std::vector<double> rows(h * ow, 0.0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < side; ++t) acc += taps[t] * in[i * w + j + t];
      rows[i * ow + j] = acc;
    }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t t = 0; t < side; ++t) {
      const double wt = taps[t];
      for (std::size_t j = 0; j < ow; ++j) out[i * ow + j] += wt * rows[(i + t) * ow + j];
    }
  return out;
}

double ssim_band(std::span<const double> x, std::span<const double> y, std::size_t h,
                 std::size_t w, std::span<const double> taps) {
  const std::size_t n = h * w;
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, h, w, taps);
  const auto mu_y = filter_valid(y, h, w, taps);
  const auto e_xx = filter_valid(xx, h, w, taps);
  const auto e_yy = filter_valid(yy, h, w, taps);
  const auto e_xy = filter_valid(xy, h, w, taps);

  const double c1 = kSsimK1 * kSsimK1;
  const double c2 = kSsimK2 * kSsimK2;
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace

double psnr(const HSImage& reference, const HSImage& estimate, double cap) {
  detail::check_same_shape(reference.shape(), estimate.shape(), "psnr");
  const auto a = reference.data();
  const auto b = estimate.data();
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(a.size());
  if (mse < 1e-12) return cap;
  return std::min(cap, 10.0 * std::log10(1.0 / mse));
}

double sam(const HSImage& reference, const HSImage& estimate) {
  detail::check_same_shape(reference.shape(), estimate.shape(), "sam");
  if (reference.channels() < 2) throw DimensionError("sam needs at least 2 bands");
  const std::size_t pixels = reference.plane_size();
  const std::size_t bands = reference.channels();
  const auto a = reference.data();
  const auto b = estimate.data();

  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t p = 0; p < pixels; ++p) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t c = 0; c < bands; ++c) {
      const double u = a[c * pixels + p];
      const double v = b[c * pixels + p];
      dot += u * v;
      na += u * u;
      nb += v * v;
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12) continue;
    total += std::acos(std::clamp(dot / (na * nb), -1.0, 1.0));
    ++counted;
  }
  if (counted == 0) throw DegenerateError("sam: every pixel spectrum has near-zero norm");
  return total / static_cast<double>(counted);
}

double ssim(const HSImage& reference, const HSImage& estimate) {
  detail::check_same_shape(reference.shape(), estimate.shape(), "ssim");
  if (reference.height() < kSsimSide || reference.width() < kSsimSide)
    throw DimensionError("ssim needs height and width >= 11, got " + to_string(reference.shape()));
  const auto taps = gaussian_taps(kSsimStd, kSsimSide / 2);
  double total = 0.0;
  for (std::size_t c = 0; c < reference.channels(); ++c)
    total += ssim_band(reference.band(c), estimate.band(c), reference.height(), reference.width(),
                       taps);
  return total / static_cast<double>(reference.channels());
}

MetricReport evaluate(const HSImage& reference, const HSImage& estimate, double wall_time) {
  MetricReport report;
  report.psnr = psnr(reference, estimate);
  report.sam = reference.channels() >= 2 ? sam(reference, estimate) : 0.0;
  report.ssim = ssim(reference, estimate);
  report.wall_time = wall_time;
  return report;
}

}  // namespace hsadapt
