#include "hsadapt/degrade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "hsadapt/parallel.hpp"

namespace hsadapt {

std::string_view to_string(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::identity: return "identity";
    case DegradationKind::gaussian_blur: return "gaussian_blur";
    case DegradationKind::downsample: return "downsample";
  }
  return "unknown";
}

DegradationOp DegradationOp::identity(std::size_t height, std::size_t width) {
  validate_shape(Shape{height, width, 1});
  return DegradationOp(DegradationKind::identity, height, width);
}

DegradationOp DegradationOp::gaussian_blur(std::size_t height, std::size_t width,
                                           double kernel_std, std::size_t support) {
  validate_shape(Shape{height, width, 1});
  if (!(kernel_std > 0.0)) throw ParameterError("blur kernel std must be > 0");
  DegradationOp op(DegradationKind::gaussian_blur, height, width);
  op.kernel_std_ = kernel_std;
  op.kernel_ = Kernel2D::gaussian(kernel_std, support);
  op.taps_ = gaussian_taps(kernel_std, support / 2);
  return op;
}

DegradationOp DegradationOp::downsample(std::size_t height, std::size_t width, std::size_t factor,
                                        double kernel_std, std::size_t support) {
  validate_shape(Shape{height, width, 1});
  if (factor < 1) throw ParameterError("downsampling factor must be >= 1");
  if (height % factor != 0 || width % factor != 0)
    throw ParameterError("image " + std::to_string(height) + "x" + std::to_string(width) +
                         " is not divisible by the downsampling factor " + std::to_string(factor));
  if (!(kernel_std > 0.0)) throw ParameterError("low-pass kernel std must be > 0");
  DegradationOp op(DegradationKind::downsample, height, width);
  op.factor_ = factor;
  op.kernel_std_ = kernel_std;
  op.kernel_ = Kernel2D::gaussian(kernel_std, support);
  op.taps_ = gaussian_taps(kernel_std, support / 2);
  return op;
}

std::string DegradationOp::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " input=" << in_h_ << "x" << in_w_;
  if (kind_ != DegradationKind::identity)
    os << " kernel_std=" << kernel_std_ << " support=" << kernel_.side();
  if (kind_ == DegradationKind::downsample) os << " factor=" << factor_;
  return os.str();
}

void apply_plane(const DegradationOp& op, std::span<const double> in, std::span<double> out) {
  const std::size_t h = op.input_height();
  const std::size_t w = op.input_width();
  switch (op.kind()) {
    case DegradationKind::identity:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case DegradationKind::gaussian_blur:
      circular_convolve_2d(in, out, h, w, op.kernel(), false);
      return;
    case DegradationKind::downsample: {
      // (k * x)(s i, s j) evaluated only on the sampling grid, one axis at a time.
      const auto& g = op.taps();
      const auto r = static_cast<std::ptrdiff_t>(g.size() / 2);
      const std::size_t s = op.factor();
      const std::size_t oh = op.output_height();
      const std::size_t ow = op.output_width();
      std::vector<double> cols(h * ow, 0.0);
      for (std::size_t row = 0; row < h; ++row) {
        const double* src = in.data() + row * w;
        for (std::size_t j = 0; j < ow; ++j) {
          const auto cj = static_cast<std::ptrdiff_t>(s * j);
          double acc = 0.0;
          for (std::ptrdiff_t d = -r; d <= r; ++d)
            acc += g[static_cast<std::size_t>(d + r)] * src[wrap_index(cj - d, w)];
          cols[row * ow + j] = acc;
        }
      }
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < oh; ++i) {
        const auto ci = static_cast<std::ptrdiff_t>(s * i);
        double* dst = out.data() + i * ow;
        for (std::ptrdiff_t d = -r; d <= r; ++d) {
          const double wt = g[static_cast<std::size_t>(d + r)];
          const double* src = cols.data() + wrap_index(ci - d, h) * ow;
          for (std::size_t j = 0; j < ow; ++j) dst[j] += wt * src[j];
        }
      }
      return;
    }
  }
}

void adjoint_plane(const DegradationOp& op, std::span<const double> in, std::span<double> out) {
  const std::size_t h = op.input_height();
  const std::size_t w = op.input_width();
  switch (op.kind()) {
    case DegradationKind::identity:
      std::copy(in.begin(), in.end(), out.begin());
      return;
    case DegradationKind::gaussian_blur:
      circular_convolve_2d(in, out, h, w, op.kernel(), true);
      return;
    case DegradationKind::downsample: {
      // Zero-insertion upsampling followed by correlation: the two passes of
      // apply_plane transposed, scattering from the sampling grid.
      const auto& g = op.taps();
      const auto r = static_cast<std::ptrdiff_t>(g.size() / 2);
      const std::size_t s = op.factor();
      const std::size_t oh = op.output_height();
      const std::size_t ow = op.output_width();
      std::vector<double> cols(h * ow, 0.0);
      for (std::size_t i = 0; i < oh; ++i) {
        const auto ci = static_cast<std::ptrdiff_t>(s * i);
        const double* src = in.data() + i * ow;
        for (std::ptrdiff_t d = -r; d <= r; ++d) {
          const double wt = g[static_cast<std::size_t>(d + r)];
          double* dst = cols.data() + wrap_index(ci - d, h) * ow;
          for (std::size_t j = 0; j < ow; ++j) dst[j] += wt * src[j];
        }
      }
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t row = 0; row < h; ++row) {
        double* dst = out.data() + row * w;
        const double* src = cols.data() + row * ow;
        for (std::size_t j = 0; j < ow; ++j) {
          const double v = src[j];
          const auto cj = static_cast<std::ptrdiff_t>(s * j);
          for (std::ptrdiff_t d = -r; d <= r; ++d)
            dst[wrap_index(cj - d, w)] += g[static_cast<std::size_t>(d + r)] * v;
        }
      }
      return;
    }
  }
}

HSImage apply(const DegradationOp& op, const HSImage& x) {
  if (x.height() != op.input_height() || x.width() != op.input_width())
    throw DimensionError("apply: image " + to_string(x.shape()) + " does not match operator input " +
                         std::to_string(op.input_height()) + "x" + std::to_string(op.input_width()));
  HSImage out(Shape{op.output_height(), op.output_width(), x.channels()}, 0.0);
  parallel_for(x.channels(), [&](std::size_t c) { apply_plane(op, x.band(c), out.band(c)); });
  return out;
}

HSImage adjoint(const DegradationOp& op, const HSImage& y) {
  if (y.height() != op.output_height() || y.width() != op.output_width())
    throw DimensionError("adjoint: image " + to_string(y.shape()) +
                         " does not match operator output " + std::to_string(op.output_height()) +
                         "x" + std::to_string(op.output_width()));
  HSImage out(Shape{op.input_height(), op.input_width(), y.channels()}, 0.0);
  parallel_for(y.channels(), [&](std::size_t c) { adjoint_plane(op, y.band(c), out.band(c)); });
  return out;
}

HSImage add_awgn(const HSImage& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be >= 0");
  HSImage out = x;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (double& v : out.data()) v += normal(rng);
  return out;
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::denoise_10: return "denoise10";
    case Task::denoise_20: return "denoise20";
    case Task::deblur: return "deblur";
    case Task::sisr4: return "sisr4";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  std::string key;
  for (char ch : name)
    if (ch != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (key == "denoise10") return Task::denoise_10;
  if (key == "denoise20") return Task::denoise_20;
  if (key == "deblur") return Task::deblur;
  if (key == "sisr4") return Task::sisr4;
  throw ParameterError("unknown task '" + std::string(name) +
                       "' (expected denoise10, denoise20, deblur or sisr4)");
}

TaskSetup make_task(Task task, std::size_t height, std::size_t width,
                    const DegradationParams& params) {
  switch (task) {
    case Task::denoise_10: return {DegradationOp::identity(height, width), 0.10};
    case Task::denoise_20: return {DegradationOp::identity(height, width), 0.20};
    case Task::deblur:
      return {DegradationOp::gaussian_blur(height, width, params.blur_std, params.blur_support),
              0.05};
    case Task::sisr4:
      return {DegradationOp::downsample(height, width, params.sr_factor, params.sr_kernel_std,
                                        params.sr_kernel_support),
              0.005};
  }
  throw ParameterError("unknown task");
}

HSImage bilinear_upsample(const HSImage& y, std::size_t factor) {
  if (factor < 1) throw ParameterError("upsampling factor must be >= 1");
  const std::size_t lh = y.height();
  const std::size_t lw = y.width();
  const std::size_t h = lh * factor;
  const std::size_t w = lw * factor;
  HSImage out(Shape{h, w, y.channels()}, 0.0);
  const double inv = 1.0 / static_cast<double>(factor);
  for (std::size_t c = 0; c < y.channels(); ++c) {
    const auto src = y.band(c);
    auto dst = out.band(c);
    for (std::size_t i = 0; i < h; ++i) {
      const std::size_t i0 = i / factor;
      const std::size_t i1 = (i0 + 1) % lh;
      const double ti = static_cast<double>(i % factor) * inv;
      for (std::size_t j = 0; j < w; ++j) {
        const std::size_t j0 = j / factor;
        const std::size_t j1 = (j0 + 1) % lw;
        const double tj = static_cast<double>(j % factor) * inv;
        const double top = (1.0 - tj) * src[i0 * lw + j0] + tj * src[i0 * lw + j1];
        const double bottom = (1.0 - tj) * src[i1 * lw + j0] + tj * src[i1 * lw + j1];
        dst[i * w + j] = (1.0 - ti) * top + ti * bottom;
      }
    }
  }
  return out;
}

}  // namespace hsadapt
