#include "hsadapt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <string>

#include "hsadapt/fft.hpp"
#include "hsadapt/parallel.hpp"

namespace hsadapt {

std::string_view to_string(InnerSolver solver) {
  switch (solver) {
    case InnerSolver::fft_closed_form: return "fft_closed_form";
    case InnerSolver::conjugate_gradient: return "conjugate_gradient";
  }
  return "unknown";
}

InnerSolver parse_inner_solver(std::string_view name) {
  if (name == "fft_closed_form" || name == "fft") return InnerSolver::fft_closed_form;
  if (name == "conjugate_gradient" || name == "cg") return InnerSolver::conjugate_gradient;
  throw ParameterError("unknown inner solver '" + std::string(name) + "'");
}

HQSConfig HQSConfig::resolved(double task_sigma) const {
  HQSConfig out = *this;
  if (out.sigma_end <= 0.0) out.sigma_end = std::max(task_sigma, kSigmaEndFloor);
  if (out.sigma_start < out.sigma_end) out.sigma_start = out.sigma_end;
  return out;
}

void HQSConfig::validate() const {
  if (iters < 1) throw ParameterError("HQS iters must be >= 1");
  if (!(sigma_end > 0.0)) throw ParameterError("HQS sigma_end must be > 0");
  if (!(sigma_start >= sigma_end)) throw ParameterError("HQS needs sigma_start >= sigma_end");
  if (!(lambda > 0.0)) throw ParameterError("HQS lambda must be > 0");
  if (!(cg_tol > 0.0)) throw ParameterError("CG tolerance must be > 0");
  if (cg_max_iter < 1) throw ParameterError("CG iteration cap must be >= 1");
}

std::vector<double> sigma_schedule(const HQSConfig& cfg) {
  cfg.validate();
  if (cfg.iters == 1) return {cfg.sigma_end};
  std::vector<double> out(cfg.iters);
  const double ratio = cfg.sigma_end / cfg.sigma_start;
  const double last = static_cast<double>(cfg.iters - 1);
  for (std::size_t k = 0; k < cfg.iters; ++k)
    out[k] = cfg.sigma_start * std::pow(ratio, static_cast<double>(k) / last);
  out.front() = cfg.sigma_start;
  out.back() = cfg.sigma_end;
  // Rounding in pow must not break monotonicity.
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = std::min(out[k], out[k - 1]);
  return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Conjugate gradient on (A^T A + alpha I) x = rhs for one band, starting from x.
void cg_band(const DegradationOp& op, std::span<const double> rhs, std::span<double> x,
             double alpha, const HQSConfig& cfg) {
  const std::size_t n = x.size();
  const std::size_t m = op.output_height() * op.output_width();
  std::vector<double> r(n), p(n), q(n), tmp(m);

  auto normal_op = [&](std::span<const double> in, std::span<double> out) {
    apply_plane(op, in, tmp);
    adjoint_plane(op, tmp, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += alpha * in[i];
  };

  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  normal_op(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
  p = r;
  double rr = dot(r, r);
  const double target = cfg.cg_tol * rhs_norm;

  for (std::size_t it = 0; it < cfg.cg_max_iter; ++it) {
    if (std::sqrt(rr) <= target) return;
    normal_op(p, q);
    const double step = rr / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  const double relative = std::sqrt(rr) / rhs_norm;
  if (relative <= cfg.cg_tol) return;
  throw ConvergenceError("conjugate gradient did not reach relative residual " +
                             std::to_string(cfg.cg_tol) + " in " +
                             std::to_string(cfg.cg_max_iter) + " iterations (final " +
                             std::to_string(relative) + ")",
                         relative);
}

std::vector<std::complex<double>> transfer_function(const DegradationOp& op, const RealFft2D& fft) {
  const std::size_t h = op.input_height();
  const std::size_t w = op.input_width();
  const Kernel2D& k = op.kernel();
  const auto r = static_cast<std::ptrdiff_t>(k.radius);
  std::vector<double> psf(h * w, 0.0);
  for (std::ptrdiff_t di = -r; di <= r; ++di)
    for (std::ptrdiff_t dj = -r; dj <= r; ++dj)
      psf[wrap_index(di, h) * w + wrap_index(dj, w)] += k.at(di, dj);
  std::vector<std::complex<double>> spectrum(fft.spectrum_size());
  fft.forward(psf, spectrum);
  return spectrum;
}

HSImage prox_blur_fft(const DegradationOp& op, const HSImage& y, const HSImage& z, double alpha) {
  const std::size_t h = op.input_height();
  const std::size_t w = op.input_width();
  const RealFft2D fft(h, w);
  const auto otf = transfer_function(op, fft);
  HSImage out(z.shape(), 0.0);
  parallel_for(y.channels(), [&](std::size_t c) {
    std::vector<std::complex<double>> yf(fft.spectrum_size()), zf(fft.spectrum_size());
    fft.forward(y.band(c), yf);
    fft.forward(z.band(c), zf);
    for (std::size_t i = 0; i < yf.size(); ++i) {
      const std::complex<double> hk = otf[i];
      yf[i] = (std::conj(hk) * yf[i] + alpha * zf[i]) / (std::norm(hk) + alpha);
    }
    fft.inverse(yf, out.band(c));
  });
  return out;
}

}  // namespace

HSImage prox_data(const DegradationOp& op, const HSImage& y, const HSImage& z, double alpha,
                  const HQSConfig& cfg) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("prox_data: alpha must be > 0");
  if (z.height() != op.input_height() || z.width() != op.input_width())
    throw DimensionError("prox_data: z does not match the operator input");
  if (y.height() != op.output_height() || y.width() != op.output_width() ||
      y.channels() != z.channels())
    throw DimensionError("prox_data: y does not match the operator output");

  if (op.kind() == DegradationKind::identity) {
    // z + (y - z) / (1 + alpha): exact when y == z.
    HSImage out = z;
    const auto yd = y.data();
    auto od = out.data();
    const double inv = 1.0 / (1.0 + alpha);
    for (std::size_t i = 0; i < od.size(); ++i) od[i] += (yd[i] - od[i]) * inv;
    return out;
  }
  if (op.kind() == DegradationKind::gaussian_blur &&
      cfg.inner_solver == InnerSolver::fft_closed_form)
    return prox_blur_fft(op, y, z, alpha);

  HSImage out = z;
  parallel_for(y.channels(), [&](std::size_t c) {
    std::vector<double> rhs(z.plane_size());
    adjoint_plane(op, y.band(c), rhs);
    const auto zb = z.band(c);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += alpha * zb[i];
    cg_band(op, rhs, out.band(c), alpha, cfg);
  });
  return out;
}

namespace {

double data_residual(const DegradationOp& op, const HSImage& y, const HSImage& z) {
  const HSImage az = apply(op, z);
  double acc = 0.0;
  const auto a = az.data();
  const auto b = y.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += (b[i] - a[i]) * (b[i] - a[i]);
  return std::sqrt(acc);
}

}  // namespace

RestoreResult restore(const HSImage& y, const DegradationOp& op, double sigma_n,
                      const WrappedDenoiser& wrapped, const HQSConfig& cfg_in) {
  if (!(sigma_n >= 0.0)) throw ParameterError("restore: task noise must be >= 0");
  if (y.height() != op.output_height() || y.width() != op.output_width())
    throw DimensionError("restore: observation " + to_string(y.shape()) +
                         " does not match the operator output");
  if (y.channels() != wrapped.spec().bands())
    throw DimensionError("restore: observation has " + std::to_string(y.channels()) +
                         " bands, denoiser expects " + std::to_string(wrapped.spec().bands()));

  const HQSConfig cfg = cfg_in.resolved(sigma_n);
  const auto sigmas = sigma_schedule(cfg);

  auto alpha_for = [&](double sigma_k) {
    return std::max(cfg.lambda * sigma_n * sigma_n / (sigma_k * sigma_k), kAlphaFloor);
  };
  auto check_finite = [](const HSImage& img, std::size_t k, const char* what) {
    if (!img.all_finite())
      throw NumericalError(std::string("non-finite values in ") + what + " at iteration " +
                               std::to_string(k),
                           k);
  };

  RestoreResult result{y, {}};
  if (op.kind() == DegradationKind::identity && cfg.iters == 1) {
    result.image = denoise_hs(y, sigmas.front(), wrapped);
    check_finite(result.image, 1, "denoised iterate");
    result.trace.push_back({1, sigmas.front(), alpha_for(sigmas.front()),
                            data_residual(op, y, result.image)});
    return result;
  }

  HSImage z = op.kind() == DegradationKind::downsample ? bilinear_upsample(y, op.factor())
                                                       : adjoint(op, y);
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const double alpha = alpha_for(sigmas[k]);
    const HSImage x = prox_data(op, y, z, alpha, cfg);
    check_finite(x, k + 1, "data-step iterate");
    z = denoise_hs(x, sigmas[k], wrapped);
    check_finite(z, k + 1, "denoised iterate");
    result.trace.push_back({k + 1, sigmas[k], alpha, data_residual(op, y, z)});
  }
  result.image = std::move(z);
  return result;
}

void write_trace(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << "iteration\tsigma\talpha\tresidual\n";
  const auto old_precision = os.precision(10);
  for (const auto& rec : trace)
    os << rec.iteration << '\t' << rec.sigma << '\t' << rec.alpha << '\t' << rec.residual << '\n';
  os.precision(old_precision);
}

}  // namespace hsadapt
