#pragma once

#include <cstddef>
#include <ostream>
#include <string_view>
#include <vector>

#include "hsadapt/adapter.hpp"
#include "hsadapt/degrade.hpp"
#include "hsadapt/image.hpp"

namespace hsadapt {

enum class InnerSolver { fft_closed_form, conjugate_gradient };

std::string_view to_string(InnerSolver solver);
InnerSolver parse_inner_solver(std::string_view name);

/// Half-quadratic splitting parameters (DPIR-style defaults).
struct HQSConfig {
  std::size_t iters = 24;
  double sigma_start = 0.20;
  /// Final denoiser level. 0 means "task noise, floored at 0.005"; see resolved().
  double sigma_end = 0.0;
  double lambda = 0.23;
  InnerSolver inner_solver = InnerSolver::fft_closed_form;
  double cg_tol = 1e-6;
  std::size_t cg_max_iter = 200;

  /// Copy with sigma_end filled in from the task noise when unset, and
  /// sigma_start raised to sigma_end if it was below it.
  HQSConfig resolved(double task_sigma) const;
  /// Throws ParameterError unless iters >= 1, sigma_start >= sigma_end > 0, lambda > 0.
  void validate() const;
};

inline constexpr double kSigmaEndFloor = 0.005;
inline constexpr double kAlphaFloor = 1e-6;

/// `iters` log-spaced levels from sigma_start down to sigma_end ([sigma_end] for one iteration).
std::vector<double> sigma_schedule(const HQSConfig& cfg);

/// argmin_x ||y - A x||^2 + alpha ||x - z||^2 = (A^T A + alpha I)^{-1} (A^T y + alpha z).
/// Identity: element-wise. Blur: per-band DFT division unless cfg asks for CG.
/// Downsample: conjugate gradient warm-started at z, relative residual cfg.cg_tol.
/// Throws ConvergenceError if CG exhausts cfg.cg_max_iter.
HSImage prox_data(const DegradationOp& op, const HSImage& y, const HSImage& z, double alpha,
                  const HQSConfig& cfg = {});

struct IterationRecord {
  std::size_t iteration = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  double residual = 0.0;  ///< ||y - A z_k||_2
};

struct RestoreResult {
  HSImage image;
  std::vector<IterationRecord> trace;
};

/// Plug-and-play HQS: for k = 1..iters,
///   alpha_k = max(lambda sigma_n^2 / sigma_k^2, 1e-6)
///   x_k = prox_data(A, y, z_{k-1}, alpha_k)
///   z_k = denoise_hs(x_k, sigma_k)
/// starting from z_0 = A^T y (identity, blur) or bilinear upsampling of y (downsample).
/// Identity operator with one iteration is a single denoise_hs call.
RestoreResult restore(const HSImage& y, const DegradationOp& op, double sigma_n,
                      const WrappedDenoiser& wrapped, const HQSConfig& cfg);

/// Tab-separated trace table with a header row.
void write_trace(std::ostream& os, const std::vector<IterationRecord>& trace);

}  // namespace hsadapt
