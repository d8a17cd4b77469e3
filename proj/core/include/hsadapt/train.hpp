#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "hsadapt/adapter.hpp"
#include "hsadapt/denoisers.hpp"
#include "hsadapt/image.hpp"
#include "hsadapt/linalg.hpp"

namespace hsadapt {

enum class GradientEstimator { spsa, analytic_linear };

std::string_view to_string(GradientEstimator estimator);
GradientEstimator parse_gradient_estimator(std::string_view name);

struct TrainConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t steps = 200;
  std::size_t batch = 4;
  std::vector<double> sigma_set{0.05, 0.10, 0.15, 0.20};
  GradientEstimator grad_estimator = GradientEstimator::spsa;
  std::size_t spsa_perturbations = 8;
  double spsa_delta = 1e-3;
  double init_jitter = 1e-2;
  double heldout_fraction = 0.15;
  std::uint64_t seed = 0;

  /// Throws ParameterError on lr <= 0, batch == 0, empty or negative sigma_set,
  /// spsa_delta <= 0, spsa_perturbations == 0, betas outside [0, 1).
  void validate() const;
};

/// One noisy/clean pair at a fixed noise level.
struct TrainingSample {
  HSImage y;
  HSImage x;
  double sigma = 0.0;
};

/// (1/B) sum_b ||F D_sigma_b(E y_b) - x_b||^2 with (E, F) = orthonormalize(e_tilde, c).
/// Throws DegenerateError for a rank-deficient e_tilde.
double loss_mse(const Matrix& e_tilde, std::size_t latent_arity,
                std::span<const TrainingSample> batch, const DenoiserHandle& inner);

/// Exact quadratic model of loss_mse for a linear inner denoiser.
///
/// With Y(i', i, b) = channel i of D(e_i' (x) y_b) (band b placed in latent channel i'),
/// output band a is sum M(i', i, b; a) Y(i', i, b) where
/// M(i', i, b; a) = sum_k F(a, k c + i) E(k c + i', b). The Gram matrix of the responses
/// and their inner products with x are accumulated once; loss() is then independent
/// of the image size.
class LinearLossModel {
 public:
  /// Throws ModeError unless inner->is_linear().
  LinearLossModel(std::span<const TrainingSample> batch, const DenoiserHandle& inner);

  double loss(const Matrix& e_tilde) const;
  double loss(const EncoderSpec& spec) const;

  std::size_t bands() const noexcept { return bands_; }
  std::size_t latent_arity() const noexcept { return arity_; }

 private:
  std::size_t bands_ = 0;
  std::size_t arity_ = 0;
  std::size_t count_ = 0;
  Matrix gram_;   // n x n, n = c^2 C
  Matrix cross_;  // n x C
  double energy_ = 0.0;
};

/// spsa: mean over cfg.spsa_perturbations Rademacher directions Delta of
///   [L(E~ + d Delta) - L(E~ - d Delta)] / (2 d) * Delta, drawn from probe_seed.
/// analytic_linear: central differences (step 1e-6) of LinearLossModel::loss on every
///   entry of E~, i.e. through the QR map. Throws ModeError for a nonlinear inner map.
Matrix grad_estimate(const Matrix& e_tilde, std::size_t latent_arity,
                     std::span<const TrainingSample> batch, const DenoiserHandle& inner,
                     const TrainConfig& cfg, std::uint64_t probe_seed);

inline constexpr double kAnalyticStep = 1e-6;

/// Adam on a matrix parameter.
class AdamState {
 public:
  AdamState(Eigen::Index rows, Eigen::Index cols, double lr, double beta1, double beta2,
            double eps);
  void step(Matrix& param, const Matrix& grad);
  std::size_t iterations() const noexcept { return t_; }

 private:
  Matrix m_;
  Matrix v_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

struct LossRecord {
  std::size_t step = 0;
  double sigma = 0.0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;
};

struct TrainResult {
  EncoderSpec spec;  ///< lowest held-out loss seen, initialization included
  std::vector<LossRecord> history;
  double initial_heldout_loss = 0.0;
  double best_heldout_loss = 0.0;
  std::size_t best_step = 0;  ///< 0 = initialization
};

/// Identity-like (K c) x C start: entry (i, i) = 1 for i < min(K c, C), zero elsewhere.
Matrix identity_like(std::size_t rows, std::size_t bands);

/// Learns E~ for `groups` x `latent_arity` latents on clean patches.
///
/// A seeded 15% of the patches (at least one; all of them when there is only one)
/// form the held-out set, noised once per sigma_set entry with fixed seeds. Each step
/// draws `batch` training patches and one sigma, estimates the gradient, takes an Adam
/// step and projects E~ back onto the orthonormal set (E~ <- E). Every step runs
/// from one seeded generator, so identical inputs give bit-identical results.
/// Throws TrainingError on a non-finite loss.
TrainResult train_encoder(std::span<const HSImage> data, const DenoiserHandle& inner,
                          std::size_t groups, std::size_t latent_arity, const TrainConfig& cfg);

/// Tab-separated (step, sigma, train_loss, heldout_loss) table with a header row.
void write_loss_history(std::ostream& os, const std::vector<LossRecord>& history);

enum class AblationKind { seq_mono, seq_rgb, random_rgb, pca, identity_untrained };

std::string_view to_string(AblationKind kind);
AblationKind parse_ablation_kind(std::string_view name);

struct AblationOptions {
  /// pca only: group count and arity; 0 groups means ceil(C / c).
  std::size_t groups = 0;
  std::size_t latent_arity = 3;
  /// Clean cubes for pca.
  std::span<const HSImage> data{};
  std::uint64_t seed = 0;
  /// pca only: fill missing components from the null-space eigenvectors instead of
  /// raising DegenerateError.
  bool complete_degenerate = false;
};

/// seq_mono: E = I_C, K = C, c = 1.
/// seq_rgb, identity_untrained: identity rows in consecutive triplets; when 3 does not
///   divide C the last band is replicated into the padding rows before orthonormalizing.
/// random_rgb: as seq_rgb with the identity rows in a seeded random order.
/// pca: rows are the leading principal directions of the mean-centered pixel spectra;
///   extra rows (K c > C) replicate the last component.
EncoderSpec ablation_encoder(AblationKind kind, std::size_t bands,
                             const AblationOptions& options = {});

}  // namespace hsadapt
