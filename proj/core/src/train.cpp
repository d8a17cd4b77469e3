#include "hsadapt/train.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "hsadapt/degrade.hpp"
#include "hsadapt/parallel.hpp"

namespace hsadapt {

std::string_view to_string(GradientEstimator estimator) {
  switch (estimator) {
    case GradientEstimator::spsa: return "spsa";
    case GradientEstimator::analytic_linear: return "analytic_linear";
  }
  return "unknown";
}

GradientEstimator parse_gradient_estimator(std::string_view name) {
  if (name == "spsa") return GradientEstimator::spsa;
  if (name == "analytic_linear" || name == "analytic") return GradientEstimator::analytic_linear;
  throw ParameterError("unknown gradient estimator '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ParameterError("learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ParameterError("Adam betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw ParameterError("Adam eps must be > 0");
  if (batch == 0) throw ParameterError("batch must be >= 1");
  if (sigma_set.empty()) throw ParameterError("sigma_set must be non-empty");
  for (double s : sigma_set)
    if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("sigma_set entries must be >= 0");
  if (!(spsa_delta > 0.0)) throw ParameterError("spsa_delta must be > 0");
  if (spsa_perturbations == 0) throw ParameterError("spsa_perturbations must be >= 1");
  if (!(init_jitter >= 0.0)) throw ParameterError("init_jitter must be >= 0");
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0))
    throw ParameterError("heldout_fraction must lie in (0, 1)");
}

namespace {

void check_batch(std::span<const TrainingSample> batch, std::size_t bands) {
  if (batch.empty()) throw ParameterError("empty training batch");
  for (const auto& s : batch) {
    detail::check_same_shape(s.y.shape(), s.x.shape(), "training sample");
    if (s.x.channels() != bands)
      throw DimensionError("training sample has " + std::to_string(s.x.channels()) +
                           " bands, encoder expects " + std::to_string(bands));
  }
}

double squared_error(const HSImage& a, const HSImage& b) {
  const auto da = a.data();
  const auto db = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) acc += (da[i] - db[i]) * (da[i] - db[i]);
  return acc;
}

double batch_loss(const EncoderSpec& spec, std::span<const TrainingSample> batch,
                  const DenoiserHandle& inner) {
  const WrappedDenoiser wrapped(spec, inner);
  double total = 0.0;
  for (const auto& s : batch) total += squared_error(denoise_hs(s.y, s.sigma, wrapped), s.x);
  return total / static_cast<double>(batch.size());
}

}  // namespace

double loss_mse(const Matrix& e_tilde, std::size_t latent_arity,
                std::span<const TrainingSample> batch, const DenoiserHandle& inner) {
  check_batch(batch, static_cast<std::size_t>(e_tilde.cols()));
  return batch_loss(orthonormalize(e_tilde, latent_arity), batch, inner);
}

LinearLossModel::LinearLossModel(std::span<const TrainingSample> batch,
                                 const DenoiserHandle& inner) {
  if (!inner) throw ParameterError("null inner denoiser");
  if (!inner->is_linear())
    throw ModeError(std::string("analytic gradient needs a linear inner denoiser, got ") +
                    std::string(to_string(inner->kind())));
  if (batch.empty()) throw ParameterError("empty training batch");
  bands_ = batch.front().x.channels();
  arity_ = inner->arity();
  count_ = batch.size();
  check_batch(batch, bands_);

  const std::size_t c = arity_;
  const std::size_t n = c * c * bands_;
  gram_ = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  cross_ = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bands_));
  energy_ = 0.0;

  for (const auto& s : batch) {
    const std::size_t pixels = s.y.plane_size();
    const Shape latent_shape{s.y.height(), s.y.width(), c};
    Matrix responses(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n));
    parallel_for(
        c * bands_,
        [&](std::size_t job) {
          const std::size_t ip = job / bands_;
          const std::size_t b = job % bands_;
          LatentImage probe(latent_shape, 0.0);
          const auto src = s.y.band(b);
          std::copy(src.begin(), src.end(), probe.band(ip).begin());
          const LatentImage out = inner->denoise(probe, s.sigma);
          for (std::size_t i = 0; i < c; ++i) {
            const auto col = static_cast<Eigen::Index>((ip * c + i) * bands_ + b);
            const auto plane = out.band(i);
            for (std::size_t p = 0; p < pixels; ++p)
              responses(static_cast<Eigen::Index>(p), col) = plane[p];
          }
        },
        inner->concurrent_safe());
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>>
        x(s.x.data().data(), static_cast<Eigen::Index>(pixels),
          static_cast<Eigen::Index>(bands_));
    gram_.noalias() += responses.transpose() * responses;
    cross_.noalias() += responses.transpose() * x;
    energy_ += x.squaredNorm();
  }
}

double LinearLossModel::loss(const Matrix& e_tilde) const {
  return loss(orthonormalize(e_tilde, arity_));
}

double LinearLossModel::loss(const EncoderSpec& spec) const {
  if (spec.bands() != bands_ || spec.latent_arity() != arity_)
    throw DimensionError("encoder does not match the linear loss model");
  const std::size_t c = arity_;
  const std::size_t n = c * c * bands_;
  const Matrix& e = spec.encoder();
  const Matrix& f = spec.decoder();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bands_));
  for (std::size_t k = 0; k < spec.groups(); ++k)
    for (std::size_t ip = 0; ip < c; ++ip)
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t b = 0; b < bands_; ++b) {
          const auto row = static_cast<Eigen::Index>((ip * c + i) * bands_ + b);
          const double eb = e(static_cast<Eigen::Index>(k * c + ip), static_cast<Eigen::Index>(b));
          m.row(row) += eb * f.col(static_cast<Eigen::Index>(k * c + i)).transpose();
        }
  const double quad = (m.transpose() * gram_ * m).trace();
  const double lin = (m.transpose() * cross_).trace();
  return (quad - 2.0 * lin + energy_) / static_cast<double>(count_);
}

Matrix grad_estimate(const Matrix& e_tilde, std::size_t latent_arity,
                     std::span<const TrainingSample> batch, const DenoiserHandle& inner,
                     const TrainConfig& cfg, std::uint64_t probe_seed) {
  cfg.validate();
  check_batch(batch, static_cast<std::size_t>(e_tilde.cols()));
  const Eigen::Index rows = e_tilde.rows();
  const Eigen::Index cols = e_tilde.cols();

  if (cfg.grad_estimator == GradientEstimator::analytic_linear) {
    const LinearLossModel model(batch, inner);
    Matrix grad(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index col = 0; col < cols; ++col) {
        Matrix plus = e_tilde;
        Matrix minus = e_tilde;
        plus(r, col) += kAnalyticStep;
        minus(r, col) -= kAnalyticStep;
        grad(r, col) = (model.loss(plus) - model.loss(minus)) / (2.0 * kAnalyticStep);
      }
    return grad;
  }

  const std::size_t pairs = cfg.spsa_perturbations;
  std::mt19937_64 rng(probe_seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<Matrix> deltas(pairs, Matrix(rows, cols));
  for (auto& d : deltas)
    for (Eigen::Index col = 0; col < cols; ++col)
      for (Eigen::Index r = 0; r < rows; ++r) d(r, col) = coin(rng) ? 1.0 : -1.0;

  std::vector<double> losses(2 * pairs);
  parallel_for(2 * pairs, [&](std::size_t job) {
    const double sign = job % 2 == 0 ? 1.0 : -1.0;
    const Matrix probe = e_tilde + sign * cfg.spsa_delta * deltas[job / 2];
    losses[job] = batch_loss(orthonormalize(probe, latent_arity), batch, inner);
  });

  Matrix grad = Matrix::Zero(rows, cols);
  for (std::size_t p = 0; p < pairs; ++p) {
    const double slope = (losses[2 * p] - losses[2 * p + 1]) / (2.0 * cfg.spsa_delta);
    if (!std::isfinite(slope)) throw TrainingError("non-finite loss at an SPSA probe point");
    grad += slope * deltas[p];  // Rademacher entries are their own inverses
  }
  return grad / static_cast<double>(pairs);
}

AdamState::AdamState(Eigen::Index rows, Eigen::Index cols, double lr, double beta1, double beta2,
                     double eps)
    : m_(Matrix::Zero(rows, cols)),
      v_(Matrix::Zero(rows, cols)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void AdamState::step(Matrix& param, const Matrix& grad) {
  if (grad.rows() != m_.rows() || grad.cols() != m_.cols() || param.rows() != m_.rows() ||
      param.cols() != m_.cols())
    throw DimensionError("Adam: parameter/gradient shape mismatch");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (Eigen::Index j = 0; j < param.cols(); ++j)
    for (Eigen::Index i = 0; i < param.rows(); ++i)
      param(i, j) -= lr_ * (m_(i, j) / c1) / (std::sqrt(v_(i, j) / c2) + eps_);
}

Matrix identity_like(std::size_t rows, std::size_t bands) {
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(bands));
  for (std::size_t i = 0; i < std::min(rows, bands); ++i)
    e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return e;
}

TrainResult train_encoder(std::span<const HSImage> data, const DenoiserHandle& inner,
                          std::size_t groups, std::size_t latent_arity, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw ParameterError("training data is empty");
  if (!inner) throw ParameterError("null inner denoiser");
  if (groups == 0) throw ParameterError("group count must be >= 1");
  if (inner->arity() != latent_arity)
    throw DimensionError("inner denoiser arity " + std::to_string(inner->arity()) +
                         " does not match latent arity " + std::to_string(latent_arity));
  const std::size_t bands = data.front().channels();
  for (const auto& x : data)
    if (x.channels() != bands) throw DimensionError("training patches disagree on band count");
  if (!std::all_of(data.begin(), data.end(), [](const HSImage& x) { return x.all_finite(); }))
    throw ParameterError("training patches contain non-finite values");

  std::mt19937_64 rng(cfg.seed);
  const std::size_t rows = groups * latent_arity;

  Matrix e_tilde = identity_like(rows, bands);
  {
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (Eigen::Index j = 0; j < e_tilde.cols(); ++j)
      for (Eigen::Index i = 0; i < e_tilde.rows(); ++i) e_tilde(i, j) += cfg.init_jitter * jitter(rng);
  }

  // Held-out split.
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> heldout_idx, train_idx;
  if (data.size() == 1) {
    heldout_idx = train_idx = order;
  } else {
    auto n_held = static_cast<std::size_t>(
        std::llround(cfg.heldout_fraction * static_cast<double>(data.size())));
    n_held = std::clamp<std::size_t>(n_held, 1, data.size() - 1);
    heldout_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_held));
    train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_held), order.end());
  }
  std::vector<TrainingSample> heldout;
  for (std::size_t idx : heldout_idx)
    for (double sigma : cfg.sigma_set)
      heldout.push_back({add_awgn(data[idx], sigma, rng()), data[idx], sigma});

  auto checked = [](double v, const char* what) {
    if (!std::isfinite(v)) throw TrainingError(std::string("non-finite ") + what);
    return v;
  };

  EncoderSpec spec = orthonormalize(e_tilde, latent_arity);
  e_tilde = spec.encoder();
  const double initial = checked(batch_loss(spec, heldout, inner), "initial held-out loss");
  TrainResult result{spec, {}, initial, initial, 0};

  AdamState adam(e_tilde.rows(), e_tilde.cols(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  std::uniform_int_distribution<std::size_t> pick_patch(0, train_idx.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_sigma(0, cfg.sigma_set.size() - 1);

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const double sigma = cfg.sigma_set[pick_sigma(rng)];
    std::vector<TrainingSample> batch;
    batch.reserve(cfg.batch);
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const HSImage& x = data[train_idx[pick_patch(rng)]];
      batch.push_back({add_awgn(x, sigma, rng()), x, sigma});
    }
    const std::uint64_t probe_seed = rng();

    const double train_loss = checked(batch_loss(spec, batch, inner), "training loss");
    const Matrix grad = grad_estimate(e_tilde, latent_arity, batch, inner, cfg, probe_seed);
    if (!grad.allFinite()) throw TrainingError("non-finite gradient at step " + std::to_string(step));
    adam.step(e_tilde, grad);

    // Project back onto the orthonormal set so the parametrization stays well conditioned.
    spec = orthonormalize(e_tilde, latent_arity);
    e_tilde = spec.encoder();

    const double held = checked(batch_loss(spec, heldout, inner), "held-out loss");
    result.history.push_back({step, sigma, train_loss, held});
    if (held < result.best_heldout_loss) {
      result.best_heldout_loss = held;
      result.best_step = step;
      result.spec = spec;
    }
  }
  return result;
}

void write_loss_history(std::ostream& os, const std::vector<LossRecord>& history) {
  os << "step\tsigma\ttrain_loss\theldout_loss\n";
  const auto old_precision = os.precision(12);
  for (const auto& r : history)
    os << r.step << '\t' << r.sigma << '\t' << r.train_loss << '\t' << r.heldout_loss << '\n';
  os.precision(old_precision);
}

std::string_view to_string(AblationKind kind) {
  switch (kind) {
    case AblationKind::seq_mono: return "seq_mono";
    case AblationKind::seq_rgb: return "seq_rgb";
    case AblationKind::random_rgb: return "random_rgb";
    case AblationKind::pca: return "pca";
    case AblationKind::identity_untrained: return "identity_untrained";
  }
  return "unknown";
}

AblationKind parse_ablation_kind(std::string_view name) {
  std::string key;
  for (char ch : name) key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (key == "seq_mono") return AblationKind::seq_mono;
  if (key == "seq_rgb") return AblationKind::seq_rgb;
  if (key == "random_rgb") return AblationKind::random_rgb;
  if (key == "pca") return AblationKind::pca;
  if (key == "identity_untrained") return AblationKind::identity_untrained;
  throw ParameterError("unknown ablation encoder '" + std::string(name) +
                       "' (expected seq_mono, seq_rgb, random_rgb, pca or identity_untrained)");
}

namespace {

// Rows 0..C-1 pick bands order[r]; padding rows repeat the last picked band.
Matrix padded_selection(const std::vector<std::size_t>& order, std::size_t rows) {
  const std::size_t bands = order.size();
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(bands));
  for (std::size_t r = 0; r < rows; ++r)
    e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(order[std::min(r, bands - 1)])) = 1.0;
  return e;
}

EncoderSpec pca_encoder(std::size_t bands, const AblationOptions& opt) {
  if (opt.data.empty()) throw ParameterError("pca encoder needs data");
  const std::size_t c = opt.latent_arity;
  const std::size_t groups = opt.groups ? opt.groups : (bands + c - 1) / c;
  const std::size_t rows = groups * c;

  const auto cb = static_cast<Eigen::Index>(bands);
  Vector mean = Vector::Zero(cb);
  Matrix scatter = Matrix::Zero(cb, cb);
  double count = 0.0;
  for (const auto& x : opt.data) {
    if (x.channels() != bands) throw DimensionError("pca data disagrees on band count");
    const Eigen::Map<const Matrix> pixels(x.data().data(), static_cast<Eigen::Index>(x.plane_size()),
                                          cb);
    mean += pixels.colwise().sum().transpose();
    scatter.noalias() += pixels.transpose() * pixels;
    count += static_cast<double>(x.plane_size());
  }
  mean /= count;
  const Matrix cov = scatter / count - mean * mean.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw DegenerateError("pca: eigendecomposition failed");
  // Eigen orders ascending.
  const Vector values = eig.eigenvalues().reverse();
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();
  const double top = std::max(values(0), 0.0);
  std::size_t nondegenerate = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (top > 0.0 && values(i) > 1e-12 * top) ++nondegenerate;
  const std::size_t needed = std::min(rows, bands);
  if (nondegenerate < needed && !opt.complete_degenerate)
    throw DegenerateError("pca: data has " + std::to_string(nondegenerate) +
                          " non-degenerate principal components, encoder needs " +
                          std::to_string(needed));

  Matrix e(static_cast<Eigen::Index>(rows), cb);
  for (std::size_t r = 0; r < rows; ++r)
    e.row(static_cast<Eigen::Index>(r)) =
        vectors.col(static_cast<Eigen::Index>(std::min(r, bands - 1))).transpose();
  return orthonormalize(e, c);
}

}  // namespace

EncoderSpec ablation_encoder(AblationKind kind, std::size_t bands, const AblationOptions& opt) {
  if (bands == 0) throw ParameterError("band count must be >= 1");
  std::vector<std::size_t> order(bands);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t triplet_rows = 3 * ((bands + 2) / 3);
  switch (kind) {
    case AblationKind::seq_mono:
      return orthonormalize(identity_like(bands, bands), 1);
    case AblationKind::seq_rgb:
    case AblationKind::identity_untrained:
      return orthonormalize(padded_selection(order, triplet_rows), 3);
    case AblationKind::random_rgb: {
      std::mt19937_64 rng(opt.seed);
      std::shuffle(order.begin(), order.end(), rng);
      return orthonormalize(padded_selection(order, triplet_rows), 3);
    }
    case AblationKind::pca:
      return pca_encoder(bands, opt);
  }
  throw ParameterError("unknown ablation encoder");
}

}  // namespace hsadapt
