#include "hsadapt/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "hsadapt/parallel.hpp"

namespace hsadapt {

namespace {
constexpr double kRankTolerance = 1e-8;
}

EncoderSpec EncoderSpec::orthonormalize(const Matrix& e_tilde, std::size_t latent_arity) {
  const auto rows = static_cast<std::size_t>(e_tilde.rows());
  const auto cols = static_cast<std::size_t>(e_tilde.cols());
  if (rows == 0 || cols == 0) throw DimensionError("orthonormalize: empty matrix");
  if (latent_arity == 0 || rows % latent_arity != 0)
    throw DimensionError("orthonormalize: latent arity " + std::to_string(latent_arity) +
                         " does not divide " + std::to_string(rows) + " rows");
  if (!e_tilde.allFinite()) throw DegenerateError("orthonormalize: non-finite entries");
  if (inverse_condition(e_tilde) < kRankTolerance)
    throw DegenerateError("orthonormalize: rank-deficient parametrization");

  EncoderSpec spec;
  spec.e_tilde_ = e_tilde;
  spec.latent_arity_ = latent_arity;
  spec.groups_ = rows / latent_arity;

  if (rows >= cols) {
    Matrix q = householder_thin_q(e_tilde);
    normalize_column_signs(q);
    spec.encoder_ = q;
  } else {
    Matrix q = householder_thin_q(e_tilde.transpose());
    normalize_column_signs(q);
    spec.encoder_ = q.transpose();
  }
  spec.decoder_ = spec.encoder_.transpose();
  return spec;
}

Matrix EncoderSpec::group_encoder(std::size_t k) const {
  return encoder_.middleRows(static_cast<Eigen::Index>(k * latent_arity_),
                             static_cast<Eigen::Index>(latent_arity_));
}

Matrix EncoderSpec::group_decoder(std::size_t k) const {
  return decoder_.middleCols(static_cast<Eigen::Index>(k * latent_arity_),
                             static_cast<Eigen::Index>(latent_arity_));
}

double EncoderSpec::gram_error() const {
  if (!minimum_norm()) {
    const Matrix g = encoder_.transpose() * encoder_;
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  }
  const Matrix g = encoder_ * encoder_.transpose();
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

std::vector<LatentImage> encode(const HSImage& x, const EncoderSpec& spec) {
  if (x.channels() != spec.bands())
    throw DimensionError("encode: image has " + std::to_string(x.channels()) +
                         " bands, encoder expects " + std::to_string(spec.bands()));
  const std::size_t c = spec.latent_arity();
  const std::size_t n = x.plane_size();
  const Matrix& e = spec.encoder();

  std::vector<LatentImage> groups;
  groups.reserve(spec.groups());
  for (std::size_t k = 0; k < spec.groups(); ++k) {
    LatentImage z(Shape{x.height(), x.width(), c}, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      const auto row = static_cast<Eigen::Index>(k * c + j);
      auto dst = z.band(j);
      for (std::size_t b = 0; b < x.channels(); ++b) {
        const double w = e(row, static_cast<Eigen::Index>(b));
        if (w == 0.0) continue;
        const auto src = x.band(b);
        for (std::size_t p = 0; p < n; ++p) dst[p] += w * src[p];
      }
    }
    groups.push_back(std::move(z));
  }
  return groups;
}

HSImage decode_aggregate(std::span<const LatentImage> groups, const EncoderSpec& spec) {
  if (groups.size() != spec.groups())
    throw DimensionError("decode_aggregate: expected " + std::to_string(spec.groups()) +
                         " groups, got " + std::to_string(groups.size()));
  const std::size_t c = spec.latent_arity();
  const Shape& first = groups.front().shape();
  for (const auto& z : groups)
    if (z.channels() != c || z.height() != first.height || z.width() != first.width)
      throw DimensionError("decode_aggregate: group shape mismatch");

  const std::size_t bands = spec.bands();
  const std::size_t n = first.pixels();
  const std::size_t k_count = groups.size();
  const Matrix& f = spec.decoder();
  HSImage out(Shape{first.height, first.width, bands}, 0.0);

  parallel_for(bands, [&](std::size_t b) {
    // Per-group contribution planes for band b, reduced pairwise in k order.
    std::vector<double> contrib(k_count * n, 0.0);
    for (std::size_t k = 0; k < k_count; ++k) {
      double* dst = contrib.data() + k * n;
      for (std::size_t j = 0; j < c; ++j) {
        const double w = f(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k * c + j));
        if (w == 0.0) continue;
        const auto src = groups[k].band(j);
        for (std::size_t p = 0; p < n; ++p) dst[p] += w * src[p];
      }
    }
    auto dst = out.band(b);
    std::vector<double> column(k_count);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t k = 0; k < k_count; ++k) column[k] = contrib[k * n + p];
      dst[p] = pairwise_sum(column);
    }
  });
  return out;
}

WrappedDenoiser::WrappedDenoiser(EncoderSpec spec, DenoiserHandle inner, SigmaMap sigma_map)
    : spec_(std::move(spec)), inner_(std::move(inner)), sigma_map_(std::move(sigma_map)) {
  if (!inner_) throw ParameterError("wrapped denoiser needs an inner denoiser");
  if (inner_->arity() != spec_.latent_arity())
    throw DimensionError("inner denoiser arity " + std::to_string(inner_->arity()) +
                         " does not match encoder latent arity " +
                         std::to_string(spec_.latent_arity()));
}

HSImage denoise_hs(const HSImage& y, double sigma, const WrappedDenoiser& wrapped) {
  if (!(sigma >= 0.0)) throw ParameterError("denoise_hs: sigma must be >= 0");
  const auto latents = encode(y, wrapped.spec());
  const double inner_sigma = wrapped.inner_sigma(sigma);
  const Denoiser& inner = *wrapped.inner();

  std::vector<std::optional<LatentImage>> slots(latents.size());
  parallel_for(
      latents.size(), [&](std::size_t k) { slots[k].emplace(inner.denoise(latents[k], inner_sigma)); },
      inner.concurrent_safe());

  std::vector<LatentImage> denoised;
  denoised.reserve(slots.size());
  for (auto& s : slots) denoised.push_back(std::move(*s));
  return decode_aggregate(denoised, wrapped.spec());
}

double lipschitz_estimate(const VectorMap& map, std::size_t dim, std::size_t trials,
                          std::uint64_t seed) {
  if (trials < 1) throw ParameterError("lipschitz_estimate: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1e-3);

  double best = 0.0;
  std::vector<double> u(dim), v(dim);
  for (std::size_t t = 0; t < trials; ++t) {
    for (double& x : u) x = uniform(rng);
    switch (t % 3) {
      case 0:
        for (double& x : v) x = uniform(rng);
        break;
      case 1:
        for (std::size_t i = 0; i < dim; ++i) v[i] = u[i] + normal(rng);
        break;
      default: {
        const double offset = 1e-3 + (1e-1 - 1e-3) * uniform(rng);
        for (std::size_t i = 0; i < dim; ++i) v[i] = u[i] + offset;
      }
    }
    double in_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) in_sq += (u[i] - v[i]) * (u[i] - v[i]);
    if (in_sq == 0.0) continue;

    const auto du = map(u);
    const auto dv = map(v);
    if (du.size() != dv.size()) throw DimensionError("lipschitz_estimate: output size changed");
    double out_sq = 0.0;
    for (std::size_t i = 0; i < du.size(); ++i) out_sq += (du[i] - dv[i]) * (du[i] - dv[i]);
    best = std::max(best, std::sqrt(out_sq / in_sq));
  }
  return best;
}

}  // namespace hsadapt
