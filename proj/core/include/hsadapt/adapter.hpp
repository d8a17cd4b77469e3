#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hsadapt/denoisers.hpp"
#include "hsadapt/image.hpp"
#include "hsadapt/linalg.hpp"

namespace hsadapt {

/// Linear spectral encoder/decoder pair built from an unconstrained (K c) x C matrix.
///
/// K c >= C: thin QR of E~ gives E = Q with orthonormal columns (E^T E = I_C), and
///           F = E^T inverts it exactly (F E = I_C).
/// K c <  C: thin QR of E~^T gives E with orthonormal rows (E E^T = I_Kc); F = E^T
///           then reconstructs the orthogonal projection onto the row space of E
///           (minimum-norm least-squares regime).
///
/// Q columns are sign-normalized (largest-magnitude entry positive), so the result
/// is a deterministic function of E~. Rows k c .. k c + c - 1 of E form group k.
class EncoderSpec {
 public:
  /// Throws DimensionError if c does not divide the row count, DegenerateError if
  /// E~ is not finite or has inverse condition < 1e-8.
  static EncoderSpec orthonormalize(const Matrix& e_tilde, std::size_t latent_arity);

  const Matrix& unconstrained() const noexcept { return e_tilde_; }
  const Matrix& encoder() const noexcept { return encoder_; }
  const Matrix& decoder() const noexcept { return decoder_; }

  std::size_t groups() const noexcept { return groups_; }
  std::size_t latent_arity() const noexcept { return latent_arity_; }
  std::size_t latent_dim() const noexcept { return groups_ * latent_arity_; }
  std::size_t bands() const noexcept { return static_cast<std::size_t>(e_tilde_.cols()); }
  bool minimum_norm() const noexcept { return latent_dim() < bands(); }

  /// c x C block E_k.
  Matrix group_encoder(std::size_t k) const;
  /// C x c block F_k.
  Matrix group_decoder(std::size_t k) const;

  /// Largest deviation of the regime's Gram matrix (E^T E or E E^T) from identity.
  double gram_error() const;

 private:
  EncoderSpec() = default;

  Matrix e_tilde_;
  Matrix encoder_;
  Matrix decoder_;
  std::size_t groups_ = 0;
  std::size_t latent_arity_ = 0;
};

inline EncoderSpec orthonormalize(const Matrix& e_tilde, std::size_t latent_arity) {
  return EncoderSpec::orthonormalize(e_tilde, latent_arity);
}

/// Group k holds E_k x at every pixel.
std::vector<LatentImage> encode(const HSImage& x, const EncoderSpec& spec);

/// Output spectrum at each pixel is sum_k F_k z_k, accumulated k-ascending with
/// pairwise summation.
HSImage decode_aggregate(std::span<const LatentImage> groups, const EncoderSpec& spec);

using SigmaMap = std::function<double(double)>;

/// Lifts a frozen c-channel denoiser to C bands: D_h(y) = sum_k F_k D_l(E_k y).
class WrappedDenoiser {
 public:
  WrappedDenoiser(EncoderSpec spec, DenoiserHandle inner, SigmaMap sigma_map = {});

  const EncoderSpec& spec() const noexcept { return spec_; }
  const DenoiserHandle& inner() const noexcept { return inner_; }
  double inner_sigma(double sigma) const { return sigma_map_ ? sigma_map_(sigma) : sigma; }

 private:
  EncoderSpec spec_;
  DenoiserHandle inner_;
  SigmaMap sigma_map_;
};

/// Encode, run the shared inner denoiser on every group (concurrently when the
/// inner denoiser allows it), decode and aggregate.
HSImage denoise_hs(const HSImage& y, double sigma, const WrappedDenoiser& wrapped);

/// Flat-vector map used by the Lipschitz sampler.
using VectorMap = std::function<std::vector<double>(const std::vector<double>&)>;

/// Empirical Lipschitz lower bound: max ||D(u) - D(u')|| / ||u - u'|| over `trials`
/// seeded pairs of dimension `dim`. u is uniform in [0,1]^dim; u' cycles through
/// three probe families: an independent uniform draw, u plus a small Gaussian
/// perturbation (std 1e-3), and u plus a constant offset (amplitude in
/// [1e-3, 1e-1]). Identical pairs are skipped.
double lipschitz_estimate(const VectorMap& map, std::size_t dim, std::size_t trials,
                          std::uint64_t seed);

template <class Tag>
double lipschitz_estimate(const std::function<ImageCube<Tag>(const ImageCube<Tag>&)>& map,
                          const Shape& shape, std::size_t trials, std::uint64_t seed) {
  VectorMap flat = [&](const std::vector<double>& u) {
    const ImageCube<Tag> out = map(ImageCube<Tag>(shape, u));
    return std::vector<double>(out.data().begin(), out.data().end());
  };
  return lipschitz_estimate(flat, shape.size(), trials, seed);
}

}  // namespace hsadapt
