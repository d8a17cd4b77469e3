#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsadapt/errors.hpp"

namespace hsadapt {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t pixels() const noexcept { return height * width; }
  std::size_t size() const noexcept { return height * width * channels; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

/// Throws DimensionError unless every extent is at least one.
void validate_shape(const Shape& shape);

namespace detail {
void check_same_shape(const Shape& a, const Shape& b, const char* what);
bool all_finite(std::span<const double> values) noexcept;
}  // namespace detail

/// Planar real-valued image cube: band 0 in row-major order, then band 1, and so on.
/// The tag keeps hyperspectral cubes and denoiser latents from being mixed up.
template <class Tag>
class ImageCube {
 public:
  explicit ImageCube(Shape shape, double fill = 0.0) : shape_(shape) {
    validate_shape(shape_);
    data_.assign(shape_.size(), fill);
  }

  ImageCube(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    validate_shape(shape_);
    if (data_.size() != shape_.size())
      throw DimensionError("image data length " + std::to_string(data_.size()) +
                           " does not match shape " + to_string(shape_));
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t plane_size() const noexcept { return shape_.pixels(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> band(std::size_t c) const noexcept {
    return std::span<const double>(data_).subspan(c * plane_size(), plane_size());
  }
  std::span<double> band(std::size_t c) noexcept {
    return std::span<double>(data_).subspan(c * plane_size(), plane_size());
  }

  double at(std::size_t c, std::size_t row, std::size_t col) const noexcept {
    return data_[(c * shape_.height + row) * shape_.width + col];
  }
  double& at(std::size_t c, std::size_t row, std::size_t col) noexcept {
    return data_[(c * shape_.height + row) * shape_.width + col];
  }

  bool all_finite() const noexcept { return detail::all_finite(data_); }

  bool operator==(const ImageCube&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

struct SpectralTag {};
struct LatentTag {};

/// Hyperspectral cube, height x width x C bands.
using HSImage = ImageCube<SpectralTag>;
/// Low-dimensional image fed to a frozen denoiser, c in {1, 3}.
using LatentImage = ImageCube<LatentTag>;

template <class To, class From>
To retag(const ImageCube<From>& image) {
  return To(image.shape(), std::vector<double>(image.data().begin(), image.data().end()));
}

}  // namespace hsadapt
