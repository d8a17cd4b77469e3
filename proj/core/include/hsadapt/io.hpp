#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "hsadapt/image.hpp"
#include "hsadapt/linalg.hpp"

namespace hsadapt {

// HSB cube file (all fields little-endian):
//   offset 0   "HSB1"
//   offset 4   u32 height
//   offset 8   u32 width
//   offset 12  u32 channels
//   offset 16  u32 dtype (1 = IEEE float32)
//   offset 20  payload, band-major planar: band 0 row-major, band 1, ...
//
// HSM matrix file: same layout with magic "HSM1", fields rows, cols, dtype and a
// row-major payload. dtype 1 = float32, 2 = float64; matrices are written as float64.
//
// Readers reject (FormatError with byte offset) bad magic, zero dims, unknown dtype,
// size overflow, truncated or oversized payloads and non-finite samples.

inline constexpr std::size_t kHsbHeaderBytes = 20;
inline constexpr std::uint32_t kDtypeFloat32 = 1;
inline constexpr std::uint32_t kDtypeFloat64 = 2;

namespace detail {
void write_hsb(const Shape& shape, std::span<const double> data,
               const std::filesystem::path& path);
std::pair<Shape, std::vector<double>> read_hsb(const std::filesystem::path& path);
}  // namespace detail

template <class Tag>
void write_hsb(const ImageCube<Tag>& image, const std::filesystem::path& path) {
  detail::write_hsb(image.shape(), image.data(), path);
}

template <class Image = HSImage>
Image read_hsb(const std::filesystem::path& path) {
  auto [shape, data] = detail::read_hsb(path);
  return Image(shape, std::move(data));
}

void write_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path);

/// Loads every *.pgm (binary "P5", 8- or 16-bit) file in `dir`, sorted by file
/// name, as one band each. Samples are divided by the header's maxval.
HSImage ingest_band_dir(const std::filesystem::path& dir);

}  // namespace hsadapt
