#include "hsadapt/image.hpp"

#include <cmath>

namespace hsadapt {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) + "x" +
         std::to_string(shape.channels);
}

void validate_shape(const Shape& shape) {
  if (shape.height < 1 || shape.width < 1 || shape.channels < 1)
    throw DimensionError("image extents must be >= 1, got " + to_string(shape));
}

namespace detail {

void check_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b))
    throw DimensionError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " +
                         to_string(b));
}

bool all_finite(std::span<const double> values) noexcept {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace detail
}  // namespace hsadapt
