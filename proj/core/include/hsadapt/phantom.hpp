#pragma once

#include <cstdint>

#include "hsadapt/image.hpp"

namespace hsadapt {

/// Synthetic low-rank scene: sum over `rank` endmembers of a smooth non-negative
/// abundance map times a smooth positive spectral signature (2-3 Gaussian bumps
/// over the band index). Scaled multiplicatively into [0.05, 0.95], so the
/// pixels x bands matrix has rank exactly `rank`. Deterministic in `seed`.
HSImage make_phantom(const Shape& shape, std::size_t rank, std::uint64_t seed);

}  // namespace hsadapt
