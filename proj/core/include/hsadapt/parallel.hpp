#pragma once

#include <cstddef>
#include <functional>

namespace hsadapt {

/// Worker cap. Reads HSADAPT_THREADS once (0 or unset = hardware concurrency)
/// unless overridden with set_worker_count().
std::size_t worker_count();
void set_worker_count(std::size_t count);

/// Runs fn(0..n-1). Each index must write only its own output slot, so results do
/// not depend on scheduling. Nested calls from inside a worker run inline.
/// The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  bool allow_parallel = true);

}  // namespace hsadapt
