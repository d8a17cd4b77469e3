#include "hsadapt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace hsadapt {
namespace {

std::atomic<std::size_t> g_override{0};
std::atomic<bool> g_has_override{false};
thread_local bool t_inside_worker = false;

std::size_t env_worker_count() {
  static const std::size_t value = [] {
    std::size_t n = 0;
    if (const char* env = std::getenv("HSADAPT_THREADS")) {
      try {
        n = static_cast<std::size_t>(std::stoul(env));
      } catch (...) {
        n = 0;
      }
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
  }();
  return value;
}

}  // namespace

std::size_t worker_count() {
  if (g_has_override.load()) return g_override.load();
  return env_worker_count();
}

void set_worker_count(std::size_t count) {
  if (count == 0) {
    g_has_override = false;
    return;
  }
  g_override = count;
  g_has_override = true;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  bool allow_parallel) {
  const std::size_t workers = std::min(n, worker_count());
  if (!allow_parallel || workers <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    t_inside_worker = true;
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    t_inside_worker = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hsadapt
