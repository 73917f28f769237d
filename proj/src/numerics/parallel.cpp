#include "bellgames/numerics/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bellgames {
namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("BELLGAMES_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& workers_setting() {
  static std::atomic<std::size_t> workers{default_workers()};
  return workers;
}

}  // namespace

std::size_t worker_count() { return workers_setting().load(); }

void set_worker_count(std::size_t workers) { workers_setting().store(std::max<std::size_t>(1, workers)); }

}  // namespace bellgames
