#include "thermolab/ensemble.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

#include "thermolab/error.hpp"

namespace thermolab {

namespace {

int initial_budget() {
  if (const char* env = std::getenv("THERMOSTAT_LAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

std::atomic<int>& budget() {
  static std::atomic<int> value{initial_budget()};
  return value;
}

}  // namespace

int thread_budget() { return budget().load(std::memory_order_relaxed); }

void set_thread_budget(int threads) {
  require(threads >= 1, ErrorKind::invalid_parameter, "thread budget must be >= 1");
  budget().store(threads, std::memory_order_relaxed);
}

}  // namespace thermolab
