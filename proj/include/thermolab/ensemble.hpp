#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include "thermolab/rng.hpp"

namespace thermolab {

/// Serial runs are the reference implementation; parallel runs must agree
/// with them bit for bit.
enum class Execution { serial, parallel };

/// Thread budget used by parallel kernels. Initialised from
/// THERMOSTAT_LAB_THREADS when set, otherwise the OpenMP default.
int thread_budget();
void set_thread_budget(int threads);

/// Runs `fn(rng, index)` for every index in [0, count) with the stream
/// RngStream(seed, stream_id(family, index)) and returns results in index
/// order. Parallel and serial execution give identical results.
template <class Fn>
auto generate_ensemble(std::size_t count, std::uint64_t seed, std::uint64_t family, Fn&& fn,
                       Execution exec = Execution::parallel) {
  using Result = std::invoke_result_t<Fn&, RngStream&, std::size_t>;
  std::vector<std::optional<Result>> slots(count);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) {
      RngStream rng(seed, stream_id(family, i));
      slots[i].emplace(fn(rng, i));
    }
  } else {
    std::exception_ptr failure;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_budget())
    for (long long i = 0; i < n; ++i) {
      try {
        RngStream rng(seed, stream_id(family, static_cast<std::uint64_t>(i)));
        slots[i].emplace(fn(rng, static_cast<std::size_t>(i)));
      } catch (...) {
#pragma omp critical(thermolab_ensemble_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Index-parallel loop without random streams.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, Execution exec = Execution::parallel) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_budget())
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(thermolab_parallel_for_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace thermolab
