#pragma once

#include <cstdint>
#include <random>

namespace thermolab {

/// Reproducible random stream keyed by (seed, stream_index).
///
/// Each trajectory of an ensemble owns the stream whose index is its position
/// in the ensemble, so the draws a trajectory sees never depend on how the
/// ensemble is scheduled across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Exponential waiting time with the given rate (mean 1/rate).
  double exponential(double rate);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stream index for member `index` of a named family of streams sharing a
/// master seed. Families keep independent sub-experiments (reference samples,
/// coupled samples) from reusing each other's draws.
constexpr std::uint64_t stream_id(std::uint64_t family, std::uint64_t index) {
  return (family << 40) | (index & ((std::uint64_t{1} << 40) - 1));
}

}  // namespace thermolab
