#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/micro_sim.hpp"
#include "thermolab/stats.hpp"

namespace thermolab::convergence {

struct WeakConvergenceConfig {
  micro::ModelParams params;      // field_strength and t_final are set per epsilon
  std::vector<double> epsilons;   // strictly decreasing
  std::vector<double> times;      // macroscopic observation times
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double sde_step = 1e-3;
  int grid_intervals = 10;        // micro output grid on [0, eps^-2 max(times)]
  double max_micro_horizon = 1e6; // longer micro runs are omitted, not attempted

  void validate() const;
};

struct Comparison {
  std::string observable;  // "v" (speed) or "u-norm"
  int particle = 0;
  double time = 0.0;
  stats::KsResult ks;
  stats::RawMoments micro;
  stats::RawMoments reference;
};

struct EpsilonResult {
  double epsilon = 0.0;
  bool simulated = false;
  std::string omission;  // reason when not simulated
  double micro_horizon = 0.0;
  std::vector<Comparison> comparisons;
  double max_energy_error = 0.0;
  double max_speed_identity_error = 0.0;  // max | |u_k| - |p_k| |
};

struct WeakConvergenceReport {
  WeakConvergenceConfig config;
  std::vector<double> observed_times;  // snapped to both grids
  std::vector<EpsilonResult> results;
  std::size_t reference_rejections = 0;

  /// KS statistics over the simulated epsilons for one observable.
  std::vector<double> ks_series(const std::string& observable, int particle,
                                std::size_t time_index) const;
  bool strictly_decreasing(const std::string& observable, int particle,
                           std::size_t time_index) const;
  /// KS below the 5% critical value at the smallest simulated epsilon.
  bool final_passes(const std::string& observable, int particle, std::size_t time_index) const;
};

/// Speeds of the micro simulation at eps^-2 t against ito_speed_solve
/// samples (observable "v") and block norms of u against strat_sphere_solve
/// samples (observable "u-norm"). The reference samples are shared across
/// epsilons.
WeakConvergenceReport weak_convergence_study(const WeakConvergenceConfig& cfg,
                                             Execution exec = Execution::parallel);

struct MomentScalingConfig {
  micro::ModelParams params;
  double epsilon = 0.1;
  double q = 4.0;
  std::vector<double> gaps;  // macroscopic; multiples of the smallest gap
  double horizon = 0.0;      // 0: twice the largest gap
  std::size_t paths = 1000;
  std::uint64_t seed = 1;

  static std::vector<double> default_gaps();  // 0.1 * 2^k, k = 0..7
};

struct MomentScalingReport {
  double epsilon = 0.0;
  double horizon = 0.0;
  std::size_t paths = 0;
  stats::MomentBoundFit level1;
  stats::MomentBoundFit level2;
};

/// Increments (W^eps(s, t), WW^eps(s, t)) of the canonical lift of the
/// rescaled driver over overlapping windows, fitted in log-log.
MomentScalingReport moment_scaling_study(const MomentScalingConfig& cfg,
                                         Execution exec = Execution::parallel);

}  // namespace thermolab::convergence
