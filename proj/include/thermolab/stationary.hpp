#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/geom.hpp"
#include "thermolab/micro_sim.hpp"
#include "thermolab/stats.hpp"

namespace thermolab::stationary {

/// How phi_k(0) is chosen.
///   haar:        independent Haar frames; psi is stationary from t = 0.
///   tau_shift:   phi_k(0) = I, then time is shifted by the largest first
///                collision time over particles.
///   conditioned: phi_k(0) maps a_k to n_hat, so psi(0) = a exactly.
enum class StartMode { haar, tau_shift, conditioned };

const char* to_string(StartMode mode) noexcept;

/// psi_k(t) = phi_k(t)^T n_hat for one particle: piecewise constant with
/// jumps at the particle's collision times.
struct PsiPath {
  std::vector<double> jump_times;  // increasing, in (0, horizon)
  Mat directions;                  // d x (jumps + 1); column m holds the value after jump m

  std::size_t piece_at(double t) const;
  Eigen::Ref<const Vec> value(double t) const { return directions.col(piece_at(t)); }
};

struct PsiTrajectory {
  std::vector<PsiPath> particles;
  double shift = 0.0;  // tau for tau_shift starts, else 0

  /// Stacked psi(t) in R^{N d}.
  Vec value(double t) const;
  void value_into(double t, Eigen::Ref<Vec> out) const;
};

struct StationaryDriverEnsemble {
  int n_particles = 0;
  int dim = 0;
  double collision_rate = 0.0;
  double horizon = 0.0;
  double grid_step = 0.0;
  StartMode mode = StartMode::haar;
  bool stationary = false;
  Vec field_direction;
  std::optional<Vec> conditioning;  // a, for conditioned starts
  std::uint64_t seed = 0;
  std::vector<PsiTrajectory> trajectories;

  int state_dim() const noexcept { return n_particles * dim; }
  std::size_t size() const noexcept { return trajectories.size(); }
  /// Number of uniform grid points on [0, horizon].
  std::size_t grid_size() const;
  /// Stacked psi at grid points (G x N d), computed on demand.
  Mat grid_values(std::size_t trajectory) const;
};

/// One psi trajectory on [0, horizon]. params supplies N, d, lambda and n_hat.
PsiTrajectory simulate_psi_trajectory(const micro::ModelParams& params, double horizon,
                                      RngStream& rng, StartMode mode = StartMode::haar,
                                      const std::optional<Vec>& conditioning = std::nullopt);

StationaryDriverEnsemble simulate_stationary_psi(const micro::ModelParams& params, double horizon,
                                                 std::size_t trajectories, std::uint64_t seed,
                                                 StartMode mode = StartMode::haar,
                                                 const std::optional<Vec>& conditioning = std::nullopt,
                                                 double grid_step = 0.05,
                                                 Execution exec = Execution::parallel);

/// Per-component psi(t) across trajectories.
std::vector<double> psi_component_sample(const StationaryDriverEnsemble& ens, std::size_t component,
                                         double t);

/// E[psi(t)] (N d x 1, target 0) and E[psi(t) psi(t)^T] (target I / d).
stats::CorrelationEstimate psi_mean(const StationaryDriverEnsemble& ens, double t);
stats::CorrelationEstimate psi_second_moment(const StationaryDriverEnsemble& ens, double t);

/// E[psi(0) psi(s)^T] for each lag, averaged over grid origins within each
/// trajectory; the s.e. is taken across trajectories. Lags are snapped to
/// the grid.
std::vector<stats::CorrelationEstimate> autocov_psi(const StationaryDriverEnsemble& ens,
                                                    const std::vector<double>& lags,
                                                    Execution exec = Execution::parallel);

/// E[psi(t) | psi(0) = a] against e^{-lambda t} a (N d x 1).
stats::CorrelationEstimate exp_decay_conditional(const StationaryDriverEnsemble& ens, const Vec& a,
                                                 double t);

/// Exact integrals over the unit windows [j, j + 1), j < n_windows.
struct WindowIntegrals {
  Mat v;           // N d x n_windows, column j = V_j
  Mat h_cross;     // mean over windows of int_j^{j+1} H_j(r) psi(r)^T dr,
                   // H_j(r) = int_j^r psi
};
WindowIntegrals window_integrals(const PsiTrajectory& traj, int n_windows, int n_particles,
                                 int dim);

/// Lag-k correlations E[V_j V_{j+k}^T], k = 0..k_max.
std::vector<stats::CorrelationEstimate> v_correlations(const StationaryDriverEnsemble& ens,
                                                       int k_max,
                                                       Execution exec = Execution::parallel);

struct GreenKuboReport {
  int k_max = 0;
  stats::CorrelationEstimate sigma_tilde;   // C(0) + sum_k (C(k) + C(k)^T)
  stats::CorrelationEstimate e_tilde;       // sum_k C(k)
  stats::CorrelationEstimate h_correction;  // int_0^1 H(r) psi(r)^T dr
  stats::CorrelationEstimate e_const;       // e_tilde + h_correction
  stats::CorrelationEstimate strat_defect;  // e_const - sigma_tilde / 2, target 0
  stats::CorrelationEstimate c0;            // C(0)
  double tail_bound = 0.0;                  // closed-form C(k_max) diagonal
  double tail_estimate = 0.0;               // max |diag C(k_max)| estimate
  bool tail_warning = false;                // tail_bound > 0.1 s.e.(sigma_tilde)
};

/// Green-Kubo constants from per-trajectory estimates. All integrals are
/// exact for piecewise-constant psi, so no quadrature resolution is needed.
GreenKuboReport green_kubo_constants(const StationaryDriverEnsemble& ens, int k_max,
                                     Execution exec = Execution::parallel);

}  // namespace thermolab::stationary
