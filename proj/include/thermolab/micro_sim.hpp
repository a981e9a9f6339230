#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "thermolab/geom.hpp"
#include "thermolab/path.hpp"
#include "thermolab/rng.hpp"

namespace thermolab::micro {

/// Parameters of the thermostatted N-particle system with Poisson collisions.
struct ModelParams {
  int n_particles = 2;
  int dim = 2;
  double collision_rate = 1.0;   // lambda, events per unit time per particle
  double field_strength = 0.1;   // epsilon, E = epsilon * n_hat
  Vec field_direction;           // n_hat; empty means e_1
  double total_energy = 2.0;     // U
  double t_final = 10.0;
  double ode_step = 0.05;        // max RK4 substep between collisions
  int grid_points = 101;         // output grid on [0, t_final], endpoints included
  std::optional<Vec> initial_p;  // default: every p_k = sqrt(U/N) n_hat

  void validate() const;
  int state_dim() const noexcept { return n_particles * dim; }
  Vec unit_field() const;
  Vec initial_state() const;
  std::vector<double> output_grid() const;
};

struct ParticleSystemState {
  double time = 0.0;
  Vec p;
};

struct CollisionEvent {
  double time;
  int particle;
  geom::Rotation rotation;
};

/// Poisson(lambda) collision times per particle on (0, t_final] with Haar
/// rotations, merged and sorted by time. Draw order: particle by particle.
std::vector<CollisionEvent> sample_collision_schedule(const ModelParams& params, RngStream& rng);

/// Thermostatted field term: eps n - eps (sum_j n.p_j / U) p_k per block.
Vec thermostat_rhs(const Vec& p, double field_strength, const Vec& n_hat, double total_energy);
void thermostat_rhs_into(const Eigen::Ref<const Vec>& p, double field_strength, const Vec& n_hat,
                         double total_energy, Eigen::Ref<Vec> out);

/// RK4 with substeps <= params.ode_step over (state.time, state.time + dt],
/// then projection back onto the energy sphere.
ParticleSystemState step_between_collisions(const ParticleSystemState& state, double dt,
                                            const ModelParams& params);

/// p_k <- g p_k for the colliding particle.
ParticleSystemState apply_collision(const ParticleSystemState& state, const CollisionEvent& event,
                                    int dim);

/// Per-particle cumulative frame phi_k(t) = g_k^n ... g_k^1, right-continuous
/// and piecewise constant.
class FrameProcess {
 public:
  FrameProcess(int n_particles, int dim);

  int n_particles() const noexcept { return static_cast<int>(breakpoints_.size()); }
  int dim() const noexcept { return dim_; }

  /// Left-multiplies phi_k by the event rotation.
  void record(const CollisionEvent& event);

  const geom::Rotation& current(int particle) const { return frames_[particle].back(); }
  /// phi_k(t); right-continuous at breakpoints.
  const geom::Rotation& at(int particle, double t) const;
  const std::vector<double>& breakpoints(int particle) const { return breakpoints_[particle]; }

  /// Rebuilds the frame history from an event log.
  static FrameProcess from_events(int n_particles, int dim,
                                  const std::vector<CollisionEvent>& events);

 private:
  int dim_;
  std::vector<std::vector<double>> breakpoints_;          // tau_k^1 < tau_k^2 < ...
  std::vector<std::vector<geom::Rotation>> frames_;       // [0] = I, [n] after n-th event
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> p;
  std::vector<Vec> u;
  PiecewiseLinearPath driver;  // Phi, knots at every event and grid time
  std::vector<CollisionEvent> events;
  FrameProcess frames;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
  double max_energy_error = 0.0;  // max |sum |p_k|^2 - U| / U over steps
  double max_u_jump = 0.0;        // max |u(tau+) - u(tau-)| over collisions
};

/// Full simulation with a freshly sampled collision schedule.
Trajectory simulate_trajectory(const ModelParams& params, RngStream& rng);
/// Simulation against a given schedule (used to force g = I or no events).
Trajectory simulate_trajectory(const ModelParams& params, std::vector<CollisionEvent> events);

/// Driver Phi alone (no ODE), consuming the rng exactly as simulate_trajectory
/// does, so both produce the same Phi for the same stream.
PiecewiseLinearPath simulate_driver(const ModelParams& params, RngStream& rng);
PiecewiseLinearPath build_driver(const ModelParams& params,
                                 const std::vector<CollisionEvent>& events);

/// W^eps(t) = eps Phi(t / eps^2) on [0, horizon]; horizon defaults to the
/// whole simulated window eps^2 t_final.
PiecewiseLinearPath rescale_driver(const PiecewiseLinearPath& driver, double epsilon,
                                   std::optional<double> horizon = std::nullopt);

/// u_k = phi_k^T p_k for every block.
Vec slow_variable(const Vec& p, const FrameProcess& frames, double t);

}  // namespace thermolab::micro
