#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/geom.hpp"
#include "thermolab/rng.hpp"

namespace thermolab::sde {

enum class SdeModel { strat_sphere, ito_speed, ou };

/// Brownian covariance convention. The collision limit drives with
/// covariance 2/(lambda d) I; the spherical-projection study uses identity
/// covariance.
enum class NoiseConvention { collision_limit, unit };

const char* to_string(SdeModel model) noexcept;
SdeModel parse_model(const std::string& name);

struct SdeConfig {
  SdeModel model = SdeModel::strat_sphere;
  int n_particles = 2;
  int dim = 2;
  double collision_rate = 1.0;
  double total_energy = 2.0;
  double step = 1e-3;
  double t_final = 1.0;
  Vec initial;  // empty: model default (see initial_state)
  NoiseConvention noise = NoiseConvention::collision_limit;
  int record_every = 1;

  /// delta = 2 / (lambda d); always derived, never stored.
  double delta() const noexcept { return 2.0 / (collision_rate * dim); }
  double variance_rate() const noexcept {
    return noise == NoiseConvention::unit ? 1.0 : delta();
  }
  int state_dim() const noexcept;
  std::size_t step_count() const;
  double effective_step() const { return t_final / static_cast<double>(step_count()); }
  /// strat-sphere: every block sqrt(U/N) e_1; ito-speed: every v_k = sqrt(U/N);
  /// ou: 0.
  Vec initial_state() const;
  void validate() const;
};

/// Values on a uniform grid, row-major (times x dim).
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  int dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
  std::size_t rejections = 0;  // ito-speed step halvings

  std::size_t size() const noexcept { return times.size(); }
  Eigen::Map<const Vec> at(std::size_t i) const {
    return Eigen::Map<const Vec>(values.data() + i * dim, dim);
  }
  Eigen::Map<const Vec> final_value() const { return at(size() - 1); }
};

/// Centered Gaussians with variance variance_rate * h per component.
Vec brownian_increments(int m, double variance_rate, double h, RngStream& rng);

/// One Heun (Stratonovich midpoint) step of du = (I - u u^T / U) o dW,
/// then projection onto |u|^2 = U.
class StratSphereStepper {
 public:
  StratSphereStepper(Eigen::Index state_dim, double total_energy);
  void step(Vec& u, const Vec& dw);

 private:
  double total_energy_;
  Vec drift0_, predictor_, drift1_;
};

PathSample strat_sphere_solve(const SdeConfig& cfg, RngStream& rng);

/// Euler-Maruyama for the speed SDE. Steps that would make a speed
/// nonpositive are rejected and redone as two half steps along a Brownian
/// bridge; more than 40 nested halvings is an error.
PathSample ito_speed_solve(const SdeConfig& cfg, RngStream& rng);

/// Exact OU transition for dX = dB - X/2 dt.
double ou_exact_step(double x, double h, RngStream& rng);
PathSample ou_solve(const SdeConfig& cfg, RngStream& rng);

/// Per-block Euclidean norms of a stacked (N*d) vector.
Vec block_norms(const Eigen::Ref<const Vec>& u, int dim);

struct OuProjectionReport {
  int n = 0;
  double t_final = 0.0;
  double step = 0.0;
  std::size_t paths = 0;
  double ks_statistic = 0.0;   // u_1(T) vs independent exact OU X(T)
  double ks_critical_05 = 0.0;
  double ks_critical_01 = 0.0;
  double mean_sup_deviation = 0.0;  // E sup_{s<=T} |u_1 - X| on shared noise
  double sup_deviation_se = 0.0;
  double mean_u1_squared = 0.0;     // E u_1(T)^2
  double u1_squared_se = 0.0;
  double autocov_lag = 0.0;         // E u_1(T - lag) u_1(T)
  double autocov_se = 0.0;
  double autocov_target = 0.0;      // OU from X(0) = 1: e^{-lag/2}
  double autocov_lag_time = 0.0;
};

/// Sphere diffusion in R^n with |u|^2 = n, unit-covariance noise and
/// u(0) = (1, ..., 1), coupled to the OU process through the first Brownian
/// coordinate. The OU increment is drawn jointly with dW_1, so the coupling
/// is exact in law.
OuProjectionReport ou_projection_experiment(int n, double t_final, std::size_t paths,
                                            std::uint64_t seed, double step,
                                            Execution exec = Execution::parallel);

}  // namespace thermolab::sde
