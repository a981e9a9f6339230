#include "thermolab/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "thermolab/error.hpp"
#include "thermolab/targets.hpp"

namespace thermolab::stationary {

namespace {

void check_conditioning(const Vec& a, int n_particles, int dim) {
  require(a.size() == static_cast<Eigen::Index>(n_particles) * dim,
          ErrorKind::invalid_initial_condition, "conditioning vector has the wrong length");
  for (int k = 0; k < n_particles; ++k) {
    require(std::abs(a.segment(k * dim, dim).norm() - 1.0) <= 1e-12,
            ErrorKind::invalid_initial_condition, "conditioning blocks must have unit norm");
  }
}

std::size_t lag_steps(const StationaryDriverEnsemble& ens, double lag) {
  require(lag >= 0.0 && lag <= ens.horizon + 1e-12, ErrorKind::invalid_parameter,
          "lag outside the simulated horizon");
  return static_cast<std::size_t>(std::llround(lag / ens.grid_step));
}

int window_count(const StationaryDriverEnsemble& ens) {
  return static_cast<int>(std::floor(ens.horizon + 1e-9));
}

// C(k) = mean_j V_j V_{j+k}^T for k = 0..k_max.
std::vector<Mat> lagged_window_correlations(const Mat& v, int k_max) {
  const auto n = v.cols();
  std::vector<Mat> out;
  out.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    const auto m = n - k;
    out.push_back(v.leftCols(m) * v.middleCols(k, m).transpose() / static_cast<double>(m));
  }
  return out;
}

Mat scaled_identity(int n, double value) { return value * Mat::Identity(n, n); }

}  // namespace

const char* to_string(StartMode mode) noexcept {
  switch (mode) {
    case StartMode::haar: return "haar";
    case StartMode::tau_shift: return "tau-shift";
    case StartMode::conditioned: return "conditioned";
  }
  return "unknown";
}

std::size_t PsiPath::piece_at(double t) const {
  return static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) -
                                  jump_times.begin());
}

Vec PsiTrajectory::value(double t) const {
  const auto dim = particles.empty() ? 0 : particles.front().directions.rows();
  Vec out(static_cast<Eigen::Index>(particles.size()) * dim);
  value_into(t, out);
  return out;
}

void PsiTrajectory::value_into(double t, Eigen::Ref<Vec> out) const {
  Eigen::Index offset = 0;
  for (const auto& p : particles) {
    const auto d = p.directions.rows();
    out.segment(offset, d) = p.value(t);
    offset += d;
  }
}

std::size_t StationaryDriverEnsemble::grid_size() const {
  return static_cast<std::size_t>(std::floor(horizon / grid_step + 1e-9)) + 1;
}

Mat StationaryDriverEnsemble::grid_values(std::size_t trajectory) const {
  require(trajectory < trajectories.size(), ErrorKind::index_out_of_range,
          "trajectory index out of range");
  const auto g = grid_size();
  const auto& traj = trajectories[trajectory];
  Mat out(static_cast<Eigen::Index>(g), state_dim());
  for (int k = 0; k < n_particles; ++k) {
    const auto& path = traj.particles[k];
    std::size_t piece = 0;
    for (std::size_t i = 0; i < g; ++i) {
      const double t = static_cast<double>(i) * grid_step;
      while (piece < path.jump_times.size() && path.jump_times[piece] <= t) ++piece;
      out.block(static_cast<Eigen::Index>(i), k * dim, 1, dim) =
          path.directions.col(static_cast<Eigen::Index>(piece)).transpose();
    }
  }
  return out;
}

PsiTrajectory simulate_psi_trajectory(const micro::ModelParams& params, double horizon,
                                      RngStream& rng, StartMode mode,
                                      const std::optional<Vec>& conditioning) {
  require(params.n_particles >= 1, ErrorKind::invalid_parameter, "need at least one particle");
  require(params.dim >= 2, ErrorKind::invalid_dimension, "rotations need d >= 2");
  require(params.collision_rate > 0.0, ErrorKind::invalid_parameter,
          "collision rate must be positive");
  require(horizon > 0.0, ErrorKind::invalid_parameter, "horizon must be positive");
  const int n = params.n_particles;
  const int d = params.dim;
  const double lambda = params.collision_rate;
  const Vec n_hat = params.unit_field();
  if (mode == StartMode::conditioned) {
    require(conditioning.has_value(), ErrorKind::invalid_initial_condition,
            "conditioned start needs a conditioning vector");
    check_conditioning(*conditioning, n, d);
  }

  PsiTrajectory traj;
  traj.particles.resize(n);
  std::vector<double> first_collision(n, 0.0);
  if (mode == StartMode::tau_shift) {
    for (int k = 0; k < n; ++k) first_collision[k] = rng.exponential(lambda);
    traj.shift = *std::max_element(first_collision.begin(), first_collision.end());
  }
  const double shift = traj.shift;
  const double end = shift + horizon;

  std::vector<double> cols;
  for (int k = 0; k < n; ++k) {
    geom::Rotation phi = geom::Rotation::identity(d);
    Vec a_k;
    if (mode == StartMode::haar) {
      phi = geom::sample_haar_rotation(d, rng);
    } else if (mode == StartMode::conditioned) {
      a_k = conditioning->segment(k * d, d);
      phi = geom::rotation_between(a_k, n_hat);
    }
    double next = mode == StartMode::tau_shift ? first_collision[k] : rng.exponential(lambda);
    while (next <= shift) {
      phi = geom::sample_haar_rotation(d, rng) * phi;
      next += rng.exponential(lambda);
    }
    PsiPath& path = traj.particles[k];
    cols.clear();
    Vec psi = phi.matrix().transpose() * n_hat;
    // psi(0) = a to the last bit; phi(0) only seeds the later frames.
    if (mode == StartMode::conditioned) psi = a_k;
    cols.insert(cols.end(), psi.data(), psi.data() + d);
    while (next < end) {
      phi = geom::sample_haar_rotation(d, rng) * phi;
      psi.noalias() = phi.matrix().transpose() * n_hat;
      path.jump_times.push_back(next - shift);
      cols.insert(cols.end(), psi.data(), psi.data() + d);
      next += rng.exponential(lambda);
    }
    path.directions = Eigen::Map<const Mat>(cols.data(), d, static_cast<Eigen::Index>(cols.size()) / d);
  }
  return traj;
}

StationaryDriverEnsemble simulate_stationary_psi(const micro::ModelParams& params, double horizon,
                                                 std::size_t trajectories, std::uint64_t seed,
                                                 StartMode mode,
                                                 const std::optional<Vec>& conditioning,
                                                 double grid_step, Execution exec) {
  require(grid_step > 0.0, ErrorKind::invalid_parameter, "grid step must be positive");
  StationaryDriverEnsemble ens;
  ens.n_particles = params.n_particles;
  ens.dim = params.dim;
  ens.collision_rate = params.collision_rate;
  ens.horizon = horizon;
  ens.grid_step = grid_step;
  ens.mode = mode;
  ens.stationary = mode != StartMode::conditioned;
  ens.field_direction = params.unit_field();
  ens.conditioning = conditioning;
  ens.seed = seed;
  ens.trajectories = generate_ensemble(
      trajectories, seed, 0,
      [&](RngStream& rng, std::size_t) {
        return simulate_psi_trajectory(params, horizon, rng, mode, conditioning);
      },
      exec);
  return ens;
}

std::vector<double> psi_component_sample(const StationaryDriverEnsemble& ens, std::size_t component,
                                         double t) {
  require(component < static_cast<std::size_t>(ens.state_dim()), ErrorKind::index_out_of_range,
          "psi component out of range");
  require(t >= 0.0 && t <= ens.horizon, ErrorKind::invalid_parameter, "time outside the horizon");
  const auto k = static_cast<std::size_t>(component) / ens.dim;
  const auto i = static_cast<Eigen::Index>(component % ens.dim);
  std::vector<double> out;
  out.reserve(ens.size());
  for (const auto& traj : ens.trajectories) out.push_back(traj.particles[k].value(t)[i]);
  return out;
}

stats::CorrelationEstimate psi_mean(const StationaryDriverEnsemble& ens, double t) {
  require(t >= 0.0 && t <= ens.horizon, ErrorKind::invalid_parameter, "time outside the horizon");
  stats::MatrixAccumulator acc(ens.state_dim(), 1);
  Vec psi(ens.state_dim());
  for (const auto& traj : ens.trajectories) {
    traj.value_into(t, psi);
    acc.add(psi);
  }
  return stats::make_estimate(acc, Mat::Zero(ens.state_dim(), 1), "psi-mean", t);
}

stats::CorrelationEstimate psi_second_moment(const StationaryDriverEnsemble& ens, double t) {
  require(t >= 0.0 && t <= ens.horizon, ErrorKind::invalid_parameter, "time outside the horizon");
  stats::MatrixAccumulator acc(ens.state_dim(), ens.state_dim());
  Vec psi(ens.state_dim());
  for (const auto& traj : ens.trajectories) {
    traj.value_into(t, psi);
    acc.add(psi * psi.transpose());
  }
  return stats::make_estimate(
      acc, scaled_identity(ens.state_dim(), targets::psi_second_moment(ens.dim)),
      "psi-second-moment", t);
}

std::vector<stats::CorrelationEstimate> autocov_psi(const StationaryDriverEnsemble& ens,
                                                    const std::vector<double>& lags,
                                                    Execution exec) {
  const auto g = ens.grid_size();
  std::vector<std::size_t> steps;
  for (double lag : lags) {
    steps.push_back(lag_steps(ens, lag));
    require(steps.back() < g, ErrorKind::invalid_parameter, "lag outside the simulated horizon");
  }
  const int m = ens.state_dim();
  std::vector<std::vector<Mat>> per_traj(ens.size());
  parallel_for(
      ens.size(),
      [&](std::size_t i) {
        const Mat values = ens.grid_values(i);
        auto& out = per_traj[i];
        out.reserve(steps.size());
        for (std::size_t L : steps) {
          const auto rows = static_cast<Eigen::Index>(g - L);
          out.push_back(values.topRows(rows).transpose() *
                        values.middleRows(static_cast<Eigen::Index>(L), rows) /
                        static_cast<double>(rows));
        }
      },
      exec);
  std::vector<stats::CorrelationEstimate> result;
  for (std::size_t l = 0; l < steps.size(); ++l) {
    stats::MatrixAccumulator acc(m, m);
    for (const auto& t : per_traj) acc.add(t[l]);
    const double lag = static_cast<double>(steps[l]) * ens.grid_step;
    result.push_back(stats::make_estimate(
        acc, scaled_identity(m, targets::psi_autocov(ens.collision_rate, ens.dim, lag)),
        "psi-autocov", lag));
  }
  return result;
}

stats::CorrelationEstimate exp_decay_conditional(const StationaryDriverEnsemble& ens, const Vec& a,
                                                 double t) {
  check_conditioning(a, ens.n_particles, ens.dim);
  require(ens.mode == StartMode::conditioned && ens.conditioning.has_value() &&
              (*ens.conditioning - a).lpNorm<Eigen::Infinity>() <= 1e-12,
          ErrorKind::invalid_initial_condition, "ensemble is not conditioned on psi(0) = a");
  require(t >= 0.0 && t <= ens.horizon, ErrorKind::invalid_parameter, "time outside the horizon");
  stats::MatrixAccumulator acc(ens.state_dim(), 1);
  Vec psi(ens.state_dim());
  for (const auto& traj : ens.trajectories) {
    traj.value_into(t, psi);
    acc.add(psi);
  }
  return stats::make_estimate(acc, targets::conditional_decay_factor(ens.collision_rate, t) * a,
                              "conditional-decay", t);
}

WindowIntegrals window_integrals(const PsiTrajectory& traj, int n_windows, int n_particles,
                                 int dim) {
  require(n_windows >= 1, ErrorKind::insufficient_data, "need at least one window");
  require(static_cast<int>(traj.particles.size()) == n_particles, ErrorKind::invalid_dimension,
          "particle count mismatch");
  const int m = n_particles * dim;

  struct Jump {
    double time;
    int particle;
    std::size_t column;
  };
  std::vector<Jump> jumps;
  for (int k = 0; k < n_particles; ++k) {
    const auto& jt = traj.particles[k].jump_times;
    for (std::size_t i = 0; i < jt.size(); ++i) jumps.push_back({jt[i], k, i + 1});
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) {
    return x.time < y.time || (x.time == y.time && x.particle < y.particle);
  });

  Vec c(m);
  for (int k = 0; k < n_particles; ++k) c.segment(k * dim, dim) = traj.particles[k].directions.col(0);

  WindowIntegrals out;
  out.v = Mat::Zero(m, n_windows);
  out.h_cross = Mat::Zero(m, m);
  Vec h(m);
  std::size_t next = 0;
  for (int j = 0; j < n_windows; ++j) {
    h.setZero();
    double t = j;
    const double window_end = j + 1.0;
    while (true) {
      const bool jump_inside = next < jumps.size() && jumps[next].time < window_end;
      const double stop = jump_inside ? jumps[next].time : window_end;
      const double dt = stop - t;
      if (dt > 0.0) {
        // int_t^stop (h + (r - t) c) c^T dr
        out.h_cross.noalias() += dt * h * c.transpose();
        out.h_cross.noalias() += (0.5 * dt * dt) * c * c.transpose();
        h += dt * c;
      }
      t = stop;
      if (!jump_inside) break;
      const Jump& jp = jumps[next++];
      c.segment(jp.particle * dim, dim) =
          traj.particles[jp.particle].directions.col(static_cast<Eigen::Index>(jp.column));
    }
    out.v.col(j) = h;
  }
  out.h_cross /= static_cast<double>(n_windows);
  return out;
}

std::vector<stats::CorrelationEstimate> v_correlations(const StationaryDriverEnsemble& ens,
                                                       int k_max, Execution exec) {
  require(k_max >= 0, ErrorKind::invalid_parameter, "k_max must be >= 0");
  const int n_windows = window_count(ens);
  require(n_windows >= k_max + 1, ErrorKind::insufficient_data, "horizon must be >= k_max + 1");
  std::vector<std::vector<Mat>> per_traj(ens.size());
  parallel_for(
      ens.size(),
      [&](std::size_t i) {
        const auto wi = window_integrals(ens.trajectories[i], n_windows, ens.n_particles, ens.dim);
        per_traj[i] = lagged_window_correlations(wi.v, k_max);
      },
      exec);
  const int m = ens.state_dim();
  std::vector<stats::CorrelationEstimate> out;
  for (int k = 0; k <= k_max; ++k) {
    stats::MatrixAccumulator acc(m, m);
    for (const auto& t : per_traj) acc.add(t[k]);
    out.push_back(stats::make_estimate(
        acc, scaled_identity(m, targets::v_corr(ens.collision_rate, ens.dim, k)), "v-corr", k));
  }
  return out;
}

GreenKuboReport green_kubo_constants(const StationaryDriverEnsemble& ens, int k_max,
                                     Execution exec) {
  require(k_max >= 1, ErrorKind::invalid_parameter, "k_max must be >= 1");
  require(std::exp(-ens.collision_rate * k_max) < 1e-6, ErrorKind::invalid_parameter,
          "k_max too small: need e^{-lambda k_max} < 1e-6");
  const int n_windows = window_count(ens);
  require(n_windows >= k_max + 1, ErrorKind::insufficient_data, "horizon must be >= k_max + 1");

  struct PerTrajectory {
    Mat c0, sigma, e_tilde, h, e, defect, c_last;
  };
  std::vector<PerTrajectory> per_traj(ens.size());
  parallel_for(
      ens.size(),
      [&](std::size_t i) {
        const auto wi = window_integrals(ens.trajectories[i], n_windows, ens.n_particles, ens.dim);
        const auto c = lagged_window_correlations(wi.v, k_max);
        PerTrajectory& r = per_traj[i];
        r.e_tilde = Mat::Zero(c[0].rows(), c[0].cols());
        for (int k = 1; k <= k_max; ++k) r.e_tilde += c[k];
        r.c0 = c[0];
        r.sigma = c[0] + r.e_tilde + r.e_tilde.transpose();
        r.h = wi.h_cross;
        r.e = r.e_tilde + r.h;
        r.defect = r.e - 0.5 * r.sigma;
        r.c_last = c[k_max];
      },
      exec);

  const int m = ens.state_dim();
  stats::MatrixAccumulator c0(m, m), sigma(m, m), e_tilde(m, m), h(m, m), e(m, m), defect(m, m),
      last(m, m);
  for (const auto& r : per_traj) {
    c0.add(r.c0);
    sigma.add(r.sigma);
    e_tilde.add(r.e_tilde);
    h.add(r.h);
    e.add(r.e);
    defect.add(r.defect);
    last.add(r.c_last);
  }
  const double lambda = ens.collision_rate;
  const int d = ens.dim;
  GreenKuboReport rep;
  rep.k_max = k_max;
  rep.c0 = stats::make_estimate(c0, scaled_identity(m, targets::v_corr(lambda, d, 0)), "v-corr");
  rep.sigma_tilde =
      stats::make_estimate(sigma, scaled_identity(m, targets::sigma_tilde(lambda, d)), "sigma-tilde");
  rep.e_tilde =
      stats::make_estimate(e_tilde, scaled_identity(m, targets::e_tilde(lambda, d)), "e-tilde");
  rep.h_correction =
      stats::make_estimate(h, scaled_identity(m, targets::h_correction(lambda, d)), "h-correction");
  rep.e_const = stats::make_estimate(e, scaled_identity(m, targets::e_const(lambda, d)), "e-const");
  rep.strat_defect = stats::make_estimate(defect, Mat::Zero(m, m), "stratonovich-defect");
  rep.tail_bound = targets::v_corr(lambda, d, k_max);
  rep.tail_estimate = last.mean().diagonal().cwiseAbs().maxCoeff();
  rep.tail_warning = rep.tail_bound > 0.1 * rep.sigma_tilde.std_error.diagonal().minCoeff();
  return rep;
}

}  // namespace thermolab::stationary
