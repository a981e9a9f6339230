#include "thermolab/sde_limit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermolab/error.hpp"
#include "thermolab/stats.hpp"

namespace thermolab::sde {

namespace {

constexpr int kMaxHalvings = 40;

void record(PathSample& out, double t, const Eigen::Ref<const Vec>& x) {
  out.times.push_back(t);
  out.values.insert(out.values.end(), x.data(), x.data() + x.size());
}

PathSample make_sample(const SdeConfig& cfg, const RngStream& rng) {
  PathSample out;
  out.dim = cfg.state_dim();
  out.seed = rng.seed();
  out.stream_index = rng.stream_index();
  const std::size_t points = cfg.step_count() / cfg.record_every + 2;
  out.times.reserve(points);
  out.values.reserve(points * out.dim);
  return out;
}

bool should_record(const SdeConfig& cfg, std::size_t step, std::size_t steps) {
  return step == steps || step % static_cast<std::size_t>(cfg.record_every) == 0;
}

}  // namespace

const char* to_string(SdeModel model) noexcept {
  switch (model) {
    case SdeModel::strat_sphere: return "strat-sphere";
    case SdeModel::ito_speed: return "ito-speed";
    case SdeModel::ou: return "ou";
  }
  return "unknown";
}

SdeModel parse_model(const std::string& name) {
  if (name == "strat-sphere") return SdeModel::strat_sphere;
  if (name == "ito-speed") return SdeModel::ito_speed;
  if (name == "ou") return SdeModel::ou;
  throw Error(ErrorKind::unsupported_model, "unknown SDE model '" + name + "'");
}

int SdeConfig::state_dim() const noexcept {
  switch (model) {
    case SdeModel::strat_sphere: return n_particles * dim;
    case SdeModel::ito_speed: return n_particles;
    case SdeModel::ou: return 1;
  }
  return 0;
}

std::size_t SdeConfig::step_count() const {
  require(step > 0.0 && t_final > 0.0, ErrorKind::invalid_parameter,
          "step and t_final must be positive");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(t_final / step - 1e-9)));
}

Vec SdeConfig::initial_state() const {
  if (initial.size() != 0) return initial;
  switch (model) {
    case SdeModel::strat_sphere: {
      Vec u = Vec::Zero(n_particles * dim);
      const double speed = std::sqrt(total_energy / n_particles);
      for (int k = 0; k < n_particles; ++k) u[k * dim] = speed;
      return u;
    }
    case SdeModel::ito_speed:
      return Vec::Constant(n_particles, std::sqrt(total_energy / n_particles));
    case SdeModel::ou:
      return Vec::Zero(1);
  }
  return {};
}

void SdeConfig::validate() const {
  require(n_particles >= 1, ErrorKind::invalid_parameter, "n_particles must be >= 1");
  require(dim >= 1, ErrorKind::invalid_dimension, "dim must be >= 1");
  require(collision_rate > 0.0, ErrorKind::invalid_parameter, "collision rate must be positive");
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
  require(step > 0.0, ErrorKind::invalid_parameter, "step must be positive");
  require(t_final > 0.0, ErrorKind::invalid_parameter, "t_final must be positive");
  require(record_every >= 1, ErrorKind::invalid_parameter, "record_every must be >= 1");
  if (model == SdeModel::ito_speed)
    require(dim >= 2, ErrorKind::unsupported_model,
            "the speed SDE is only valid for d >= 2");
  const Vec x0 = initial_state();
  require(x0.size() == state_dim(), ErrorKind::invalid_initial_condition,
          "initial state has the wrong length");
  if (model == SdeModel::strat_sphere) {
    require(std::abs(x0.squaredNorm() - total_energy) <= 1e-10 * total_energy,
            ErrorKind::invalid_initial_condition, "initial state is off the energy sphere");
  } else if (model == SdeModel::ito_speed) {
    require((x0.array() > 0.0).all(), ErrorKind::invalid_initial_condition,
            "initial speeds must be positive");
    require(std::abs(x0.squaredNorm() - total_energy) <= 1e-10 * total_energy,
            ErrorKind::invalid_initial_condition, "initial speeds must satisfy sum v^2 = U");
  }
}

Vec brownian_increments(int m, double variance_rate, double h, RngStream& rng) {
  require(h > 0.0, ErrorKind::invalid_parameter, "increment length must be positive");
  require(variance_rate >= 0.0, ErrorKind::invalid_parameter, "variance rate must be >= 0");
  const double sd = std::sqrt(variance_rate * h);
  Vec dw(m);
  for (int i = 0; i < m; ++i) dw[i] = sd * rng.normal();
  return dw;
}

StratSphereStepper::StratSphereStepper(Eigen::Index state_dim, double total_energy)
    : total_energy_(total_energy), drift0_(state_dim), predictor_(state_dim), drift1_(state_dim) {}

void StratSphereStepper::step(Vec& u, const Vec& dw) {
  drift0_ = dw - u * (u.dot(dw) / total_energy_);
  predictor_ = u + drift0_;
  drift1_ = dw - predictor_ * (predictor_.dot(dw) / total_energy_);
  u += 0.5 * (drift0_ + drift1_);
  geom::project_to_sphere_inplace(u, total_energy_);
}

PathSample strat_sphere_solve(const SdeConfig& cfg, RngStream& rng) {
  require(cfg.model == SdeModel::strat_sphere, ErrorKind::unsupported_model,
          "config is not a strat-sphere model");
  cfg.validate();
  PathSample out = make_sample(cfg, rng);
  Vec u = geom::project_to_sphere(cfg.initial_state(), cfg.total_energy);
  const std::size_t steps = cfg.step_count();
  const double h = cfg.effective_step();
  const double sd = std::sqrt(cfg.variance_rate() * h);
  StratSphereStepper stepper(u.size(), cfg.total_energy);
  Vec dw(u.size());
  record(out, 0.0, u);
  for (std::size_t s = 1; s <= steps; ++s) {
    for (Eigen::Index i = 0; i < dw.size(); ++i) dw[i] = sd * rng.normal();
    stepper.step(u, dw);
    if (should_record(cfg, s, steps)) record(out, static_cast<double>(s) * h, u);
  }
  return out;
}

namespace {

class SpeedStepper {
 public:
  explicit SpeedStepper(const SdeConfig& cfg)
      : energy_(cfg.total_energy),
        delta_(cfg.delta()),
        root_delta_(std::sqrt(cfg.delta())),
        half_d_minus_1_(0.5 * (cfg.dim - 1)),
        half_nd_minus_1_(0.5 * (cfg.n_particles * cfg.dim - 1)),
        trial_(cfg.n_particles) {}

  // Advances v over an increment dw of standard Brownian motion (variance h).
  void advance(Vec& v, const Vec& dw, double h, RngStream& rng, int depth, std::size_t& rejections) {
    if (try_step(v, dw, h)) {
      v = trial_;
      return;
    }
    if (depth >= kMaxHalvings)
      throw Error(ErrorKind::step_size, "speed SDE step rejected after 40 halvings");
    ++rejections;
    Vec first(dw.size());
    const double bridge_sd = 0.5 * std::sqrt(h);
    for (Eigen::Index i = 0; i < dw.size(); ++i) first[i] = 0.5 * dw[i] + bridge_sd * rng.normal();
    const Vec second = dw - first;
    advance(v, first, 0.5 * h, rng, depth + 1, rejections);
    advance(v, second, 0.5 * h, rng, depth + 1, rejections);
  }

 private:
  bool try_step(const Vec& v, const Vec& dw, double h) {
    const double projected = v.dot(dw) / energy_;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double drift = delta_ * (half_d_minus_1_ / v[k] - half_nd_minus_1_ * v[k] / energy_);
      trial_[k] = v[k] + drift * h + root_delta_ * (dw[k] - v[k] * projected);
      if (!(trial_[k] > 0.0)) return false;
    }
    if (trial_.size() == 1) {
      // The constraint set {v > 0, v^2 = U} is a single point.
      trial_[0] = std::sqrt(energy_);
    } else {
      geom::project_to_sphere_inplace(trial_, energy_);
    }
    return true;
  }

  double energy_, delta_, root_delta_, half_d_minus_1_, half_nd_minus_1_;
  Vec trial_;
};

}  // namespace

PathSample ito_speed_solve(const SdeConfig& cfg, RngStream& rng) {
  require(cfg.model == SdeModel::ito_speed, ErrorKind::unsupported_model,
          "config is not an ito-speed model");
  cfg.validate();
  PathSample out = make_sample(cfg, rng);
  Vec v = cfg.initial_state();
  if (v.size() == 1) {
    v[0] = std::sqrt(cfg.total_energy);
  } else {
    geom::project_to_sphere_inplace(v, cfg.total_energy);
  }
  const std::size_t steps = cfg.step_count();
  const double h = cfg.effective_step();
  const double sd = std::sqrt(h);
  SpeedStepper stepper(cfg);
  Vec dw(v.size());
  record(out, 0.0, v);
  for (std::size_t s = 1; s <= steps; ++s) {
    for (Eigen::Index i = 0; i < dw.size(); ++i) dw[i] = sd * rng.normal();
    stepper.advance(v, dw, h, rng, 0, out.rejections);
    if (should_record(cfg, s, steps)) record(out, static_cast<double>(s) * h, v);
  }
  return out;
}

double ou_exact_step(double x, double h, RngStream& rng) {
  require(h > 0.0, ErrorKind::invalid_parameter, "OU step must be positive");
  return std::exp(-0.5 * h) * x + std::sqrt(-std::expm1(-h)) * rng.normal();
}

PathSample ou_solve(const SdeConfig& cfg, RngStream& rng) {
  require(cfg.model == SdeModel::ou, ErrorKind::unsupported_model, "config is not an ou model");
  cfg.validate();
  PathSample out = make_sample(cfg, rng);
  Vec x = cfg.initial_state();
  const std::size_t steps = cfg.step_count();
  const double h = cfg.effective_step();
  record(out, 0.0, x);
  for (std::size_t s = 1; s <= steps; ++s) {
    x[0] = ou_exact_step(x[0], h, rng);
    if (should_record(cfg, s, steps)) record(out, static_cast<double>(s) * h, x);
  }
  return out;
}

Vec block_norms(const Eigen::Ref<const Vec>& u, int dim) {
  require(dim >= 1 && u.size() % dim == 0, ErrorKind::invalid_dimension,
          "state length must be a multiple of the block dimension");
  const auto n = u.size() / dim;
  Vec out(n);
  for (Eigen::Index k = 0; k < n; ++k) out[k] = u.segment(k * dim, dim).norm();
  return out;
}

OuProjectionReport ou_projection_experiment(int n, double t_final, std::size_t paths,
                                            std::uint64_t seed, double step, Execution exec) {
  require(n >= 2, ErrorKind::invalid_parameter, "projection study needs n >= 2");
  require(t_final > 0.0 && step > 0.0, ErrorKind::invalid_parameter,
          "t_final and step must be positive");
  require(paths >= 2, ErrorKind::insufficient_data, "projection study needs at least two paths");

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_final / step - 1e-9)));
  const double h = t_final / static_cast<double>(steps);
  const double decay = std::exp(-0.5 * h);
  // (dW_1, int e^{-(h-s)/2} dW_1(s)) is jointly Gaussian.
  const double cov = 2.0 * (1.0 - decay);
  const double ou_var = -std::expm1(-h);
  const double loading = cov / h;
  const double residual_sd = std::sqrt(std::max(0.0, ou_var - loading * cov));
  const double root_h = std::sqrt(h);

  // With X(0) = 1, E X(t) X(t + s) = e^{-s/2} for every t.
  const double lag_time = std::min(1.0, t_final);
  const auto lag_steps = static_cast<std::size_t>(std::llround(lag_time / h));
  struct PathResult {
    double u1_final, u1_lagged, sup_dev;
  };
  auto coupled = generate_ensemble(
      paths, seed, 0,
      [&](RngStream& rng, std::size_t) {
        Vec u = Vec::Ones(n);
        double x = 1.0;
        double sup_dev = 0.0;
        double lagged = 1.0;
        StratSphereStepper stepper(n, static_cast<double>(n));
        Vec dw(n);
        for (std::size_t s = 0; s < steps; ++s) {
          for (int i = 0; i < n; ++i) dw[i] = root_h * rng.normal();
          const double ou_noise = loading * dw[0] + residual_sd * rng.normal();
          stepper.step(u, dw);
          x = decay * x + ou_noise;
          sup_dev = std::max(sup_dev, std::abs(u[0] - x));
          if (s + 1 + lag_steps == steps) lagged = u[0];
        }
        return PathResult{u[0], lagged, sup_dev};
      },
      exec);

  auto independent = generate_ensemble(
      paths, seed, 1, [&](RngStream& rng, std::size_t) { return ou_exact_step(1.0, t_final, rng); },
      exec);

  OuProjectionReport report;
  report.n = n;
  report.t_final = t_final;
  report.step = h;
  report.paths = paths;
  std::vector<double> u1(paths);
  stats::MomentAccumulator dev, sq, ac;
  for (std::size_t i = 0; i < paths; ++i) {
    u1[i] = coupled[i].u1_final;
    dev.add(coupled[i].sup_dev);
    sq.add(u1[i] * u1[i]);
    ac.add(coupled[i].u1_lagged * u1[i]);
  }
  const auto ks = stats::ks_two_sample(u1, independent);
  report.ks_statistic = ks.statistic;
  report.ks_critical_05 = ks.critical_05;
  report.ks_critical_01 = ks.critical_01;
  report.mean_sup_deviation = dev.mean();
  report.sup_deviation_se = dev.std_error();
  report.mean_u1_squared = sq.mean();
  report.u1_squared_se = sq.std_error();
  report.autocov_lag = ac.mean();
  report.autocov_se = ac.std_error();
  report.autocov_lag_time = static_cast<double>(lag_steps) * h;
  report.autocov_target = std::exp(-0.5 * report.autocov_lag_time);
  return report;
}

}  // namespace thermolab::sde
