#include "thermolab/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermolab/error.hpp"

namespace thermolab::micro {

namespace {

struct Rk4Workspace {
  explicit Rk4Workspace(Eigen::Index n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
  Vec k1, k2, k3, k4, tmp;
};

void rk4_advance(Vec& p, double dt, const ModelParams& params, const Vec& n_hat, Rk4Workspace& ws) {
  const double eps = params.field_strength;
  const double energy = params.total_energy;
  if (dt <= 0.0) return;
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / params.ode_step - 1e-12)));
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    thermostat_rhs_into(p, eps, n_hat, energy, ws.k1);
    ws.tmp = p + 0.5 * h * ws.k1;
    thermostat_rhs_into(ws.tmp, eps, n_hat, energy, ws.k2);
    ws.tmp = p + 0.5 * h * ws.k2;
    thermostat_rhs_into(ws.tmp, eps, n_hat, energy, ws.k3);
    ws.tmp = p + h * ws.k3;
    thermostat_rhs_into(ws.tmp, eps, n_hat, energy, ws.k4);
    p += (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
  }
  geom::project_to_sphere_inplace(p, energy);
}

Vec stacked_slope_block(const geom::Rotation& frame, const Vec& n_hat) {
  return frame.matrix().transpose() * n_hat;
}

void check_events(const ModelParams& params, const std::vector<CollisionEvent>& events) {
  double last = 0.0;
  for (const auto& ev : events) {
    require(ev.particle >= 0 && ev.particle < params.n_particles, ErrorKind::index_out_of_range,
            "collision particle index out of range");
    require(ev.rotation.dim() == params.dim, ErrorKind::invalid_dimension,
            "collision rotation has wrong dimension");
    require(ev.time >= last && ev.time <= params.t_final, ErrorKind::invalid_parameter,
            "collision schedule must be sorted within [0, t_final]");
    last = ev.time;
  }
}

}  // namespace

void ModelParams::validate() const {
  require(n_particles >= 1, ErrorKind::invalid_parameter, "n_particles must be >= 1");
  require(dim >= 1, ErrorKind::invalid_dimension, "dim must be >= 1");
  require(collision_rate > 0.0, ErrorKind::invalid_parameter, "collision rate must be positive");
  require(field_strength >= 0.0, ErrorKind::invalid_parameter, "field strength must be >= 0");
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
  require(t_final > 0.0, ErrorKind::invalid_parameter, "t_final must be positive");
  require(ode_step > 0.0, ErrorKind::invalid_parameter, "ode_step must be positive");
  require(grid_points >= 2, ErrorKind::invalid_parameter, "grid_points must be >= 2");
  if (field_direction.size() != 0) {
    require(field_direction.size() == dim, ErrorKind::invalid_dimension,
            "field direction has wrong dimension");
    require(std::abs(field_direction.norm() - 1.0) <= 1e-14, ErrorKind::invalid_parameter,
            "field direction must be a unit vector");
  }
  if (initial_p) {
    geom::EnergySphereSpec sphere{n_particles, dim, total_energy};
    require(sphere.validates(*initial_p), ErrorKind::invalid_initial_condition,
            "initial velocities must lie on the energy sphere");
  }
}

Vec ModelParams::unit_field() const {
  if (field_direction.size() != 0) return field_direction;
  return Vec::Unit(dim, 0);
}

Vec ModelParams::initial_state() const {
  if (initial_p) return geom::project_to_sphere(*initial_p, total_energy);
  Vec p(state_dim());
  const Vec n_hat = unit_field();
  const double speed = std::sqrt(total_energy / n_particles);
  for (int k = 0; k < n_particles; ++k) p.segment(k * dim, dim) = speed * n_hat;
  return p;
}

std::vector<double> ModelParams::output_grid() const {
  std::vector<double> grid(grid_points);
  const int last = grid_points - 1;
  for (int i = 0; i <= last; ++i) grid[i] = t_final * static_cast<double>(i) / last;
  grid.back() = t_final;
  return grid;
}

std::vector<CollisionEvent> sample_collision_schedule(const ModelParams& params, RngStream& rng) {
  require(params.collision_rate > 0.0, ErrorKind::invalid_parameter,
          "collision rate must be positive");
  std::vector<CollisionEvent> events;
  if (params.t_final <= 0.0) return events;
  for (int k = 0; k < params.n_particles; ++k) {
    double t = rng.exponential(params.collision_rate);
    while (t <= params.t_final) {
      events.push_back(CollisionEvent{t, k, geom::sample_haar_rotation(params.dim, rng)});
      t += rng.exponential(params.collision_rate);
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const CollisionEvent& a, const CollisionEvent& b) { return a.time < b.time; });
  return events;
}

void thermostat_rhs_into(const Eigen::Ref<const Vec>& p, double field_strength, const Vec& n_hat,
                         double total_energy, Eigen::Ref<Vec> out) {
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
  const auto d = n_hat.size();
  const auto n = p.size() / d;
  double current = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) current += n_hat.dot(p.segment(k * d, d));
  const double friction = field_strength * current / total_energy;
  for (Eigen::Index k = 0; k < n; ++k)
    out.segment(k * d, d) = field_strength * n_hat - friction * p.segment(k * d, d);
}

Vec thermostat_rhs(const Vec& p, double field_strength, const Vec& n_hat, double total_energy) {
  require(n_hat.size() >= 1 && p.size() % n_hat.size() == 0, ErrorKind::invalid_dimension,
          "state length must be a multiple of the field dimension");
  Vec out(p.size());
  thermostat_rhs_into(p, field_strength, n_hat, total_energy, out);
  return out;
}

ParticleSystemState step_between_collisions(const ParticleSystemState& state, double dt,
                                            const ModelParams& params) {
  require(dt > 0.0, ErrorKind::invalid_parameter, "step length must be positive");
  ParticleSystemState next{state.time + dt, state.p};
  Rk4Workspace ws(next.p.size());
  rk4_advance(next.p, dt, params, params.unit_field(), ws);
  return next;
}

ParticleSystemState apply_collision(const ParticleSystemState& state, const CollisionEvent& event,
                                    int dim) {
  const auto n = state.p.size() / dim;
  require(event.particle >= 0 && event.particle < n, ErrorKind::index_out_of_range,
          "collision particle " + std::to_string(event.particle) + " out of range");
  require(event.rotation.dim() == dim, ErrorKind::invalid_dimension,
          "rotation dimension does not match the particle dimension");
  ParticleSystemState next = state;
  auto block = next.p.segment(event.particle * dim, dim);
  block = (event.rotation.matrix() * block).eval();
  return next;
}

FrameProcess::FrameProcess(int n_particles, int dim)
    : dim_(dim), breakpoints_(n_particles), frames_(n_particles) {
  for (auto& f : frames_) f.push_back(geom::Rotation::identity(dim));
}

void FrameProcess::record(const CollisionEvent& event) {
  auto& bp = breakpoints_.at(event.particle);
  require(bp.empty() || event.time > bp.back(), ErrorKind::invalid_parameter,
          "collision times must increase per particle");
  bp.push_back(event.time);
  auto& f = frames_[event.particle];
  f.push_back(event.rotation * f.back());
}

const geom::Rotation& FrameProcess::at(int particle, double t) const {
  const auto& bp = breakpoints_.at(particle);
  const auto n = std::upper_bound(bp.begin(), bp.end(), t) - bp.begin();
  return frames_[particle][n];
}

FrameProcess FrameProcess::from_events(int n_particles, int dim,
                                       const std::vector<CollisionEvent>& events) {
  FrameProcess frames(n_particles, dim);
  for (const auto& ev : events) frames.record(ev);
  return frames;
}

Vec slow_variable(const Vec& p, const FrameProcess& frames, double t) {
  const int d = frames.dim();
  Vec u(p.size());
  for (int k = 0; k < frames.n_particles(); ++k)
    u.segment(k * d, d) = frames.at(k, t).matrix().transpose() * p.segment(k * d, d);
  return u;
}

namespace {

Vec current_slow_variable(const Vec& p, const FrameProcess& frames) {
  const int d = frames.dim();
  Vec u(p.size());
  for (int k = 0; k < frames.n_particles(); ++k)
    u.segment(k * d, d) = frames.current(k).matrix().transpose() * p.segment(k * d, d);
  return u;
}

}  // namespace

Trajectory simulate_trajectory(const ModelParams& params, std::vector<CollisionEvent> events) {
  params.validate();
  check_events(params, events);
  const int d = params.dim;
  const int m = params.state_dim();
  const Vec n_hat = params.unit_field();
  const auto grid = params.output_grid();

  Trajectory traj{{}, {}, {}, PiecewiseLinearPath(m, 0.0, Vec::Zero(m)), {},
                  FrameProcess(params.n_particles, d)};
  ParticleSystemState state{0.0, params.initial_state()};
  Vec slope(m);
  for (int k = 0; k < params.n_particles; ++k) slope.segment(k * d, d) = n_hat;

  Rk4Workspace ws(m);
  auto advance_to = [&](double t) {
    if (t <= state.time) return;
    rk4_advance(state.p, t - state.time, params, n_hat, ws);
    state.time = t;
    const double rel = std::abs(state.p.squaredNorm() - params.total_energy) / params.total_energy;
    if (rel > traj.max_energy_error) traj.max_energy_error = rel;
    traj.driver.append(t, slope);
  };
  auto record = [&] {
    traj.times.push_back(state.time);
    traj.p.push_back(state.p);
    traj.u.push_back(current_slow_variable(state.p, traj.frames));
  };

  record();
  std::size_t next = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const double tg = grid[gi];
    while (next < events.size() && events[next].time <= tg) {
      const auto& ev = events[next];
      advance_to(ev.time);
      const int k = ev.particle;
      Vec before = traj.frames.current(k).matrix().transpose() * state.p.segment(k * d, d);
      state = apply_collision(state, ev, d);
      traj.frames.record(ev);
      Vec after = traj.frames.current(k).matrix().transpose() * state.p.segment(k * d, d);
      traj.max_u_jump = std::max(traj.max_u_jump, (after - before).norm());
      slope.segment(k * d, d) = stacked_slope_block(traj.frames.current(k), n_hat);
      ++next;
    }
    advance_to(tg);
    record();
  }
  traj.events = std::move(events);
  return traj;
}

Trajectory simulate_trajectory(const ModelParams& params, RngStream& rng) {
  params.validate();
  Trajectory traj = simulate_trajectory(params, sample_collision_schedule(params, rng));
  traj.seed = rng.seed();
  traj.stream_index = rng.stream_index();
  return traj;
}

PiecewiseLinearPath build_driver(const ModelParams& params,
                                 const std::vector<CollisionEvent>& events) {
  params.validate();
  check_events(params, events);
  const int d = params.dim;
  const int m = params.state_dim();
  const Vec n_hat = params.unit_field();
  const auto grid = params.output_grid();

  PiecewiseLinearPath driver(m, 0.0, Vec::Zero(m));
  std::vector<Mat> frames(params.n_particles, Mat::Identity(d, d));
  Vec slope(m);
  for (int k = 0; k < params.n_particles; ++k) slope.segment(k * d, d) = n_hat;

  std::size_t next = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const double tg = grid[gi];
    while (next < events.size() && events[next].time <= tg) {
      const auto& ev = events[next];
      driver.append(ev.time, slope);
      Mat& f = frames[ev.particle];
      f = (ev.rotation.matrix() * f).eval();
      slope.segment(ev.particle * d, d) = f.transpose() * n_hat;
      ++next;
    }
    driver.append(tg, slope);
  }
  return driver;
}

PiecewiseLinearPath simulate_driver(const ModelParams& params, RngStream& rng) {
  params.validate();
  return build_driver(params, sample_collision_schedule(params, rng));
}

PiecewiseLinearPath rescale_driver(const PiecewiseLinearPath& driver, double epsilon,
                                   std::optional<double> horizon) {
  require(epsilon > 0.0, ErrorKind::invalid_parameter, "epsilon must be positive");
  const double scale = epsilon * epsilon;
  PiecewiseLinearPath out = driver.rescaled(scale, epsilon);
  if (!horizon) return out;
  require(*horizon >= 0.0, ErrorKind::invalid_parameter, "horizon must be >= 0");
  require(*horizon <= out.end_time() * (1.0 + 1e-12), ErrorKind::insufficient_data,
          "requested horizon exceeds the simulated horizon");
  return out.truncated(std::min(*horizon, out.end_time()));
}

}  // namespace thermolab::micro
