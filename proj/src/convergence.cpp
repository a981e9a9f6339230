#include "thermolab/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "thermolab/error.hpp"
#include "thermolab/rough_lift.hpp"
#include "thermolab/sde_limit.hpp"

namespace thermolab::convergence {

namespace {

constexpr std::uint64_t kItoFamily = 1;
constexpr std::uint64_t kSphereFamily = 2;
constexpr std::uint64_t kMicroFamilyBase = 16;

// Observations at each time: speeds (N values) followed by u-norms (N values).
using Observation = std::vector<double>;

std::vector<double> column(const std::vector<Observation>& obs, std::size_t index) {
  std::vector<double> out;
  out.reserve(obs.size());
  for (const auto& o : obs) out.push_back(o[index]);
  return out;
}

}  // namespace

void WeakConvergenceConfig::validate() const {
  params.validate();
  require(params.dim >= 2, ErrorKind::unsupported_model, "the speed SDE needs d >= 2");
  require(!epsilons.empty(), ErrorKind::invalid_parameter, "epsilon schedule is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0, ErrorKind::invalid_parameter, "epsilons must be positive");
    if (i > 0)
      require(epsilons[i] < epsilons[i - 1], ErrorKind::invalid_parameter,
              "epsilon schedule must be strictly decreasing");
  }
  require(!times.empty(), ErrorKind::invalid_parameter, "observation time list is empty");
  for (double t : times) require(t > 0.0, ErrorKind::invalid_parameter, "times must be positive");
  require(paths >= stats::kKsMinSamples, ErrorKind::insufficient_data,
          "need at least 50 paths for KS comparisons");
  require(sde_step > 0.0, ErrorKind::invalid_parameter, "sde_step must be positive");
  require(grid_intervals >= 1, ErrorKind::invalid_parameter, "grid_intervals must be >= 1");
}

std::vector<double> WeakConvergenceReport::ks_series(const std::string& observable, int particle,
                                                     std::size_t time_index) const {
  std::vector<double> out;
  const double t = observed_times.at(time_index);
  for (const auto& r : results) {
    if (!r.simulated) continue;
    for (const auto& c : r.comparisons)
      if (c.observable == observable && c.particle == particle && c.time == t)
        out.push_back(c.ks.statistic);
  }
  return out;
}

bool WeakConvergenceReport::strictly_decreasing(const std::string& observable, int particle,
                                                std::size_t time_index) const {
  const auto s = ks_series(observable, particle, time_index);
  if (s.size() < 2) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] < s[i - 1])) return false;
  return true;
}

bool WeakConvergenceReport::final_passes(const std::string& observable, int particle,
                                         std::size_t time_index) const {
  const double t = observed_times.at(time_index);
  for (auto it = results.rbegin(); it != results.rend(); ++it) {
    if (!it->simulated) continue;
    for (const auto& c : it->comparisons)
      if (c.observable == observable && c.particle == particle && c.time == t)
        return !c.ks.reject_05();
    return false;
  }
  return false;
}

WeakConvergenceReport weak_convergence_study(const WeakConvergenceConfig& cfg, Execution exec) {
  cfg.validate();
  const int n = cfg.params.n_particles;
  const int d = cfg.params.dim;
  const double t_max = *std::max_element(cfg.times.begin(), cfg.times.end());

  WeakConvergenceReport report;
  report.config = cfg;

  // Observation times snapped to the micro output grid on [0, t_max].
  std::vector<int> grid_index;
  for (double t : cfg.times) {
    const int i = static_cast<int>(std::llround(t / t_max * cfg.grid_intervals));
    grid_index.push_back(i);
    report.observed_times.push_back(t_max * i / cfg.grid_intervals);
  }

  const Vec p0 = cfg.params.initial_state();
  sde::SdeConfig ito;
  ito.model = sde::SdeModel::ito_speed;
  ito.n_particles = n;
  ito.dim = d;
  ito.collision_rate = cfg.params.collision_rate;
  ito.total_energy = cfg.params.total_energy;
  ito.step = cfg.sde_step;
  ito.t_final = t_max;
  ito.initial = sde::block_norms(p0, d);
  ito.validate();
  sde::SdeConfig sphere = ito;
  sphere.model = sde::SdeModel::strat_sphere;
  sphere.initial = p0;
  sphere.validate();
  const double h = ito.effective_step();
  std::vector<std::size_t> sde_index;
  for (double t : report.observed_times)
    sde_index.push_back(static_cast<std::size_t>(std::llround(t / h)));

  struct ReferencePath {
    std::vector<double> values;  // per time: N speeds
    std::size_t rejections;
  };
  const auto ito_paths = generate_ensemble(
      cfg.paths, cfg.seed, kItoFamily,
      [&](RngStream& rng, std::size_t) {
        const auto path = sde::ito_speed_solve(ito, rng);
        ReferencePath r{{}, path.rejections};
        for (std::size_t idx : sde_index) {
          const auto v = path.at(idx);
          r.values.insert(r.values.end(), v.data(), v.data() + n);
        }
        return r;
      },
      exec);
  const auto sphere_paths = generate_ensemble(
      cfg.paths, cfg.seed, kSphereFamily,
      [&](RngStream& rng, std::size_t) {
        const auto path = sde::strat_sphere_solve(sphere, rng);
        std::vector<double> out;
        for (std::size_t idx : sde_index) {
          const Vec norms = sde::block_norms(path.at(idx), d);
          out.insert(out.end(), norms.data(), norms.data() + n);
        }
        return out;
      },
      exec);
  for (const auto& r : ito_paths) report.reference_rejections += r.rejections;

  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e];
    EpsilonResult res;
    res.epsilon = eps;
    res.micro_horizon = t_max / (eps * eps);
    if (res.micro_horizon > cfg.max_micro_horizon) {
      res.omission = "micro horizon exceeds max_micro_horizon";
      report.results.push_back(std::move(res));
      continue;
    }
    micro::ModelParams params = cfg.params;
    params.field_strength = eps;
    params.t_final = res.micro_horizon;
    params.grid_points = cfg.grid_intervals + 1;

    struct MicroPath {
      std::vector<Observation> obs;
      double energy_error;
      double identity_error;
    };
    const auto micro_paths = generate_ensemble(
        cfg.paths, cfg.seed, kMicroFamilyBase + e,
        [&](RngStream& rng, std::size_t) {
          const auto traj = micro::simulate_trajectory(params, rng);
          MicroPath m{{}, traj.max_energy_error, 0.0};
          for (int gi : grid_index) {
            const Vec speeds = sde::block_norms(traj.p[gi], d);
            const Vec unorms = sde::block_norms(traj.u[gi], d);
            m.identity_error =
                std::max(m.identity_error, (speeds - unorms).lpNorm<Eigen::Infinity>());
            Observation o(speeds.data(), speeds.data() + n);
            o.insert(o.end(), unorms.data(), unorms.data() + n);
            m.obs.push_back(std::move(o));
          }
          return m;
        },
        exec);
    res.simulated = true;
    for (const auto& m : micro_paths) {
      res.max_energy_error = std::max(res.max_energy_error, m.energy_error);
      res.max_speed_identity_error = std::max(res.max_speed_identity_error, m.identity_error);
    }

    for (std::size_t ti = 0; ti < report.observed_times.size(); ++ti) {
      std::vector<Observation> at_t;
      at_t.reserve(micro_paths.size());
      for (const auto& m : micro_paths) at_t.push_back(m.obs[ti]);
      for (int k = 0; k < n; ++k) {
        std::vector<double> ref_v, ref_u;
        for (const auto& r : ito_paths) ref_v.push_back(r.values[ti * n + k]);
        for (const auto& r : sphere_paths) ref_u.push_back(r[ti * n + k]);
        const auto micro_v = column(at_t, k);
        const auto micro_u = column(at_t, n + k);
        res.comparisons.push_back({"v", k, report.observed_times[ti],
                                   stats::ks_two_sample(micro_v, ref_v),
                                   stats::raw_moments(micro_v), stats::raw_moments(ref_v)});
        res.comparisons.push_back({"u-norm", k, report.observed_times[ti],
                                   stats::ks_two_sample(micro_u, ref_u),
                                   stats::raw_moments(micro_u), stats::raw_moments(ref_u)});
      }
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

std::vector<double> MomentScalingConfig::default_gaps() {
  std::vector<double> g;
  for (int k = 0; k <= 7; ++k) g.push_back(0.1 * std::ldexp(1.0, k));
  return g;
}

MomentScalingReport moment_scaling_study(const MomentScalingConfig& cfg, Execution exec) {
  require(cfg.epsilon > 0.0, ErrorKind::invalid_parameter, "epsilon must be positive");
  require(cfg.paths >= 1, ErrorKind::insufficient_data, "need at least one path");
  const std::vector<double> gaps = cfg.gaps.empty() ? MomentScalingConfig::default_gaps() : cfg.gaps;
  const double base = *std::min_element(gaps.begin(), gaps.end());
  const double largest = *std::max_element(gaps.begin(), gaps.end());
  require(base > 0.0, ErrorKind::invalid_parameter, "gaps must be positive");
  std::vector<std::size_t> gap_steps;
  for (double g : gaps) {
    const double ratio = g / base;
    require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, ErrorKind::grid_mismatch,
            "gaps must be integer multiples of the smallest gap");
    gap_steps.push_back(static_cast<std::size_t>(std::llround(ratio)));
  }
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : 2.0 * largest;
  require(horizon >= largest, ErrorKind::invalid_parameter, "horizon shorter than the largest gap");
  const auto intervals = static_cast<std::size_t>(std::floor(horizon / base + 1e-9));
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) grid[i] = base * static_cast<double>(i);

  micro::ModelParams params = cfg.params;
  params.field_strength = cfg.epsilon;
  params.t_final = horizon / (cfg.epsilon * cfg.epsilon);
  params.grid_points = 2;
  params.validate();

  struct PathIncrements {
    std::vector<std::vector<double>> level1, level2;
  };
  const auto per_path = generate_ensemble(
      cfg.paths, cfg.seed, 0,
      [&](RngStream& rng, std::size_t) {
        const auto driver = micro::simulate_driver(params, rng);
        const auto w = micro::rescale_driver(driver, cfg.epsilon, horizon);
        const auto lift = rough::canonical_lift(w, grid);
        PathIncrements out;
        out.level1.resize(gap_steps.size());
        out.level2.resize(gap_steps.size());
        for (std::size_t g = 0; g < gap_steps.size(); ++g) {
          const std::size_t L = gap_steps[g];
          const std::size_t stride = std::max<std::size_t>(1, L / 4);
          for (std::size_t i = 0; i + L <= intervals; i += stride) {
            out.level1[g].push_back(lift.increment(i, i + L).norm());
            out.level2[g].push_back(lift.level2(i, i + L).norm());
          }
        }
        return out;
      },
      exec);

  std::vector<std::vector<double>> level1(gaps.size()), level2(gaps.size());
  for (const auto& p : per_path) {
    for (std::size_t g = 0; g < gaps.size(); ++g) {
      level1[g].insert(level1[g].end(), p.level1[g].begin(), p.level1[g].end());
      level2[g].insert(level2[g].end(), p.level2[g].begin(), p.level2[g].end());
    }
  }
  MomentScalingReport rep;
  rep.epsilon = cfg.epsilon;
  rep.horizon = horizon;
  rep.paths = cfg.paths;
  rep.level1 = stats::moment_scaling_fit(gaps, level1, cfg.q, 1);
  rep.level2 = stats::moment_scaling_fit(gaps, level2, cfg.q, 2);
  return rep;
}

}  // namespace thermolab::convergence
