#include "thermolab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "thermolab/convergence.hpp"
#include "thermolab/error.hpp"
#include "thermolab/micro_sim.hpp"
#include "thermolab/rough_lift.hpp"
#include "thermolab/sde_limit.hpp"
#include "thermolab/targets.hpp"

namespace thermolab::experiments {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  explicit Timer(Verdict& v) : v_(v), start_(Clock::now()) {}
  ~Timer() { v_.seconds = std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Verdict& v_;
  Clock::time_point start_;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

micro::ModelParams model(const Options& opt) {
  micro::ModelParams p;
  p.n_particles = opt.n_particles;
  p.dim = opt.dim;
  p.collision_rate = opt.lambda;
  p.total_energy = opt.energy;
  return p;
}

sde::SdeConfig sde_config(sde::SdeModel m, int n, int d, double lambda, double energy, double t,
                          double step) {
  sde::SdeConfig c;
  c.model = m;
  c.n_particles = n;
  c.dim = d;
  c.collision_rate = lambda;
  c.total_energy = energy;
  c.t_final = t;
  c.step = step;
  c.record_every = std::numeric_limits<int>::max();
  return c;
}

Verdict make_verdict(std::string id, std::string title) {
  Verdict v;
  v.id = std::move(id);
  v.title = std::move(title);
  return v;
}

constexpr double kClosedFormHorizon = 40.0;
constexpr int kGreenKuboKmax = 15;

}  // namespace

Check within_se(std::string name, double estimate, double target, double se, double n_se) {
  Check c{std::move(name), false, estimate, target, se, n_se * se, {}};
  c.pass = std::abs(estimate - target) <= c.tolerance;
  c.detail = fmt(estimate) + " vs " + fmt(target) + " +- " + fmt(n_se) + " x " + fmt(se);
  return c;
}

Check within_abs(std::string name, double value, double target, double tol) {
  Check c{std::move(name), std::abs(value - target) <= tol, value, target, 0.0, tol, {}};
  c.detail = "|" + fmt(value) + " - " + fmt(target) + "| <= " + fmt(tol);
  return c;
}

Check at_most(std::string name, double value, double bound) {
  Check c{std::move(name), value <= bound, value, bound, 0.0, 0.0, {}};
  c.detail = fmt(value) + " <= " + fmt(bound);
  return c;
}

Check in_range(std::string name, double value, double lo, double hi) {
  Check c{std::move(name), value >= lo && value <= hi, value, 0.5 * (lo + hi), 0.0, 0.5 * (hi - lo),
          {}};
  c.detail = fmt(value) + " in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return c;
}

Check is_true(std::string name, bool value, std::string detail) {
  Check c{std::move(name), value, value ? 1.0 : 0.0, 1.0, 0.0, 0.0, std::move(detail)};
  return c;
}

bool Verdict::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Verdict::add_estimate(const std::string& name, const stats::CorrelationEstimate& e,
                           bool off_diagonal, double n_se) {
  if (e.low_power) warnings.push_back(name + ": fewer than 100 samples (low power)");
  for (Eigen::Index i = 0; i < e.estimate.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.estimate.cols(); ++j) {
      const bool diag = i == j || e.estimate.cols() == 1;
      if (!diag && !off_diagonal) continue;
      add(within_se(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]",
                    e.estimate(i, j), e.target(i, j), e.std_error(i, j), n_se));
    }
  }
}

io::json Verdict::to_json() const {
  io::json cs = io::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name},
                  {"pass", c.pass},
                  {"estimate", c.estimate},
                  {"target", c.target},
                  {"std_error", c.std_error},
                  {"tolerance", c.tolerance},
                  {"detail", c.detail}});
  return {{"id", id},         {"title", title},     {"pass", passed()}, {"seconds", seconds},
          {"checks", cs},     {"warnings", warnings}, {"details", details}};
}

std::string Verdict::summary_line() const {
  const auto ok = std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%zu/%zu checks, %.1f s)", static_cast<std::size_t>(ok),
                checks.size(), seconds);
  return std::string(passed() ? "[PASS] " : "[FAIL] ") + id + " " + title + buf;
}

stationary::StationaryDriverEnsemble closed_form_ensemble(const Options& opt, double horizon,
                                                          stationary::StartMode mode) {
  return stationary::simulate_stationary_psi(model(opt), horizon, opt.paths, opt.seed, mode,
                                             std::nullopt, 0.05, opt.exec);
}

void autocov_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens) {
  const auto est = stationary::autocov_psi(ens, {0.0, 1.0});
  v.add_estimate("autocov lag 0", est[0], true);
  v.add_estimate("autocov lag 1", est[1]);
  v.details["autocov"] = {io::to_json(est[0]), io::to_json(est[1])};
}

void vcorr_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens) {
  const auto est = stationary::v_correlations(ens, 1);
  v.add_estimate("V corr k=0", est[0], true);
  v.add_estimate("V corr k=1", est[1], true);
  v.details["vcorr"] = {io::to_json(est[0]), io::to_json(est[1])};
}

void greenkubo_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens, int k_max) {
  const auto gk = stationary::green_kubo_constants(ens, k_max);
  v.add_estimate("sigma_tilde", gk.sigma_tilde, true);
  v.add_estimate("E_tilde", gk.e_tilde);
  v.add_estimate("E", gk.e_const);
  // The diagonal of E - sigma_tilde/2 vanishes per trajectory up to rounding
  // (int H_i psi_i = V_i^2 / 2), so its own s.e. is meaningless there; both
  // cancellations are judged against the combined s.e. of the two estimates.
  const auto n = gk.e_const.estimate.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::string idx = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
      const double se_e = gk.e_const.std_error(i, j);
      const double se_s = 0.5 * gk.sigma_tilde.std_error(i, j);
      v.add(within_se("E - sigma_tilde/2" + idx, gk.strat_defect.estimate(i, j), 0.0,
                      std::hypot(se_e, se_s)));
      if (i == j) {
        v.add(within_se("E - E_tilde - h closed form" + idx,
                        gk.e_const.estimate(i, j) - gk.e_tilde.estimate(i, j),
                        gk.h_correction.target(i, j),
                        std::hypot(se_e, gk.e_tilde.std_error(i, j))));
      }
    }
  }
  // Estimator identity sigma = C(0) + E_tilde + E_tilde^T, independent of the data.
  const Mat identity_gap =
      gk.sigma_tilde.estimate - gk.c0.estimate - gk.e_tilde.estimate - gk.e_tilde.estimate.transpose();
  v.add(at_most("sigma_tilde = C(0) + E_tilde + E_tilde^T",
                identity_gap.lpNorm<Eigen::Infinity>(), 1e-12));
  if (gk.tail_warning)
    v.warnings.push_back("Green-Kubo truncation tail " + fmt(gk.tail_bound) +
                         " exceeds 10% of the sigma_tilde standard error");
  v.details["greenkubo"] = {{"k_max", gk.k_max},
                            {"tail_bound", gk.tail_bound},
                            {"tail_estimate", gk.tail_estimate},
                            {"sigma_tilde", io::to_json(gk.sigma_tilde)},
                            {"e_tilde", io::to_json(gk.e_tilde)},
                            {"h_correction", io::to_json(gk.h_correction)},
                            {"e_const", io::to_json(gk.e_const)},
                            {"strat_defect", io::to_json(gk.strat_defect)}};
}

Verdict verify_autocov(const Options& opt) {
  Verdict v = make_verdict("autocov", "psi autocovariance");
  Timer timer(v);
  const auto ens = closed_form_ensemble(opt, 2.0, stationary::StartMode::haar);
  autocov_checks(v, ens);
  return v;
}

Verdict verify_vcorr(const Options& opt) {
  Verdict v = make_verdict("vcorr", "unit-window V correlations");
  Timer timer(v);
  const auto ens = closed_form_ensemble(opt, kClosedFormHorizon, stationary::StartMode::haar);
  vcorr_checks(v, ens);
  return v;
}

Verdict verify_greenkubo(const Options& opt, int k_max) {
  Verdict v = make_verdict("greenkubo", "Green-Kubo constants");
  Timer timer(v);
  const auto ens = closed_form_ensemble(opt, std::max(kClosedFormHorizon, k_max + 1.0),
                                        stationary::StartMode::haar);
  greenkubo_checks(v, ens, k_max);
  return v;
}

Verdict verify_momentfit(const Options& opt, const std::vector<double>& epsilons, double q) {
  Verdict v = make_verdict("momentfit", "moment-bound scaling");
  Timer timer(v);
  require(!epsilons.empty(), ErrorKind::invalid_parameter, "need at least one epsilon");
  std::vector<convergence::MomentScalingReport> reports;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    convergence::MomentScalingConfig cfg;
    cfg.params = model(opt);
    cfg.epsilon = epsilons[i];
    cfg.q = q;
    cfg.paths = opt.paths;
    cfg.seed = opt.seed + i;
    reports.push_back(convergence::moment_scaling_study(cfg, opt.exec));
    const auto& r = reports.back();
    const std::string tag = " eps=" + fmt(r.epsilon);
    v.add(in_range("level-1 slope" + tag, r.level1.slope, 0.45, 0.55));
    v.add(in_range("level-2 slope" + tag, r.level2.slope, 0.9, 1.1));
    v.details["fits"].push_back({{"epsilon", r.epsilon},
                                 {"horizon", r.horizon},
                                 {"paths", r.paths},
                                 {"level1", io::to_json(r.level1)},
                                 {"level2", io::to_json(r.level2)}});
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const std::string tag = " eps " + fmt(reports[i - 1].epsilon) + " vs " + fmt(reports[i].epsilon);
    v.add(at_most("level-1 slope drift" + tag,
                  std::abs(reports[i].level1.slope - reports[i - 1].level1.slope), 0.05));
    v.add(at_most("level-2 slope drift" + tag,
                  std::abs(reports[i].level2.slope - reports[i - 1].level2.slope), 0.05));
  }
  return v;
}

Verdict verify_converge(const Options& opt, const std::vector<double>& epsilons,
                        const std::vector<double>& times) {
  Verdict v = make_verdict("converge", "weak convergence of speeds");
  Timer timer(v);
  convergence::WeakConvergenceConfig cfg;
  cfg.params = model(opt);
  cfg.epsilons = epsilons;
  cfg.times = times;
  cfg.paths = opt.paths;
  cfg.seed = opt.seed;
  const auto rep = convergence::weak_convergence_study(cfg, opt.exec);

  io::json results = io::json::array();
  for (const auto& r : rep.results) {
    io::json rj{{"epsilon", r.epsilon},
                {"simulated", r.simulated},
                {"micro_horizon", r.micro_horizon},
                {"max_energy_error", r.max_energy_error},
                {"max_speed_identity_error", r.max_speed_identity_error}};
    if (!r.simulated) {
      rj["omission"] = r.omission;
      v.warnings.push_back("epsilon " + fmt(r.epsilon) + " omitted: " + r.omission);
    }
    for (const auto& c : r.comparisons)
      rj["comparisons"].push_back({{"observable", c.observable},
                                   {"particle", c.particle},
                                   {"time", c.time},
                                   {"ks", io::to_json(c.ks)},
                                   {"micro_moments", c.micro.value},
                                   {"micro_moments_se", c.micro.std_error},
                                   {"reference_moments", c.reference.value},
                                   {"reference_moments_se", c.reference.std_error}});
    results.push_back(std::move(rj));
  }
  v.details["results"] = std::move(results);
  v.details["reference_rejections"] = rep.reference_rejections;
  v.details["observed_times"] = rep.observed_times;

  for (std::size_t ti = 0; ti < rep.observed_times.size(); ++ti) {
    const std::string tag = " t=" + fmt(rep.observed_times[ti]);
    for (const char* obs : {"v", "u-norm"}) {
      const auto series = rep.ks_series(obs, 0, ti);
      std::string s;
      for (double x : series) s += fmt(x) + " ";
      v.add(is_true(std::string("KS ") + obs + "_1 strictly decreasing in eps" + tag,
                    rep.strictly_decreasing(obs, 0, ti), s));
      v.add(is_true(std::string("KS ") + obs + "_1 below 5% critical value at smallest eps" + tag,
                    rep.final_passes(obs, 0, ti)));
    }
  }
  return v;
}

Verdict verify_ou_limit(const Options& opt, int n, int n_small, double t_final, double step) {
  Verdict v = make_verdict("ou-limit", "spherical projection to OU");
  Timer timer(v);
  const auto big = sde::ou_projection_experiment(n, t_final, opt.paths, opt.seed, step, opt.exec);
  const auto small =
      sde::ou_projection_experiment(n_small, t_final, opt.paths, opt.seed + 1, step, opt.exec);
  v.add(at_most("KS u_1(T) vs X(T), n=" + std::to_string(n), big.ks_statistic, big.ks_critical_01));
  const double ratio = small.mean_sup_deviation / big.mean_sup_deviation;
  v.add(in_range("sup-deviation ratio n=" + std::to_string(n_small) + "/" + std::to_string(n), ratio,
                 1.6, 2.5));
  v.add(within_se("E u_1(T)^2, n=" + std::to_string(n), big.mean_u1_squared, 1.0,
                  big.u1_squared_se));
  v.add(within_se("E u_1(T-1) u_1(T), n=" + std::to_string(n), big.autocov_lag, big.autocov_target,
                  big.autocov_se));

  // Exact OU from X(0) = 0: variance at t = 20 and lag-1 correlation.
  const std::size_t ou_paths = std::max<std::size_t>(opt.paths * 10, 1000);
  struct OuPoint {
    double x19, x20;
  };
  const auto ou = generate_ensemble(
      ou_paths, opt.seed, 7,
      [](RngStream& rng, std::size_t) {
        double x = 0.0;
        for (int i = 0; i < 19; ++i) x = sde::ou_exact_step(x, 1.0, rng);
        const double x19 = x;
        return OuPoint{x19, sde::ou_exact_step(x19, 1.0, rng)};
      },
      opt.exec);
  stats::MomentAccumulator m20, sq20, cross;
  for (const auto& p : ou) {
    m20.add(p.x20);
    cross.add(p.x19 * p.x20);
  }
  for (const auto& p : ou) {
    const double c = p.x20 - m20.mean();
    sq20.add(c * c);
  }
  v.add(within_se("OU variance at t=20", sq20.mean(), targets::ou_stationary_variance(),
                  sq20.std_error()));
  v.add(within_se("OU E X(19) X(20)", cross.mean(),
                  targets::ou_autocorr(1.0) * (1.0 - std::exp(-19.0)), cross.std_error()));

  auto report_json = [](const sde::OuProjectionReport& r) {
    return io::json{{"n", r.n},
                    {"t_final", r.t_final},
                    {"step", r.step},
                    {"paths", r.paths},
                    {"ks_statistic", r.ks_statistic},
                    {"ks_critical_05", r.ks_critical_05},
                    {"ks_critical_01", r.ks_critical_01},
                    {"mean_sup_deviation", r.mean_sup_deviation},
                    {"sup_deviation_se", r.sup_deviation_se},
                    {"mean_u1_squared", r.mean_u1_squared},
                    {"u1_squared_se", r.u1_squared_se},
                    {"autocov_lag", r.autocov_lag},
                    {"autocov_se", r.autocov_se},
                    {"autocov_target", r.autocov_target}};
  };
  v.details["large"] = report_json(big);
  v.details["small"] = report_json(small);
  v.details["sup_deviation_ratio"] = ratio;
  v.details["ou_paths"] = ou_paths;
  return v;
}

Verdict criterion_invariants(const Options& opt) {
  Verdict v = make_verdict("1", "exact invariants");
  Timer timer(v);
  struct Case {
    int n, d;
    double eps;
  };
  for (const Case c : {Case{2, 2, 0.1}, Case{3, 3, 0.3}, Case{1, 2, 0.5}}) {
    micro::ModelParams p;
    p.n_particles = c.n;
    p.dim = c.d;
    p.field_strength = c.eps;
    p.total_energy = 1.5 * c.n;
    p.t_final = 50.0;
    p.grid_points = 201;
    RngStream rng(opt.seed, stream_id(c.n * 10 + c.d, 0));
    const auto traj = micro::simulate_trajectory(p, rng);
    const std::string tag = " N=" + std::to_string(c.n) + " d=" + std::to_string(c.d);
    v.add(at_most("energy drift" + tag, traj.max_energy_error, 1e-12));
    double speed_gap = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const Vec a = sde::block_norms(traj.p[i], c.d);
      const Vec b = sde::block_norms(traj.u[i], c.d);
      speed_gap = std::max(speed_gap, ((a - b).array().abs() / a.array()).maxCoeff());
    }
    v.add(at_most("|u_k| = |p_k|" + tag, speed_gap, 1e-12));
    v.add(at_most("u jump at collisions" + tag, traj.max_u_jump, 1e-10));
    v.add(is_true("collisions occurred" + tag, !traj.events.empty()));

    const auto w = micro::rescale_driver(traj.driver, c.eps);
    std::vector<double> grid(401);
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = w.end_time() * static_cast<double>(i) / (grid.size() - 1);
    grid.back() = w.end_time();
    const auto lift = rough::canonical_lift(w, grid);
    const double defect = rough::max_chen_defect(lift, 2000, opt.seed) / lift.level2_scale();
    v.add(at_most("relative Chen defect" + tag, defect, 1e-12));
  }
  return v;
}

Verdict criterion_round_trip(const Options& opt) {
  Verdict v = make_verdict("2", "round-trip slow/fast decomposition");
  Timer timer(v);
  const double eps = 0.1;
  micro::ModelParams p;
  p.n_particles = 2;
  p.dim = 2;
  p.collision_rate = 1.0;
  p.field_strength = eps;
  p.total_energy = 2.0;
  p.t_final = 1.0 / (eps * eps);
  p.grid_points = 201;
  double worst = 0.0;
  std::size_t collisions = 0;
  for (std::uint64_t r = 0; r < 4; ++r) {
    RngStream rng(opt.seed, stream_id(2, r));
    const auto traj = micro::simulate_trajectory(p, rng);
    collisions += traj.events.size();
    const auto w = micro::rescale_driver(traj.driver, eps);
    std::vector<double> out_times;
    for (double t : traj.times) out_times.push_back(std::min(eps * eps * t, w.end_time()));
    rough::SphereTangentMap map(p.total_energy);
    const auto u = rough::solve_driven_ode(map, w, traj.u.front(), 1e-3, out_times);
    for (std::size_t i = 0; i < u.size(); ++i)
      worst = std::max(worst, (u[i] - traj.u[i]).lpNorm<Eigen::Infinity>());
  }
  v.add(at_most("sup_t |u_ode(t) - u_micro(t / eps^2)|", worst, 1e-6));
  v.add(is_true("collisions occurred", collisions > 0, std::to_string(collisions)));
  v.details["max_deviation"] = worst;
  v.details["collisions"] = collisions;
  return v;
}

Verdict criterion_closed_forms(const Options& opt) {
  Verdict v = make_verdict("3", "stationary driver closed forms");
  Timer timer(v);
  Options o = opt;
  o.n_particles = 2;
  o.dim = 2;
  o.lambda = 1.0;
  const auto ens = closed_form_ensemble(o, kClosedFormHorizon, stationary::StartMode::haar);
  autocov_checks(v, ens);
  vcorr_checks(v, ens);
  greenkubo_checks(v, ens, kGreenKuboKmax);
  v.details["trajectories"] = ens.size();
  v.details["horizon"] = ens.horizon;
  return v;
}

Verdict criterion_moment_scaling(const Options& opt) {
  Options o = opt;
  o.paths = std::min<std::size_t>(opt.paths, 2000);
  Verdict v = verify_momentfit(o, {0.1, 0.05}, 4.0);
  v.id = "4";
  v.title = "moment-bound scaling";
  return v;
}

Verdict criterion_weak_convergence(const Options& opt) {
  Options o = opt;
  o.n_particles = 2;
  o.dim = 2;
  o.lambda = 1.0;
  o.energy = 2.0;
  Verdict v = verify_converge(o, {0.4, 0.2, 0.1}, {1.0});
  v.id = "5";
  v.title = "weak convergence";
  return v;
}

Verdict criterion_sde_consistency(const Options& opt) {
  Verdict v = make_verdict("6", "SDE cross-consistency");
  Timer timer(v);
  const double t = 5.0;
  const double step = 0.005;
  std::uint64_t family = 100;
  for (const auto& [n, d] : {std::pair{2, 2}, std::pair{2, 3}}) {
    const double energy = 2.0;
    const auto sphere = sde_config(sde::SdeModel::strat_sphere, n, d, opt.lambda, energy, t, step);
    const auto ito = sde_config(sde::SdeModel::ito_speed, n, d, opt.lambda, energy, t, step);
    const auto a = generate_ensemble(
        opt.paths, opt.seed, family++,
        [&](RngStream& rng, std::size_t) {
          const auto s = sde::strat_sphere_solve(sphere, rng);
          return sde::block_norms(s.final_value(), d)[0];
        },
        opt.exec);
    std::size_t rejections = 0;
    const auto b = generate_ensemble(
        opt.paths, opt.seed, family++,
        [&](RngStream& rng, std::size_t) {
          const auto s = sde::ito_speed_solve(ito, rng);
          return std::pair{s.final_value()[0], s.rejections};
        },
        opt.exec);
    std::vector<double> bv;
    for (const auto& x : b) {
      bv.push_back(x.first);
      rejections += x.second;
    }
    const auto ks = stats::ks_two_sample(a, bv);
    const std::string tag = " (N,d)=(" + std::to_string(n) + "," + std::to_string(d) + ")";
    v.add(at_most("KS speed v_1 sphere vs ito" + tag, ks.statistic, ks.critical_01));
    v.details["cases"].push_back(
        {{"n", n}, {"d", d}, {"ks", io::to_json(ks)}, {"ito_rejections", rejections}});
  }
  // N = 1: the speed is pinned at sqrt(U).
  const double energy = 1.7;
  const double root = std::sqrt(energy);
  const auto ito = sde_config(sde::SdeModel::ito_speed, 1, 2, opt.lambda, energy, 1.0, 0.01);
  auto sphere = sde_config(sde::SdeModel::strat_sphere, 1, 2, opt.lambda, energy, 1.0, 0.01);
  sphere.record_every = 1;
  auto ito_all = ito;
  ito_all.record_every = 1;
  double ito_dev = 0.0, sphere_dev = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    RngStream r1(opt.seed, stream_id(200, r)), r2(opt.seed, stream_id(201, r));
    const auto a = sde::ito_speed_solve(ito_all, r1);
    for (double x : a.values) ito_dev = std::max(ito_dev, std::abs(x - root));
    const auto s = sde::strat_sphere_solve(sphere, r2);
    for (std::size_t i = 0; i < s.size(); ++i)
      sphere_dev = std::max(sphere_dev, std::abs(s.at(i).norm() - root));
  }
  v.add(at_most("N=1 ito speed - sqrt(U)", ito_dev, 0.0));
  v.add(at_most("N=1 sphere speed - sqrt(U)", sphere_dev,
                4.0 * std::numeric_limits<double>::epsilon() * root));
  return v;
}

Verdict criterion_ou_limit(const Options& opt) {
  Verdict v = verify_ou_limit(opt, 256, 64, 10.0, 0.01);
  v.id = "7";
  v.title = "spherical projection converges to OU";
  return v;
}

Verdict criterion_spiral(const Options&) {
  Verdict v = make_verdict("8", "spiral area regression");
  Timer timer(v);
  const auto r = rough::spiral_report(0.1, 1'000'000);
  v.add(at_most("|y_2(1) - 0.5|", std::abs(r.area_term - 0.5), 0.0035));
  v.add(within_abs("sup |x|", r.sup_norm, 0.1, 1e-12));
  v.add(within_abs("y_2(1) vs closed form", r.area_term, targets::spiral_area_term(0.1), 1e-3));
  v.add(within_abs("XX_12 - XX_21 vs closed form", r.antisymmetric, targets::spiral_antisymmetric(0.1),
                   1e-3));
  v.details = io::to_json(r);
  return v;
}

Verdict criterion_stationary_law(const Options& opt) {
  Verdict v = make_verdict("9", "stationary law");
  Timer timer(v);
  const int n = 2, d = 2;
  const double energy = 2.0;
  const auto cfg = sde_config(sde::SdeModel::strat_sphere, n, d, opt.lambda, energy, 50.0, 0.01);
  const auto finals = generate_ensemble(
      opt.paths, opt.seed, 300,
      [&](RngStream& rng, std::size_t) { return Vec(sde::strat_sphere_solve(cfg, rng).final_value()); },
      opt.exec);
  stats::MatrixAccumulator acc(n * d, n * d);
  for (const auto& u : finals) acc.add(u * u.transpose());
  const auto est = stats::make_estimate(
      acc, targets::sphere_second_moment(energy, n, d) * Mat::Identity(n * d, n * d),
      "sphere-second-moment", 50.0);
  v.add_estimate("E u_i u_j at t=50", est, true);
  v.details["sphere_moments"] = io::to_json(est);

  // Micro speeds at eps = 0.1, macroscopic time 5, against the uniform law on
  // the energy sphere.
  const double eps = 0.1;
  micro::ModelParams p;
  p.n_particles = n;
  p.dim = d;
  p.collision_rate = opt.lambda;
  p.field_strength = eps;
  p.total_energy = energy;
  p.t_final = 5.0 / (eps * eps);
  p.grid_points = 2;
  const auto micro_speeds = generate_ensemble(
      opt.paths, opt.seed, 301,
      [&](RngStream& rng, std::size_t) {
        const auto traj = micro::simulate_trajectory(p, rng);
        return traj.p.back().head(d).norm();
      },
      opt.exec);
  const auto uniform = generate_ensemble(
      opt.paths, opt.seed, 302,
      [&](RngStream& rng, std::size_t) {
        Vec g(n * d);
        for (int i = 0; i < n * d; ++i) g[i] = rng.normal();
        return geom::project_to_sphere(g, energy).head(d).norm();
      },
      opt.exec);
  const auto ks = stats::ks_two_sample(micro_speeds, uniform);
  v.add(at_most("KS micro v_1 vs uniform-sphere speed", ks.statistic, ks.critical_05));
  v.details["speed_ks"] = io::to_json(ks);
  return v;
}

}  // namespace thermolab::experiments
