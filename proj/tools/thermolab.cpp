// thermolab: command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
// 3 verification failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermolab/error.hpp"
#include "thermolab/experiments.hpp"
#include "thermolab/io.hpp"
#include "thermolab/micro_sim.hpp"
#include "thermolab/rough_lift.hpp"
#include "thermolab/sde_limit.hpp"

namespace fs = std::filesystem;
using namespace thermolab;
using io::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

bool is_configuration_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_dimension:
    case ErrorKind::invalid_parameter:
    case ErrorKind::invalid_initial_condition:
    case ErrorKind::unsupported_model:
    case ErrorKind::grid_mismatch:
      return true;
    default:
      return false;
  }
}

// Files written by the current command; removed again if it fails.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void prepare() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }
  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  const std::vector<fs::path>& files() const { return files_; }
  void discard() noexcept {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_) fs::remove(dir_, ec);
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
};

std::string numbered(const std::string& stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu.csv", i);
  return stem + buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SimulateArgs {
  micro::ModelParams params;
  std::size_t trajectories = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  a.params.validate();
  const auto trajs = generate_ensemble(
      a.trajectories, a.seed, 0,
      [&](RngStream& rng, std::size_t) { return micro::simulate_trajectory(a.params, rng); });
  OutputSet out(a.out);
  try {
    out.prepare();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      io::write_text(out.add(numbered("trajectory", i)),
                     io::to_csv(io::trajectory_table(trajs[i], a.params.n_particles, a.params.dim)));
      io::write_text(out.add(numbered("driver", i)), io::to_csv(io::driver_table(trajs[i].driver)));
    }
    io::RunManifest m;
    m.command = "simulate";
    m.config = io::to_json(a.params);
    m.config["trajectories"] = a.trajectories;
    json events = json::array();
    for (const auto& t : trajs) events.push_back(t.events.size());
    m.config["event_counts"] = events;
    m.seed = a.seed;
    m.threads = thread_budget();
    m.wall_clock_seconds = seconds_since(t0);
    m.outputs = out.files();
    const auto manifest = out.add("manifest.json");
    io::write_manifest(manifest, m);
  } catch (...) {
    out.discard();
    throw;
  }
}

struct LiftArgs {
  std::string input;
  std::string builtin;
  double epsilon = 0.1;
  double alpha = 0.45;
  int grid_points = 201;
  std::size_t segments = 1'000'000;
  std::size_t chen_triples = 100;
  std::uint64_t seed = 1;
  std::string out;
};

void run_lift(const LiftArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  require(a.alpha > 1.0 / 3.0 && a.alpha < 0.5, ErrorKind::invalid_parameter,
          "alpha must lie in (1/3, 1/2)");
  require(a.epsilon > 0.0, ErrorKind::invalid_parameter, "epsilon must be positive");
  require(a.grid_points >= 2, ErrorKind::invalid_parameter, "grid-points must be >= 2");
  require(a.input.empty() != a.builtin.empty(), ErrorKind::invalid_parameter,
          "give exactly one of --input or --builtin");
  require(a.builtin.empty() || a.builtin == "spiral", ErrorKind::invalid_parameter,
          "unknown builtin '" + a.builtin + "'");

  json report;
  PiecewiseLinearPath w = a.builtin == "spiral"
                              ? rough::spiral_example(a.epsilon, a.segments)
                              : micro::rescale_driver(io::path_from_table(io::read_csv(a.input)),
                                                      a.epsilon);
  if (a.builtin == "spiral") report["spiral"] = io::to_json(rough::spiral_report(a.epsilon, a.segments));
  std::vector<double> grid(a.grid_points);
  for (int i = 0; i < a.grid_points; ++i)
    grid[i] = w.start_time() + (w.end_time() - w.start_time()) * i / (a.grid_points - 1);
  grid.back() = w.end_time();
  const auto lift = rough::canonical_lift(w, grid);
  report["holder"] = io::to_json(rough::holder_norms(lift, a.alpha));
  report["chen_defect_max"] = rough::max_chen_defect(lift, a.chen_triples, a.seed);
  report["chen_defect_relative"] = report["chen_defect_max"].get<double>() / lift.level2_scale();
  report["epsilon"] = a.epsilon;
  report["segments"] = w.segment_count();

  OutputSet out(a.out);
  try {
    out.prepare();
    io::write_text(out.add("lift.csv"), io::to_csv(io::lift_table(lift)));
    io::write_text(out.add("report.json"), report.dump(2) + "\n");
    io::RunManifest m;
    m.command = "lift";
    m.config = {{"input", a.input},        {"builtin", a.builtin},
                {"epsilon", a.epsilon},    {"alpha", a.alpha},
                {"grid_points", a.grid_points}, {"chen_triples", a.chen_triples}};
    m.seed = a.seed;
    m.threads = thread_budget();
    m.wall_clock_seconds = seconds_since(t0);
    m.outputs = out.files();
    io::write_manifest(out.add("manifest.json"), m);
  } catch (...) {
    out.discard();
    throw;
  }
  std::cout << report.dump(2) << '\n';
}

struct SdeArgs {
  std::string model;
  sde::SdeConfig cfg;
  std::string noise = "collision";
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_sde(SdeArgs a) {
  const auto t0 = std::chrono::steady_clock::now();
  a.cfg.model = sde::parse_model(a.model);
  require(a.noise == "collision" || a.noise == "unit", ErrorKind::invalid_parameter,
          "noise must be 'collision' or 'unit'");
  a.cfg.noise = a.noise == "unit" ? sde::NoiseConvention::unit : sde::NoiseConvention::collision_limit;
  a.cfg.validate();
  const auto samples = generate_ensemble(a.paths, a.seed, 0, [&](RngStream& rng, std::size_t) {
    switch (a.cfg.model) {
      case sde::SdeModel::strat_sphere: return sde::strat_sphere_solve(a.cfg, rng);
      case sde::SdeModel::ito_speed: return sde::ito_speed_solve(a.cfg, rng);
      case sde::SdeModel::ou: break;
    }
    return sde::ou_solve(a.cfg, rng);
  });
  std::size_t rejections = 0;
  for (const auto& s : samples) rejections += s.rejections;
  OutputSet out(a.out);
  try {
    out.prepare();
    io::write_text(out.add("paths.csv"), io::to_csv(io::path_ensemble_table(samples)));
    io::RunManifest m;
    m.command = "sde";
    m.config = io::to_json(a.cfg);
    m.config["paths"] = a.paths;
    m.config["record_every"] = a.cfg.record_every;
    m.config["rejections"] = rejections;
    m.seed = a.seed;
    m.threads = thread_budget();
    m.wall_clock_seconds = seconds_since(t0);
    m.outputs = out.files();
    io::write_manifest(out.add("manifest.json"), m);
  } catch (...) {
    out.discard();
    throw;
  }
}

struct VerifyArgs {
  std::string subcommand;
  experiments::Options opt;
  std::vector<double> epsilons;
  std::vector<double> times{1.0};
  int n = 256;
  int n_small = 64;
  double t_final = 10.0;
  double step = 0.01;
  int k_max = 15;
  double q = 4.0;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  experiments::Verdict v;
  const auto& s = a.subcommand;
  if (s == "autocov") {
    v = experiments::verify_autocov(a.opt);
  } else if (s == "vcorr") {
    v = experiments::verify_vcorr(a.opt);
  } else if (s == "greenkubo") {
    v = experiments::verify_greenkubo(a.opt, a.k_max);
  } else if (s == "momentfit") {
    v = experiments::verify_momentfit(a.opt, a.epsilons.empty() ? std::vector<double>{0.1, 0.05}
                                                                : a.epsilons, a.q);
  } else if (s == "converge") {
    v = experiments::verify_converge(
        a.opt, a.epsilons.empty() ? std::vector<double>{0.4, 0.2, 0.1} : a.epsilons, a.times);
  } else if (s == "ou-limit") {
    v = experiments::verify_ou_limit(a.opt, a.n, a.n_small, a.t_final, a.step);
  } else {
    throw Error(ErrorKind::invalid_parameter, "unknown verify subcommand '" + s + "'");
  }
  json j = v.to_json();
  j["paths"] = a.opt.paths;
  j["seed"] = a.opt.seed;
  if (!a.out.empty()) {
    io::write_text(a.out, j.dump(2) + "\n");
  } else {
    std::cout << j.dump(2) << '\n';
  }
  std::cerr << v.summary_line() << '\n';
  for (const auto& w : v.warnings) std::cerr << "warning: " << w << '\n';
  return v.passed() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermostatted particle system: micro simulation, rough lifts, limit SDEs"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Thread budget (overrides THERMOSTAT_LAB_THREADS)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate micro trajectories");
  simulate->add_option("--n-particles", sim.params.n_particles)->capture_default_str();
  simulate->add_option("--dim", sim.params.dim)->capture_default_str();
  simulate->add_option("--lambda", sim.params.collision_rate)->capture_default_str();
  simulate->add_option("--epsilon", sim.params.field_strength)->required();
  simulate->add_option("--energy", sim.params.total_energy)->capture_default_str();
  simulate->add_option("--t-final", sim.params.t_final)->required();
  simulate->add_option("--ode-step", sim.params.ode_step)->capture_default_str();
  simulate->add_option("--grid-points", sim.params.grid_points)->capture_default_str();
  simulate->add_option("--trajectories", sim.trajectories)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  LiftArgs lift;
  auto* lift_cmd = app.add_subcommand("lift", "Canonical lift, Hoelder norms and Chen check");
  lift_cmd->add_option("--input", lift.input, "CSV with t and phi_* columns");
  lift_cmd->add_option("--builtin", lift.builtin, "Built-in path (spiral)");
  lift_cmd->add_option("--epsilon", lift.epsilon)->required();
  lift_cmd->add_option("--alpha", lift.alpha)->capture_default_str();
  lift_cmd->add_option("--grid-points", lift.grid_points)->capture_default_str();
  lift_cmd->add_option("--segments", lift.segments, "Spiral segments")->capture_default_str();
  lift_cmd->add_option("--chen-triples", lift.chen_triples)->capture_default_str();
  lift_cmd->add_option("--seed", lift.seed)->capture_default_str();
  lift_cmd->add_option("--out", lift.out, "Output directory")->required();

  SdeArgs sde_args;
  auto* sde_cmd = app.add_subcommand("sde", "Sample limit SDE paths");
  sde_cmd->add_option("--model", sde_args.model, "strat-sphere | ito-speed | ou")->required();
  sde_cmd->add_option("--n-particles", sde_args.cfg.n_particles)->capture_default_str();
  sde_cmd->add_option("--dim", sde_args.cfg.dim)->capture_default_str();
  sde_cmd->add_option("--lambda", sde_args.cfg.collision_rate)->capture_default_str();
  sde_cmd->add_option("--energy", sde_args.cfg.total_energy)->capture_default_str();
  sde_cmd->add_option("--step", sde_args.cfg.step)->capture_default_str();
  sde_cmd->add_option("--t-final", sde_args.cfg.t_final)->capture_default_str();
  sde_cmd->add_option("--record-every", sde_args.cfg.record_every)->capture_default_str();
  sde_cmd->add_option("--noise", sde_args.noise, "collision | unit")->capture_default_str();
  sde_cmd->add_option("--paths", sde_args.paths)->capture_default_str();
  sde_cmd->add_option("--seed", sde_args.seed)->required();
  sde_cmd->add_option("--out", sde_args.out, "Output directory")->required();

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Statistical verification against closed forms");
  verify->add_option("subcommand", ver.subcommand,
                     "autocov | vcorr | greenkubo | momentfit | converge | ou-limit")
      ->required();
  verify->add_option("--paths", ver.opt.paths)->capture_default_str();
  verify->add_option("--seed", ver.opt.seed)->capture_default_str();
  verify->add_option("--n-particles", ver.opt.n_particles)->capture_default_str();
  verify->add_option("--dim", ver.opt.dim)->capture_default_str();
  verify->add_option("--lambda", ver.opt.lambda)->capture_default_str();
  verify->add_option("--energy", ver.opt.energy)->capture_default_str();
  verify->add_option("--epsilons", ver.epsilons, "Decreasing epsilon schedule")->delimiter(',');
  verify->add_option("--times", ver.times, "Observation times (converge)")->delimiter(',');
  verify->add_option("--n", ver.n, "Sphere dimension (ou-limit)")->capture_default_str();
  verify->add_option("--n-small", ver.n_small)->capture_default_str();
  verify->add_option("--t-final", ver.t_final)->capture_default_str();
  verify->add_option("--step", ver.step)->capture_default_str();
  verify->add_option("--k-max", ver.k_max)->capture_default_str();
  verify->add_option("--q", ver.q)->capture_default_str();
  verify->add_option("--out", ver.out, "Write the verdict JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads > 0) set_thread_budget(threads);
    if (*simulate) run_simulate(sim);
    if (*lift_cmd) run_lift(lift);
    if (*sde_cmd) run_sde(sde_args);
    if (*verify) return run_verify(ver);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return is_configuration_error(e.kind()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
