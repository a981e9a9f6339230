#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/io.hpp"
#include "thermolab/stationary.hpp"
#include "thermolab/stats.hpp"

namespace thermolab::experiments {

struct Check {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double target = 0.0;
  double std_error = 0.0;  // 0 when the check is not statistical
  double tolerance = 0.0;  // absolute band actually applied
  std::string detail;
};

Check within_se(std::string name, double estimate, double target, double se, double n_se = 3.0);
Check within_abs(std::string name, double value, double target, double tol);
Check at_most(std::string name, double value, double bound);
Check in_range(std::string name, double value, double lo, double hi);
Check is_true(std::string name, bool value, std::string detail = {});

struct Verdict {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  io::json details = io::json::object();
  double seconds = 0.0;

  bool passed() const;
  void add(Check c) { checks.push_back(std::move(c)); }
  /// Adds a 3-s.e. check per diagonal entry (and optionally off-diagonal).
  void add_estimate(const std::string& name, const stats::CorrelationEstimate& e,
                    bool off_diagonal = false, double n_se = 3.0);
  io::json to_json() const;
  /// "[PASS] id title (n/m checks, s)"
  std::string summary_line() const;
};

struct Options {
  std::size_t paths = 10000;
  std::uint64_t seed = 20240601;
  int n_particles = 2;
  int dim = 2;
  double lambda = 1.0;
  double energy = 2.0;
  Execution exec = Execution::parallel;
};

// Pieces of the closed-form checks, usable separately by `verify`.
stationary::StationaryDriverEnsemble closed_form_ensemble(const Options& opt, double horizon,
                                                          stationary::StartMode mode);
void autocov_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens);
void vcorr_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens);
void greenkubo_checks(Verdict& v, const stationary::StationaryDriverEnsemble& ens, int k_max);

Verdict verify_autocov(const Options& opt);
Verdict verify_vcorr(const Options& opt);
Verdict verify_greenkubo(const Options& opt, int k_max = 15);
Verdict verify_momentfit(const Options& opt, const std::vector<double>& epsilons, double q = 4.0);
Verdict verify_converge(const Options& opt, const std::vector<double>& epsilons,
                        const std::vector<double>& times);
Verdict verify_ou_limit(const Options& opt, int n = 256, int n_small = 64, double t_final = 10.0,
                        double step = 0.01);

// Acceptance criteria, at the stated sample sizes when run with defaults.
Verdict criterion_invariants(const Options& opt);
Verdict criterion_round_trip(const Options& opt);
Verdict criterion_closed_forms(const Options& opt);
Verdict criterion_moment_scaling(const Options& opt);
Verdict criterion_weak_convergence(const Options& opt);
Verdict criterion_sde_consistency(const Options& opt);
Verdict criterion_ou_limit(const Options& opt);
Verdict criterion_spiral(const Options& opt);
Verdict criterion_stationary_law(const Options& opt);

}  // namespace thermolab::experiments
