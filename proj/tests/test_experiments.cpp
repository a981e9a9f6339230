#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "thermolab/convergence.hpp"
#include "thermolab/error.hpp"
#include "thermolab/experiments.hpp"

using namespace thermolab;
namespace ex = thermolab::experiments;

TEST_CASE("check builders") {
  CHECK(ex::within_se("a", 1.0, 1.2, 0.1).pass);
  CHECK_FALSE(ex::within_se("a", 1.0, 1.4, 0.1).pass);
  CHECK(ex::within_se("a", 1.0, 1.4, 0.1).tolerance == doctest::Approx(0.3));
  CHECK(ex::within_abs("b", 0.5, 0.5035, 0.0035).pass);
  CHECK_FALSE(ex::within_abs("b", 0.5, 0.504, 0.0035).pass);
  CHECK(ex::at_most("c", 1e-13, 1e-12).pass);
  CHECK_FALSE(ex::at_most("c", std::numeric_limits<double>::quiet_NaN(), 1.0).pass);
  CHECK(ex::in_range("d", 0.5, 0.0, 1.0).pass);
  CHECK_FALSE(ex::in_range("d", 1.5, 0.0, 1.0).pass);
  CHECK(ex::is_true("e", true).estimate == 1.0);
}

TEST_CASE("verdicts") {
  ex::Verdict v;
  v.id = "3";
  v.title = "demo";
  CHECK_FALSE(v.passed());  // no checks is not a pass
  v.add(ex::is_true("ok", true));
  CHECK(v.passed());
  CHECK(v.summary_line().rfind("[PASS] 3 demo (1/1 checks", 0) == 0);
  v.add(ex::at_most("bad", 2.0, 1.0));
  CHECK_FALSE(v.passed());
  CHECK(v.summary_line().rfind("[FAIL] 3 demo (1/2 checks", 0) == 0);

  stats::CorrelationEstimate e;
  e.estimate = Mat::Identity(2, 2);
  e.target = Mat::Identity(2, 2);
  e.std_error = Mat::Constant(2, 2, 0.1);
  e.low_power = true;
  ex::Verdict w;
  w.add_estimate("m", e);
  CHECK(w.checks.size() == 2);
  CHECK(w.warnings.size() == 1);
  w.add_estimate("m", e, true);
  CHECK(w.checks.size() == 6);
  const auto j = w.to_json();
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == 6);
}

TEST_CASE("weak convergence configuration") {
  convergence::WeakConvergenceConfig cfg;
  cfg.epsilons = {0.2, 0.2};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.epsilons = {0.2, 0.1};
  cfg.paths = 10;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.paths = 100;
  cfg.params.dim = 1;
  try {
    cfg.validate();
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::unsupported_model);
  }
}

TEST_CASE("quick acceptance criteria") {
  ex::Options opt;
  const auto c1 = ex::criterion_invariants(opt);
  CHECK_MESSAGE(c1.passed(), c1.to_json().dump());
  const auto c2 = ex::criterion_round_trip(opt);
  CHECK_MESSAGE(c2.passed(), c2.to_json().dump());
  const auto c8 = ex::criterion_spiral(opt);
  CHECK_MESSAGE(c8.passed(), c8.to_json().dump());
}

TEST_CASE("small closed-form verification") {
  ex::Options opt;
  opt.paths = 400;
  opt.seed = 3;
  const auto v = ex::verify_autocov(opt);
  CHECK(v.checks.size() > 4);
  CHECK(v.details.contains("autocov"));
}
