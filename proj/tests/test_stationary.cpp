#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "thermolab/error.hpp"
#include "thermolab/stationary.hpp"
#include "thermolab/stats.hpp"
#include "thermolab/targets.hpp"

using namespace thermolab;
using stationary::StartMode;

namespace {

micro::ModelParams params(int n, int d, double lambda) {
  micro::ModelParams p;
  p.n_particles = n;
  p.dim = d;
  p.collision_rate = lambda;
  return p;
}

bool diagonal_within(const stats::CorrelationEstimate& e, double n_se) {
  for (Eigen::Index i = 0; i < e.estimate.rows(); ++i)
    if (std::abs(e.estimate(i, i) - e.target(i, i)) > n_se * e.std_error(i, i)) return false;
  return true;
}

// Midpoint-rule integral of psi over [a, b] with many cells.
Vec riemann_window(const stationary::PsiTrajectory& traj, double a, double b, int cells) {
  const double h = (b - a) / cells;
  Vec sum = Vec::Zero(traj.value(a).size());
  for (int i = 0; i < cells; ++i) sum += h * traj.value(a + (i + 0.5) * h);
  return sum;
}

}  // namespace

TEST_CASE("haar start is stationary with unit blocks") {
  const auto ens = stationary::simulate_stationary_psi(params(2, 2, 1.0), 5.0, 10000, 1);
  CHECK(ens.stationary);
  for (std::size_t i = 0; i < 20; ++i) {
    const Mat g = ens.grid_values(i);
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      for (int k = 0; k < 2; ++k) CHECK(std::abs(g.row(r).segment(2 * k, 2).norm() - 1.0) < 1e-12);
  }
  for (double t : {0.0, 2.5, 5.0}) {
    const auto mean = stationary::psi_mean(ens, t);
    CHECK(mean.within(3.0));
    const auto second = stationary::psi_second_moment(ens, t);
    CHECK(diagonal_within(second, 3.0));
    CHECK(second.target(0, 0) == 0.5);
  }
  const auto early = stationary::psi_component_sample(ens, 0, 0.5);
  const auto late = stationary::psi_component_sample(ens, 0, 4.5);
  CHECK_FALSE(stats::ks_two_sample(early, late).reject_01());
  // Frames at time zero are random, not the identity.
  const auto first = stationary::psi_component_sample(ens, 0, 0.0);
  CHECK(std::count(first.begin(), first.end(), 1.0) < 10);
}

TEST_CASE("tau-shift start has the same law") {
  const auto shifted =
      stationary::simulate_stationary_psi(params(2, 3, 1.0), 3.0, 10000, 2, StartMode::tau_shift);
  const auto haar = stationary::simulate_stationary_psi(params(2, 3, 1.0), 3.0, 10000, 3);
  CHECK(diagonal_within(stationary::psi_second_moment(shifted, 0.0), 3.0));
  CHECK(stationary::psi_mean(shifted, 1.0).within(3.0));
  for (std::size_t c : {0u, 4u}) {
    CHECK_FALSE(stats::ks_two_sample(stationary::psi_component_sample(shifted, c, 0.0),
                                     stationary::psi_component_sample(haar, c, 0.0))
                    .reject_01());
  }
  for (std::size_t i = 0; i < 10; ++i) CHECK(shifted.trajectories[i].shift > 0.0);
}

TEST_CASE("conditional exponential decay") {
  Vec a(4);
  a << 1.0, 0.0, 0.6, -0.8;
  for (double lambda : {1.0, 2.0}) {
    const auto ens = stationary::simulate_stationary_psi(params(2, 2, lambda), 2.0, 10000, 4,
                                                         StartMode::conditioned, a);
    const auto at0 = stationary::exp_decay_conditional(ens, a, 0.0);
    CHECK((at0.estimate.col(0) - a).cwiseAbs().maxCoeff() == 0.0);
    const auto at1 = stationary::exp_decay_conditional(ens, a, 1.0);
    CHECK((at1.target.col(0) - targets::conditional_decay_factor(lambda, 1.0) * a).norm() < 1e-15);
    CHECK(at1.within(3.0));
  }
  Vec bad = a;
  bad(0) = 0.9;
  CHECK_THROWS_AS(stationary::simulate_stationary_psi(params(2, 2, 1.0), 1.0, 10, 5,
                                                      StartMode::conditioned, bad),
                  Error);
  CHECK_THROWS_AS(stationary::simulate_stationary_psi(params(2, 2, 1.0), 1.0, 10, 5,
                                                      StartMode::conditioned),
                  Error);
  const auto haar = stationary::simulate_stationary_psi(params(2, 2, 1.0), 1.0, 200, 5);
  CHECK_THROWS_AS(stationary::exp_decay_conditional(haar, a, 0.5), Error);
}

TEST_CASE("autocovariance of psi") {
  const auto ens = stationary::simulate_stationary_psi(params(2, 2, 1.0), 6.0, 4000, 6);
  const auto est = stationary::autocov_psi(ens, {0.0, 1.0, 2.0});
  REQUIRE(est.size() == 3);
  CHECK(est[0].within(3.0));
  CHECK(est[0].target(0, 0) == 0.5);
  CHECK(est[1].within(3.0));
  CHECK(est[1].target(1, 1) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(diagonal_within(est[2], 3.0));
  for (const auto& e : est) {
    CHECK_FALSE(e.low_power);
    // Coordinates are exchangeable: diagonal entries agree within 3 s.e.
    for (int i = 1; i < 4; ++i) {
      const double se = std::hypot(e.std_error(0, 0), e.std_error(i, i));
      CHECK(std::abs(e.estimate(0, 0) - e.estimate(i, i)) < 3.0 * se);
    }
  }
  CHECK_THROWS_AS(stationary::autocov_psi(ens, {7.0}), Error);
  const auto tiny = stationary::simulate_stationary_psi(params(1, 2, 1.0), 2.0, 50, 7);
  CHECK(stationary::autocov_psi(tiny, {0.5})[0].low_power);
}

TEST_CASE("window integrals") {
  RngStream rng(8, 0);
  const auto p = params(3, 2, 1.5);
  const auto traj = stationary::simulate_psi_trajectory(p, 6.0, rng);
  const auto w = stationary::window_integrals(traj, 6, 3, 2);
  REQUIRE(w.v.cols() == 6);
  Mat h_sum = Mat::Zero(6, 6);
  for (int j = 0; j < 6; ++j) {
    CHECK(w.v.col(j).norm() <= std::sqrt(3.0) + 1e-12);
    CHECK((w.v.col(j) - riemann_window(traj, j, j + 1.0, 200000)).cwiseAbs().maxCoeff() < 1e-4);

    const int cells = 20000;
    const double h = 1.0 / cells;
    Vec running = Vec::Zero(6);
    for (int i = 0; i < cells; ++i) {
      const Vec psi = traj.value(j + (i + 0.5) * h);
      h_sum += h * (running + 0.5 * h * psi) * psi.transpose();
      running += h * psi;
    }
  }
  CHECK((w.h_cross - h_sum / 6.0).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("window correlations and green-kubo constants") {
  const auto ens = stationary::simulate_stationary_psi(params(2, 2, 1.0), 20.0, 3000, 9);
  const auto c = stationary::v_correlations(ens, 3);
  REQUIRE(c.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(c[k].target(0, 0) == doctest::Approx(targets::v_corr(1.0, 2, k)));
    CHECK(c[k].target(0, 1) == 0.0);
    CHECK(c[k].within(3.0));
  }

  const auto gk = stationary::green_kubo_constants(ens, 15);
  const Mat identity = gk.c0.estimate + gk.e_tilde.estimate + gk.e_tilde.estimate.transpose();
  CHECK((gk.sigma_tilde.estimate - identity).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gk.e_const.estimate - gk.e_tilde.estimate - gk.h_correction.estimate)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(gk.sigma_tilde.target(0, 0) == 1.0);
  CHECK(gk.e_const.target(0, 0) == 0.5);
  CHECK(gk.tail_bound == doctest::Approx(targets::v_corr(1.0, 2, 15)));
  CHECK_FALSE(gk.tail_warning);
  CHECK(diagonal_within(gk.sigma_tilde, 3.0));
  CHECK(diagonal_within(gk.e_const, 3.0));

  CHECK_THROWS_AS(stationary::green_kubo_constants(ens, 10), Error);
  CHECK_THROWS_AS(stationary::green_kubo_constants(ens, 20), Error);
}
