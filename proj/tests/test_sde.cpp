#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "thermolab/error.hpp"
#include "thermolab/sde_limit.hpp"
#include "thermolab/stats.hpp"

using namespace thermolab;
using sde::SdeConfig;
using sde::SdeModel;

namespace {

SdeConfig config(SdeModel model, int n, int d, double t_final, double step) {
  SdeConfig c;
  c.model = model;
  c.n_particles = n;
  c.dim = d;
  c.total_energy = static_cast<double>(n);
  c.t_final = t_final;
  c.step = step;
  return c;
}

}  // namespace

TEST_CASE("model names") {
  for (auto m : {SdeModel::strat_sphere, SdeModel::ito_speed, SdeModel::ou})
    CHECK(sde::parse_model(sde::to_string(m)) == m);
  try {
    sde::parse_model("langevin");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_model);
  }
}

TEST_CASE("config validation") {
  auto c = config(SdeModel::ito_speed, 2, 1, 1.0, 0.01);
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_model);
  }

  c = config(SdeModel::strat_sphere, 2, 2, 1.0, 0.01);
  CHECK_NOTHROW(c.validate());
  CHECK(c.delta() == 1.0);
  c.collision_rate = 4.0;
  CHECK(c.delta() == 0.25);
  CHECK(c.variance_rate() == 0.25);
  c.noise = sde::NoiseConvention::unit;
  CHECK(c.variance_rate() == 1.0);
  c.initial = Vec::Ones(4);
  CHECK_THROWS_AS(c.validate(), Error);

  c = config(SdeModel::ito_speed, 2, 2, 1.0, 0.01);
  c.initial = Vec(2);
  c.initial << std::sqrt(2.0), 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.initial << 1.0, 1.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("brownian increments") {
  RngStream rng(1, 0);
  CHECK(sde::brownian_increments(3, 0.0, 0.5, rng).norm() == 0.0);
  CHECK_THROWS_AS(sde::brownian_increments(3, 1.0, 0.0, rng), Error);

  stats::MomentAccumulator var0, var1, cross;
  for (int i = 0; i < 1'000'000; ++i) {
    const Vec dw = sde::brownian_increments(2, 1.0, 0.01, rng);
    var0.add(dw(0) * dw(0));
    var1.add(dw(1) * dw(1));
    cross.add(dw(0) * dw(1));
  }
  CHECK(std::abs(var0.mean() - 0.01) < 3.0 * var0.std_error());
  CHECK(std::abs(var1.mean() - 0.01) < 3.0 * var1.std_error());
  CHECK(std::abs(cross.mean()) < 3.0 * cross.std_error());
}

TEST_CASE("grid is uniform and thinned by record_every") {
  RngStream rng(2, 0);
  auto c = config(SdeModel::ou, 1, 1, 1.0, 0.01);
  c.record_every = 10;
  const auto s = sde::ou_solve(c, rng);
  REQUIRE(s.size() == 11);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.times[i] == doctest::Approx(0.1 * i));
  c.step = 0.3;
  c.record_every = 1;
  CHECK(c.step_count() == 4);
  CHECK(c.effective_step() == doctest::Approx(0.25));
}

TEST_CASE("sphere solver keeps the energy") {
  RngStream rng(3, 0);
  auto c = config(SdeModel::strat_sphere, 3, 2, 5.0, 0.01);
  const auto s = sde::strat_sphere_solve(c, rng);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s.at(i).squaredNorm() - 3.0) < 1e-12);

  sde::StratSphereStepper stepper(6, 3.0);
  Vec u = s.final_value();
  const Vec before = u;
  stepper.step(u, Vec::Zero(6));
  CHECK((u - before).norm() < 1e-15);
}

TEST_CASE("sphere stepper is rotation equivariant") {
  RngStream rng(4, 0);
  const Mat q = geom::sample_haar_rotation(4, rng).matrix();
  sde::StratSphereStepper a(4, 2.0), b(4, 2.0);
  Vec u = Vec::Ones(4) / std::sqrt(2.0);
  Vec v = q * u;
  for (int i = 0; i < 1000; ++i) {
    const Vec dw = sde::brownian_increments(4, 1.0, 0.01, rng);
    a.step(u, dw);
    b.step(v, q * dw);
  }
  CHECK((q * u - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sphere law is rotation invariant in moments") {
  auto c = config(SdeModel::strat_sphere, 2, 2, 1.0, 0.01);
  const Mat q = [] {
    Mat m = Mat::Zero(4, 4);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    m(2, 3) = 1.0;
    m(3, 2) = -1.0;
    return m;
  }();
  auto rotated = c;
  rotated.initial = q * c.initial_state();
  stats::MatrixAccumulator plain(4, 1), turned(4, 1);
  for (std::uint64_t i = 0; i < 5000; ++i) {
    RngStream r1(5, i), r2(6, i);
    plain.add(q * sde::strat_sphere_solve(c, r1).final_value());
    turned.add(sde::strat_sphere_solve(rotated, r2).final_value());
  }
  for (int j = 0; j < 4; ++j) {
    const double se = std::hypot(plain.std_error()(j, 0), turned.std_error()(j, 0));
    CHECK(std::abs(plain.mean()(j, 0) - turned.mean()(j, 0)) < 3.0 * se);
  }
}

TEST_CASE("single particle on the circle") {
  auto c = config(SdeModel::strat_sphere, 1, 2, 1.0, 0.01);
  stats::MomentAccumulator first, norm2;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RngStream rng(7, i);
    const auto u = sde::strat_sphere_solve(c, rng).final_value();
    first.add(u(0));
    norm2.add(u.squaredNorm());
  }
  CHECK(first.mean() < 1.0 - 10.0 * first.std_error());
  CHECK(first.mean() > 0.0);
  CHECK(std::abs(norm2.mean() - 1.0) < 1e-12);
}

TEST_CASE("speed solver") {
  RngStream rng(8, 0);
  auto c = config(SdeModel::ito_speed, 3, 2, 5.0, 0.005);
  c.total_energy = 3.0;
  const auto s = sde::ito_speed_solve(c, rng);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.at(i).squaredNorm() - 3.0) < 1e-12);
    CHECK((s.at(i).array() > 0.0).all());
  }

  for (int d : {2, 3, 5}) {
    auto one = config(SdeModel::ito_speed, 1, d, 3.0, 0.01);
    one.total_energy = 2.5;
    const auto p = sde::ito_speed_solve(one, rng);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.at(i)(0) == std::sqrt(2.5));
  }

  auto frozen = config(SdeModel::ito_speed, 2, 2, 1.0, 0.01);
  frozen.collision_rate = 1e12;
  const auto f = sde::ito_speed_solve(frozen, rng);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK((f.at(i) - f.at(0)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("speed solver agrees with sphere speeds") {
  auto ito = config(SdeModel::ito_speed, 2, 2, 5.0, 0.005);
  auto strat = config(SdeModel::strat_sphere, 2, 2, 5.0, 0.005);
  std::vector<double> a, b;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    RngStream r1(9, i), r2(10, i);
    a.push_back(sde::ito_speed_solve(ito, r1).final_value()(0));
    b.push_back(sde::block_norms(sde::strat_sphere_solve(strat, r2).final_value(), 2)(0));
  }
  CHECK_FALSE(stats::ks_two_sample(a, b).reject_01());
}

TEST_CASE("ou step is exact for any step size") {
  RngStream near(11, 0);
  CHECK(std::abs(sde::ou_exact_step(0.7, 1e-14, near) - 0.7) < 1e-6);
  const double horizon = 4.0;
  const double mean_target = std::exp(-0.5 * horizon);
  const double var_target = -std::expm1(-horizon);
  for (double h : {0.01, 0.5, 2.0}) {
    const int steps = static_cast<int>(std::lround(horizon / h));
    stats::MomentAccumulator x, dev2;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      RngStream rng(12, i);
      double v = 1.0;
      for (int s = 0; s < steps; ++s) v = sde::ou_exact_step(v, h, rng);
      x.add(v);
      dev2.add((v - mean_target) * (v - mean_target));
    }
    CHECK(std::abs(x.mean() - mean_target) < 3.0 * x.std_error());
    CHECK(std::abs(dev2.mean() - var_target) < 3.0 * dev2.std_error());
  }
}

TEST_CASE("ou stationary variance and autocorrelation") {
  auto c = config(SdeModel::ou, 1, 1, 20.0, 0.5);
  stats::MomentAccumulator sq, lag;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    RngStream rng(13, i);
    const auto s = sde::ou_solve(c, rng);
    const double x19 = s.at(s.size() - 3)(0), x20 = s.final_value()(0);
    sq.add(x20 * x20);
    lag.add(x19 * x20);
  }
  CHECK(std::abs(sq.mean() - 1.0) < 3.0 * sq.std_error());
  // From X(0) = 0: E X(19) X(20) = e^{-1/2} (1 - e^{-19}).
  CHECK(std::abs(lag.mean() - std::exp(-0.5) * -std::expm1(-19.0)) < 3.0 * lag.std_error());
}

TEST_CASE("block norms") {
  Vec u(6);
  u << 3, 4, 0, 0, 1, 0;
  const Vec n = sde::block_norms(u, 2);
  CHECK(n(0) == 5.0);
  CHECK(n(1) == 0.0);
  CHECK(n(2) == 1.0);
  CHECK_THROWS_AS(sde::block_norms(u, 4), Error);
}

TEST_CASE("projection experiment at small n") {
  const auto rep = sde::ou_projection_experiment(16, 2.0, 400, 14, 0.01, Execution::serial);
  CHECK(rep.paths == 400);
  CHECK(rep.ks_statistic >= 0.0);
  CHECK(rep.ks_critical_01 > rep.ks_critical_05);
  CHECK(rep.mean_sup_deviation > 0.0);
  CHECK(rep.sup_deviation_se > 0.0);
  CHECK(std::abs(rep.mean_u1_squared - 1.0) < 3.0 * rep.u1_squared_se);
  CHECK(rep.autocov_target == doctest::Approx(std::exp(-0.5 * rep.autocov_lag_time)));
  const auto par = sde::ou_projection_experiment(16, 2.0, 400, 14, 0.01, Execution::parallel);
  CHECK(par.mean_sup_deviation == rep.mean_sup_deviation);
  CHECK(par.ks_statistic == rep.ks_statistic);
  CHECK_THROWS_AS(sde::ou_projection_experiment(1, 2.0, 100, 1, 0.01), Error);
}
