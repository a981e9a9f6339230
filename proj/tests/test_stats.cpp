#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "thermolab/error.hpp"
#include "thermolab/rng.hpp"
#include "thermolab/stats.hpp"

using namespace thermolab;

namespace {

std::vector<double> normals(std::uint64_t stream, std::size_t n, double shift = 0.0) {
  RngStream rng(99, stream);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal() + shift;
  return x;
}

// Brute-force sup |F_a - F_b| over the pooled sample.
double ks_by_counting(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  auto cdf = [](const std::vector<double>& s, double x) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= x; })) /
           static_cast<double>(s.size());
  };
  for (const auto* s : {&a, &b})
    for (double x : *s) d = std::max(d, std::abs(cdf(a, x) - cdf(b, x)));
  return d;
}

}  // namespace

TEST_CASE("moment accumulator") {
  const auto x = normals(0, 3001, 2.0);
  stats::MomentAccumulator all, a, b, c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all.add(x[i]);
    (i < 1000 ? a : i < 2200 ? b : c).add(x[i]);
  }
  auto left = a;
  left.merge(b);
  left.merge(c);
  auto bc = b;
  bc.merge(c);
  auto right = a;
  right.merge(bc);
  for (const auto* m : {&left, &right}) {
    CHECK(m->count() == all.count());
    CHECK(std::abs(m->mean() - all.mean()) < 1e-12);
    CHECK(std::abs(m->m2() - all.m2()) < 1e-12 * all.m2());
  }

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  CHECK(std::abs(all.variance() - ss / (x.size() - 1)) < 1e-12);

  stats::MomentAccumulator empty, one;
  one.add(3.0);
  CHECK(one.variance() == 0.0);
  auto merged = empty;
  merged.merge(one);
  CHECK(merged.mean() == 3.0);
  one.merge(empty);
  CHECK(one.count() == 1);
}

TEST_CASE("matrix accumulator") {
  RngStream rng(1, 0);
  stats::MatrixAccumulator all(2, 3), a(2, 3), b(2, 3);
  for (int i = 0; i < 500; ++i) {
    Mat m(2, 3);
    for (int j = 0; j < 6; ++j) m(j % 2, j / 2) = rng.normal() + j;
    all.add(m);
    (i % 3 == 0 ? a : b).add(m);
  }
  a.merge(b);
  CHECK((a.mean() - all.mean()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.m2() - all.m2()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((all.std_error().array() > 0.0).all());
  CHECK_THROWS_AS(all.add(Mat::Zero(3, 2)), Error);
  stats::MatrixAccumulator lazy;
  lazy.add(Mat::Ones(2, 2));
  CHECK(lazy.count() == 1);
}

TEST_CASE("correlation estimate") {
  stats::MatrixAccumulator acc(1, 2);
  RngStream rng(2, 0);
  for (int i = 0; i < 50; ++i) acc.add(Mat::Constant(1, 2, rng.normal()));
  auto e = stats::make_estimate(acc, Mat::Zero(1, 2), "zero", 1.5);
  CHECK(e.low_power);
  CHECK(e.sample_count == 50);
  CHECK(e.lag == 1.5);
  CHECK((e.std_error.array() > 0.0).all());
  CHECK(e.formula_id == "zero");

  stats::CorrelationEstimate exact;
  exact.estimate = Mat::Ones(1, 2);
  exact.target = Mat::Ones(1, 2);
  exact.std_error = Mat::Zero(1, 2);
  CHECK(exact.z_scores().cwiseAbs().maxCoeff() == 0.0);
  CHECK(exact.within(3.0));
  exact.estimate(0, 1) = 1.5;
  CHECK(std::isinf(exact.z_scores()(0, 1)));
  CHECK_FALSE(exact.within(3.0));
  CHECK_THROWS_AS(stats::make_estimate(acc, Mat::Zero(2, 2), "bad"), Error);
}

TEST_CASE("kolmogorov survival against reference values") {
  CHECK(stats::kolmogorov_survival(0.0) == 1.0);
  CHECK(stats::kolmogorov_survival(0.3) == doctest::Approx(0.9999906941986655).epsilon(1e-12));
  CHECK(stats::kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(stats::kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(stats::kolmogorov_survival(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-10));
  // The survival function at the critical constants returns the level.
  CHECK(stats::kolmogorov_survival(1.3581015157406195) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(stats::kolmogorov_survival(1.6276236307187293) == doctest::Approx(0.01).epsilon(1e-4));
}

TEST_CASE("ks critical values") {
  CHECK(stats::ks_critical_value(0.05, 100, 100) ==
        doctest::Approx(1.3581015157406195 * std::sqrt(0.02)).epsilon(1e-14));
  CHECK(stats::ks_critical_value(0.01, 400, 100) ==
        doctest::Approx(1.6276236307187293 * std::sqrt(500.0 / 40000.0)).epsilon(1e-14));
  CHECK_THROWS_AS(stats::ks_critical_value(0.0, 10, 10), Error);
}

TEST_CASE("ks statistic") {
  const auto a = normals(1, 300), b = normals(2, 200, 0.3);
  const auto r = stats::ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(ks_by_counting(a, b)).epsilon(1e-12));
  CHECK(r.n == 300);
  CHECK(r.m == 200);
  CHECK(stats::ks_two_sample(a, a).statistic == 0.0);

  std::vector<double> ties(100, 1.0), ties2(100, 1.0);
  ties2[0] = 0.0;
  CHECK(stats::ks_two_sample(ties, ties2).statistic == doctest::Approx(0.01));

  CHECK_THROWS_AS(stats::ks_two_sample({}, a), Error);
  CHECK_THROWS_AS(stats::ks_two_sample(normals(3, 49), a), Error);
}

TEST_CASE("ks null calibration and power") {
  int reject01 = 0, reject05 = 0;
  const int runs = 400;
  for (int i = 0; i < runs; ++i) {
    const auto r = stats::ks_two_sample(normals(1000 + 2 * i, 10000), normals(1001 + 2 * i, 10000));
    reject01 += r.reject_01();
    reject05 += r.reject_05();
  }
  CHECK(reject01 <= runs / 40);
  CHECK(reject05 <= runs / 10);
  CHECK(reject05 >= 5);

  const auto shifted = stats::ks_two_sample(normals(5, 10000), normals(6, 10000, 0.5));
  CHECK(shifted.reject_01());
  CHECK(shifted.p_value < 1e-10);
}

TEST_CASE("line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto f = stats::fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.5));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.slope_se < 1e-12);
  CHECK_THROWS_AS(stats::fit_line({1.0, 1.0}, {0.0, 1.0}), Error);
}

TEST_CASE("moment scaling fit on exact Brownian increments") {
  const std::vector<double> gaps{0.01, 0.03, 0.1, 0.3, 1.0, 3.0};
  std::vector<std::vector<double>> level1, level2;
  RngStream rng(7, 0);
  for (double g : gaps) {
    std::vector<double> m1, m2;
    for (int i = 0; i < 20000; ++i) {
      const double z1 = rng.normal(), z2 = rng.normal();
      m1.push_back(std::sqrt(g) * std::abs(z1));
      m2.push_back(g * std::abs(z1 * z2));
    }
    level1.push_back(std::move(m1));
    level2.push_back(std::move(m2));
  }
  const auto f1 = stats::moment_scaling_fit(gaps, level1, 4.0, 1);
  CHECK(f1.norm_order == 8.0);
  CHECK(std::abs(f1.slope - 0.5) < 0.02);
  const auto f2 = stats::moment_scaling_fit(gaps, level2, 4.0, 2);
  CHECK(f2.norm_order == 4.0);
  CHECK(std::abs(f2.slope - 1.0) < 0.02);

  CHECK_THROWS_AS(stats::moment_scaling_fit(gaps, level1, 3.0, 1), Error);
  CHECK_THROWS_AS(stats::moment_scaling_fit(gaps, level1, 4.0, 3), Error);
  const std::vector<double> narrow{0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
  CHECK_THROWS_AS(stats::moment_scaling_fit(narrow, level1, 4.0, 1), Error);
  const std::vector<double> four(gaps.begin(), gaps.begin() + 4);
  const std::vector<std::vector<double>> four_m(level1.begin(), level1.begin() + 4);
  CHECK_THROWS_AS(stats::moment_scaling_fit(four, four_m, 4.0, 1), Error);
}

TEST_CASE("raw moments") {
  const auto m = stats::raw_moments({1.0, 2.0, 3.0});
  CHECK(m.value[0] == doctest::Approx(2.0));
  CHECK(m.value[1] == doctest::Approx(14.0 / 3));
  CHECK(m.value[2] == doctest::Approx(12.0));
  CHECK(m.value[3] == doctest::Approx(98.0 / 3));
  CHECK(m.std_error[0] == doctest::Approx(1.0 / std::sqrt(3.0)));
}
