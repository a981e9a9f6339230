#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thermolab/targets.hpp"

namespace tg = thermolab::targets;
using boost::math::quadrature::gauss_kronrod;

namespace {

double integrate(const auto& f, double a, double b) {
  return gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-14);
}

// Window covariance: double integral of e^{-lambda |t - s|} / d over
// s in [0, 1], t in [k, k + 1]; split at the kink for k = 0.
double window_cov(double lambda, int d, int k) {
  auto cov = [=](double t, double s) { return std::exp(-lambda * std::abs(t - s)) / d; };
  auto outer = [&](double s) {
    if (k == 0)
      return integrate([&](double t) { return cov(t, s); }, 0.0, s) +
             integrate([&](double t) { return cov(t, s); }, s, 1.0);
    return integrate([&](double t) { return cov(t, s); }, k, k + 1.0);
  };
  return integrate(outer, 0.0, 1.0);
}

// int_0^1 int_0^r e^{-lambda (r - t)} / d dt dr.
double correction(double lambda, int d) {
  return integrate(
      [&](double r) {
        return integrate([&](double t) { return std::exp(-lambda * (r - t)) / d; }, 0.0, r);
      },
      0.0, 1.0);
}

}  // namespace

TEST_CASE("window covariances against quadrature") {
  for (auto [lambda, d] : {std::pair{1.0, 2}, std::pair{2.5, 3}, std::pair{0.3, 5}})
    for (int k : {0, 1, 2, 3, 7})
      CHECK(tg::v_corr(lambda, d, k) ==
            doctest::Approx(window_cov(lambda, d, k)).epsilon(1e-10));
}

TEST_CASE("window covariances at reference parameters") {
  CHECK(window_cov(1.0, 2, 0) == doctest::Approx(0.3678794411714423).epsilon(1e-12));
  CHECK(window_cov(1.0, 2, 1) == doctest::Approx(0.19978820044686404).epsilon(1e-12));
  CHECK(window_cov(1.0, 2, 3) == doctest::Approx(0.02703839269480949).epsilon(1e-12));
  CHECK(window_cov(2.5, 3, 0) == doctest::Approx(0.1687557331865492).epsilon(1e-12));
  CHECK(tg::v_corr(1.0, 2, 0) == doctest::Approx(0.3678794411714423).epsilon(1e-14));
  CHECK(tg::v_corr(1.0, 2, 1) == doctest::Approx(0.19978820044686404).epsilon(1e-14));
  CHECK(tg::v_corr(2.5, 3, 3) == doctest::Approx(0.0003027828367227885).epsilon(1e-12));
}

TEST_CASE("green-kubo constants against summed window covariances") {
  for (auto [lambda, d] : {std::pair{1.0, 2}, std::pair{2.5, 3}, std::pair{0.7, 2}}) {
    double tail = 0.0;
    for (int k = 1; k <= 80; ++k) tail += window_cov(lambda, d, k);
    const double c0 = window_cov(lambda, d, 0);
    CHECK(tg::sigma_tilde(lambda, d) == doctest::Approx(c0 + 2.0 * tail).epsilon(1e-9));
    CHECK(tg::e_tilde(lambda, d) == doctest::Approx(tail).epsilon(1e-9));
    CHECK(tg::h_correction(lambda, d) == doctest::Approx(correction(lambda, d)).epsilon(1e-10));
    CHECK(tg::e_const(lambda, d) ==
          doctest::Approx(tail + correction(lambda, d)).epsilon(1e-9));
    // Stratonovich cancellation: E equals half of sigma tilde.
    CHECK(tg::e_const(lambda, d) == doctest::Approx(0.5 * tg::sigma_tilde(lambda, d)));
  }
  CHECK(correction(1.0, 2) == doctest::Approx(0.18393972058572114).epsilon(1e-12));
  CHECK(tg::sigma_tilde(1.0, 2) == 1.0);
  CHECK(tg::e_tilde(1.0, 2) == doctest::Approx(0.31606027941427883).epsilon(1e-14));
  CHECK(tg::e_const(1.0, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tg::delta(1.0, 2) == 1.0);
  CHECK(tg::delta(4.0, 2) == 0.25);
}

TEST_CASE("small rates stay accurate") {
  // expm1-based forms must not cancel for small lambda.
  const double lambda = 1e-4;
  const double series = 1.0 - lambda / 3.0 + lambda * lambda / 12.0;
  CHECK(tg::v_corr(lambda, 2, 0) == doctest::Approx(0.5 * series).epsilon(1e-10));
  CHECK(tg::h_correction(lambda, 2) == doctest::Approx(0.25 * series).epsilon(1e-10));
}

TEST_CASE("driver and limit-process targets") {
  CHECK(tg::psi_autocov(1.0, 2, 0.0) == 0.5);
  CHECK(tg::psi_autocov(1.0, 2, 1.0) == doctest::Approx(0.18393972058572117).epsilon(1e-14));
  CHECK(tg::psi_autocov(2.0, 3, -0.5) == doctest::Approx(std::exp(-1.0) / 3.0));
  CHECK(tg::psi_second_moment(3) == doctest::Approx(1.0 / 3.0));
  CHECK(tg::conditional_decay_factor(1.0, 1.0) == doctest::Approx(0.36787944117144233));
  CHECK(tg::conditional_decay_factor(2.0, 1.0) == doctest::Approx(0.1353352832366127));
  CHECK(tg::conditional_decay_factor(2.0, 0.0) == 1.0);
  CHECK(tg::ou_stationary_variance() == 1.0);
  CHECK(tg::ou_autocorr(1.0) == doctest::Approx(0.6065306597126334));
  CHECK(tg::sphere_second_moment(2.0, 2, 2) == 0.5);
  CHECK(tg::sphere_second_moment(6.0, 3, 4) == 0.5);
}

TEST_CASE("spiral targets against quadrature") {
  for (double eps : {0.3, 0.1, 0.05}) {
    const double f = 1.0 / (eps * eps);
    const double area = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return std::pow(std::cos(f * t), 2); }, 0.0, 1.0, 20, 1e-14);
    CHECK(tg::spiral_area_term(eps) == doctest::Approx(area).epsilon(1e-10));
    const double anti = gauss_kronrod<double, 61>::integrate(
        [&](double t) {
          const double x1 = eps * std::cos(f * t) - eps, x2 = eps * std::sin(f * t);
          return x1 * eps * f * std::cos(f * t) + x2 * eps * f * std::sin(f * t);
        },
        0.0, 1.0, 20, 1e-14);
    CHECK(tg::spiral_antisymmetric(eps) == doctest::Approx(anti).epsilon(1e-10));
  }
}
