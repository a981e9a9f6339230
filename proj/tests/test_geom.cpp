#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "thermolab/error.hpp"
#include "thermolab/geom.hpp"
#include "thermolab/rng.hpp"
#include "thermolab/stats.hpp"

using namespace thermolab;

namespace {

double planar_angle(const Mat& r) {
  const double a = std::atan2(r(1, 0), r(0, 0));
  return a < 0 ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    any_diff = any_diff || x != c.normal();
  }
  CHECK(any_diff);
  CHECK(stream_id(1, 5) != stream_id(2, 5));
  CHECK(stream_id(0, 5) == 5);
}

TEST_CASE("neighbouring streams are uncorrelated") {
  const int n = 100000;
  stats::MomentAccumulator prod;
  RngStream a(3, 0), b(3, 1);
  for (int i = 0; i < n; ++i) prod.add(a.normal() * b.normal());
  CHECK(std::abs(prod.mean()) < 3.0 * prod.std_error());
}

TEST_CASE("exponential waiting times have the requested mean") {
  RngStream rng(5, 0);
  stats::MomentAccumulator acc;
  for (int i = 0; i < 100000; ++i) acc.add(rng.exponential(2.0));
  CHECK(std::abs(acc.mean() - 0.5) < 3.0 * acc.std_error());
  CHECK_THROWS_AS(rng.exponential(0.0), Error);
}

TEST_CASE("haar rotations are in SO(d)") {
  RngStream rng(1, 0);
  for (int d : {2, 3, 5, 8}) {
    for (int i = 0; i < 200; ++i) {
      const auto r = geom::sample_haar_rotation(d, rng);
      CHECK(geom::orthogonality_defect(r.matrix()) < 1e-12);
      CHECK(std::abs(r.matrix().determinant() - 1.0) < 1e-12);
    }
  }
  CHECK_THROWS_AS(geom::sample_haar_rotation(1, rng), Error);
}

TEST_CASE("rotation constructor rejects non-rotations") {
  Mat reflect = Mat::Identity(2, 2);
  reflect(1, 1) = -1.0;
  CHECK_THROWS_AS(geom::Rotation{reflect}, Error);
  Mat skewed = Mat::Identity(2, 2);
  skewed(0, 1) = 1e-6;
  CHECK_THROWS_AS(geom::Rotation{skewed}, Error);
  CHECK_NOTHROW(geom::Rotation{geom::Rotation::planar(3, 0.3).matrix()});
}

TEST_CASE("d=2 haar angle is uniform by quartile") {
  RngStream rng(2, 0);
  const int n = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) {
    const double a = planar_angle(geom::sample_haar_rotation(2, rng).matrix());
    ++counts[std::min(3, static_cast<int>(a / (std::numbers::pi / 2)))];
  }
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) < 0.01);
}

TEST_CASE("d=3 haar image of a fixed vector has zero mean") {
  RngStream rng(3, 0);
  Vec n_hat = Vec::Zero(3);
  n_hat(0) = 1.0;
  stats::MatrixAccumulator acc(3, 1);
  for (int i = 0; i < 100000; ++i) acc.add(geom::sample_haar_rotation(3, rng).matrix() * n_hat);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(acc.mean()(j, 0)) < 3.0 * acc.std_error()(j, 0));
}

TEST_CASE("haar law is invariant under left multiplication") {
  RngStream a(4, 0), b(4, 1);
  const Mat q = geom::Rotation::planar(2, 1.1).matrix();
  std::vector<double> plain, rotated;
  for (int i = 0; i < 100000; ++i) {
    plain.push_back(planar_angle(geom::sample_haar_rotation(2, a).matrix()));
    rotated.push_back(planar_angle(q * geom::sample_haar_rotation(2, b).matrix()));
  }
  CHECK_FALSE(stats::ks_two_sample(plain, rotated).reject_01());
}

TEST_CASE("unit directions") {
  RngStream rng(6, 0);
  for (int d : {1, 2, 3, 7})
    for (int i = 0; i < 1000; ++i)
      CHECK(std::abs(geom::sample_unit_direction(d, rng).norm() - 1.0) < 1e-14);

  stats::MatrixAccumulator mean2(2, 1);
  for (int i = 0; i < 100000; ++i) mean2.add(geom::sample_unit_direction(2, rng));
  for (int j = 0; j < 2; ++j) CHECK(std::abs(mean2.mean()(j, 0)) < 3.0 * mean2.std_error()(j, 0));

  const Mat q = geom::Rotation::planar(3, 0.7).matrix();
  stats::MomentAccumulator sq, sq_rot;
  stats::MatrixAccumulator mean_rot(3, 1);
  for (int i = 0; i < 100000; ++i) {
    const Vec v = geom::sample_unit_direction(3, rng);
    const Vec w = q * v;
    sq.add(v(0) * v(0));
    sq_rot.add(w(0) * w(0));
    mean_rot.add(w);
  }
  CHECK(std::abs(sq.mean() - 1.0 / 3.0) < 3.0 * sq.std_error());
  CHECK(std::abs(sq_rot.mean() - 1.0 / 3.0) < 3.0 * sq_rot.std_error());
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(mean_rot.mean()(j, 0)) < 3.0 * mean_rot.std_error()(j, 0));
}

TEST_CASE("project_to_sphere") {
  Vec x(2);
  x << 2.0, 0.0;
  const Vec y = geom::project_to_sphere(x, 1.0);
  CHECK(y(0) == 1.0);
  CHECK(y(1) == 0.0);

  Vec on(2);
  on << 0.6, 0.8;
  const Vec same = geom::project_to_sphere(on, 1.0);
  CHECK((same - on).cwiseAbs().maxCoeff() < 1e-16);

  RngStream rng(7, 0);
  for (int i = 0; i < 1000; ++i) {
    Vec z(6);
    for (int j = 0; j < 6; ++j) z(j) = 3.0 * rng.normal();
    const Vec p = geom::project_to_sphere(z, 2.5);
    CHECK(std::abs(p.squaredNorm() - 2.5) / 2.5 < 1e-14);
    const Vec pp = geom::project_to_sphere(p, 2.5);
    CHECK((pp - p).cwiseAbs().maxCoeff() < 1e-15);
  }

  CHECK_THROWS_AS(geom::project_to_sphere(Vec::Zero(3), 1.0), Error);
  CHECK_THROWS_AS(geom::project_to_sphere(on, 0.0), Error);
}

TEST_CASE("energy sphere spec") {
  geom::EnergySphereSpec spec{2, 2, 2.0};
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.state_dim() == 4);
  Vec p = Vec::Ones(4) / std::sqrt(2.0);
  CHECK(spec.validates(p));
  p(0) *= 1.0 + 1e-8;
  CHECK_FALSE(spec.validates(p));
  CHECK_FALSE(spec.validates(Vec::Ones(3)));
  CHECK_THROWS_AS((geom::EnergySphereSpec{0, 2, 1.0}.validate()), Error);
  CHECK_THROWS_AS((geom::EnergySphereSpec{1, 0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((geom::EnergySphereSpec{1, 2, -1.0}.validate()), Error);
}

TEST_CASE("rotation_between maps from onto to") {
  RngStream rng(8, 0);
  for (int d : {2, 3, 4}) {
    for (int i = 0; i < 200; ++i) {
      const Vec a = geom::sample_unit_direction(d, rng);
      const Vec b = geom::sample_unit_direction(d, rng);
      const auto r = geom::rotation_between(a, b);
      CHECK((r.matrix() * a - b).norm() < 1e-12);
    }
    const Vec a = geom::sample_unit_direction(d, rng);
    CHECK((geom::rotation_between(a, -a).matrix() * a + a).norm() < 1e-12);
    CHECK((geom::rotation_between(a, a).matrix() - Mat::Identity(d, d)).norm() < 1e-12);
  }
}
