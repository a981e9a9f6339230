#include "thermolab/geom.hpp"

#include <cmath>
#include <string>

#include "thermolab/error.hpp"

namespace thermolab::geom {

namespace {

constexpr double kRotationTolerance = 1e-12;

}  // namespace

Rotation::Rotation(Mat matrix) : matrix_(std::move(matrix)) {
  require(matrix_.rows() == matrix_.cols() && matrix_.rows() >= 1, ErrorKind::invalid_dimension,
          "rotation matrix must be square");
  require(orthogonality_defect(matrix_) < kRotationTolerance, ErrorKind::invalid_parameter,
          "matrix is not orthogonal");
  require(std::abs(matrix_.determinant() - 1.0) < kRotationTolerance, ErrorKind::invalid_parameter,
          "matrix does not have determinant +1");
}

Rotation Rotation::identity(int dim) {
  require(dim >= 1, ErrorKind::invalid_dimension, "dimension must be >= 1");
  return Rotation(Mat::Identity(dim, dim), Unchecked{});
}

Rotation Rotation::planar(int dim, double angle) {
  require(dim >= 2, ErrorKind::invalid_dimension, "planar rotation needs d >= 2");
  Mat m = Mat::Identity(dim, dim);
  m(0, 0) = std::cos(angle);
  m(0, 1) = -std::sin(angle);
  m(1, 0) = std::sin(angle);
  m(1, 1) = std::cos(angle);
  return Rotation(std::move(m), Unchecked{});
}

Rotation Rotation::operator*(const Rotation& other) const {
  require(dim() == other.dim(), ErrorKind::invalid_dimension, "rotation dimensions differ");
  return Rotation(matrix_ * other.matrix_, Unchecked{});
}

Rotation Rotation::transpose() const { return Rotation(matrix_.transpose(), Unchecked{}); }

double orthogonality_defect(const Mat& m) {
  return (m.transpose() * m - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

Rotation sample_haar_rotation(int dim, RngStream& rng) {
  require(dim >= 2, ErrorKind::invalid_dimension,
          "Haar rotation needs d >= 2, got " + std::to_string(dim));
  Mat gauss(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) gauss(i, j) = rng.normal();

  Eigen::HouseholderQR<Mat> qr(gauss);
  Mat q = qr.householderQ();
  const Mat& r = qr.matrixQR();
  // Q diag(sign r_ii) is Haar on O(d).
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  // Right-multiplying the det = -1 coset by a reflection maps it onto SO(d)
  // and preserves the Haar law.
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return Rotation(std::move(q), Rotation::Unchecked{});
}

Vec sample_unit_direction(int dim, RngStream& rng) {
  require(dim >= 1, ErrorKind::invalid_dimension, "dimension must be >= 1");
  Vec v(dim);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  v /= std::sqrt(norm2);
  return v;
}

void project_to_sphere_inplace(Eigen::Ref<Vec> x, double total_energy) {
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
  const double norm2 = x.squaredNorm();
  require(norm2 > 0.0 && std::isfinite(norm2), ErrorKind::degenerate_state,
          "cannot project the zero vector onto the energy sphere");
  x *= std::sqrt(total_energy / norm2);
}

Vec project_to_sphere(const Vec& x, double total_energy) {
  Vec out = x;
  project_to_sphere_inplace(out, total_energy);
  return out;
}

void EnergySphereSpec::validate() const {
  require(n_particles >= 1, ErrorKind::invalid_parameter, "need at least one particle");
  require(dim >= 1, ErrorKind::invalid_dimension, "dimension must be >= 1");
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
}

bool EnergySphereSpec::validates(const Vec& x) const {
  if (x.size() != state_dim()) return false;
  return std::abs(x.squaredNorm() - total_energy) <= 1e-10 * total_energy;
}

Rotation rotation_between(const Vec& from, const Vec& to) {
  const auto d = from.size();
  require(d >= 2 && to.size() == d, ErrorKind::invalid_dimension,
          "rotation_between needs two vectors of equal dimension >= 2");
  require(std::abs(from.norm() - 1.0) < 1e-12 && std::abs(to.norm() - 1.0) < 1e-12,
          ErrorKind::invalid_parameter, "rotation_between needs unit vectors");

  const double c = from.dot(to);
  Vec w = to - c * from;
  const double s = w.norm();
  Mat m = Mat::Identity(d, d);
  Vec e2;
  if (s > 1e-14) {
    e2 = w / s;
  } else if (c > 0.0) {
    return Rotation::identity(static_cast<int>(d));
  } else {
    // Antipodal: half-turn in the plane of `from` and the coordinate axis
    // least aligned with it.
    Eigen::Index axis = 0;
    from.cwiseAbs().minCoeff(&axis);
    e2 = Vec::Unit(d, axis) - from[axis] * from;
    e2.normalize();
  }
  m += (c - 1.0) * (from * from.transpose() + e2 * e2.transpose()) +
       s * (e2 * from.transpose() - from * e2.transpose());
  return Rotation(std::move(m));
}

}  // namespace thermolab::geom
