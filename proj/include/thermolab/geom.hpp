#pragma once

#include <Eigen/Dense>

#include "thermolab/rng.hpp"

namespace thermolab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace geom {

/// Element of SO(d). Construction from a raw matrix checks orthogonality and
/// orientation to 1e-12.
class Rotation {
 public:
  explicit Rotation(Mat matrix);

  static Rotation identity(int dim);
  /// Rotation by `angle` in the (0, 1) coordinate plane.
  static Rotation planar(int dim, double angle);

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const noexcept { return matrix_; }

  Rotation operator*(const Rotation& other) const;
  Rotation transpose() const;

 private:
  struct Unchecked {};
  Rotation(Mat matrix, Unchecked) : matrix_(std::move(matrix)) {}
  friend Rotation sample_haar_rotation(int, RngStream&);

  Mat matrix_;
};

/// max |R^T R - I| entry.
double orthogonality_defect(const Mat& m);

/// Haar-uniform element of SO(d), d >= 2.
Rotation sample_haar_rotation(int dim, RngStream& rng);

/// Uniform point on the unit sphere S^{d-1}, d >= 1.
Vec sample_unit_direction(int dim, RngStream& rng);

/// Radial rescale of x onto the sphere |x|^2 = total_energy.
Vec project_to_sphere(const Vec& x, double total_energy);
void project_to_sphere_inplace(Eigen::Ref<Vec> x, double total_energy);

/// Shape of the energy sphere sum_k |p_k|^2 = U for N particles in d dims.
struct EnergySphereSpec {
  int n_particles = 1;
  int dim = 1;
  double total_energy = 1.0;

  void validate() const;
  int state_dim() const noexcept { return n_particles * dim; }
  /// True when x has length N*d and |x|^2 matches U to relative 1e-10.
  bool validates(const Vec& x) const;
};

/// Rotation in SO(d) taking `from` to `to` (both unit vectors), d >= 2.
/// Acts as the identity on the orthogonal complement of span{from, to}
/// except when from = -to, where it is a half-turn in a fixed plane.
Rotation rotation_between(const Vec& from, const Vec& to);

}  // namespace geom
}  // namespace thermolab
