#pragma once

#include <cstddef>
#include <vector>

#include "thermolab/ensemble.hpp"
#include "thermolab/geom.hpp"
#include "thermolab/path.hpp"

namespace thermolab::rough {

/// A path X and its second-level iterated integral sampled on a time grid.
///
/// Level 1 is stored as X(t_0, t_i); level 2 both as the prefix
/// XX(t_0, t_i) and as the per-interval values XX(t_i, t_{i+1}), each
/// integrated directly from the underlying path. Increments between adjacent
/// grid points come from the per-interval table, all others from the prefix
/// through Chen's relation
///   XX(s, t) = XX(t_0, t) - XX(t_0, s) - X(t_0, s) (x) X(s, t).
/// Agreement of the two tables is what chen_defect measures.
class RoughPathGrid {
 public:
  RoughPathGrid(std::vector<double> times, int dim);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }

  /// X(t_i, t_j) for i <= j.
  Vec increment(std::size_t i, std::size_t j) const;
  /// XX(t_i, t_j) for i <= j.
  Mat level2(std::size_t i, std::size_t j) const;

  Eigen::Map<const Vec> anchored_level1(std::size_t i) const {
    return Eigen::Map<const Vec>(level1_.data() + i * dim_, dim_);
  }
  Eigen::Map<const Mat> anchored_level2(std::size_t i) const {
    return Eigen::Map<const Mat>(level2_.data() + i * dim_ * dim_, dim_, dim_);
  }
  Eigen::Map<const Mat> interval_level2(std::size_t i) const {
    return Eigen::Map<const Mat>(local2_.data() + i * dim_ * dim_, dim_, dim_);
  }
  // Mutable views, for building and for fault-injection tests.
  Eigen::Map<Vec> anchored_level1(std::size_t i) {
    return Eigen::Map<Vec>(level1_.data() + i * dim_, dim_);
  }
  Eigen::Map<Mat> anchored_level2(std::size_t i) {
    return Eigen::Map<Mat>(level2_.data() + i * dim_ * dim_, dim_, dim_);
  }
  Eigen::Map<Mat> interval_level2(std::size_t i) {
    return Eigen::Map<Mat>(local2_.data() + i * dim_ * dim_, dim_, dim_);
  }

  /// Largest |XX| entry among stored values, the scale for relative checks.
  double level2_scale() const;

 private:
  void check_pair(std::size_t i, std::size_t j) const;

  std::vector<double> times_;
  int dim_;
  std::vector<double> level1_;
  std::vector<double> level2_;
  std::vector<double> local2_;
};

struct HolderReport {
  double alpha = 0.0;
  double seminorm_level1 = 0.0;  // sup |X(s,t)| / |t-s|^alpha
  double seminorm_level2 = 0.0;  // sup |XX(s,t)| / |t-s|^(2 alpha), Frobenius norm
  double norm = 0.0;             // seminorm_level1 + sqrt(seminorm_level2)
  std::size_t grid_points = 0;
  std::size_t pairs_evaluated = 0;
  bool exhaustive = true;  // false: dyadic-gap subsample (grids above the pair limit)
};

/// Exact canonical lift of a piecewise-linear path on `grid` (sorted, within
/// the path's domain). Each linear piece from a to b adds
/// (a - X(s)) (x) (b - a) + (b - a) (x) (b - a) / 2.
RoughPathGrid canonical_lift(const PiecewiseLinearPath& path, const std::vector<double>& grid);

/// XX(s,t) - XX(s,u) - XX(u,t) - X(s,u) (x) X(u,t) for grid indices s <= u <= t.
Mat chen_defect(const RoughPathGrid& rp, std::size_t s, std::size_t u, std::size_t t);

/// Largest Chen defect over all triples with adjacent legs plus `random_triples`
/// random ones (deterministic given seed), as a max-abs entry.
double max_chen_defect(const RoughPathGrid& rp, std::size_t random_triples, std::uint64_t seed);

inline constexpr std::size_t kExhaustivePairLimit = 10'000;

/// Hoelder seminorms over grid pairs: all pairs up to kExhaustivePairLimit
/// points, dyadic gaps beyond. A grid sup is a lower bound on the true one.
HolderReport holder_norms(const RoughPathGrid& rp, double alpha,
                          Execution exec = Execution::parallel);

/// Coefficient map for du = A(u) dW, evaluated as a matrix-vector product.
class CoefficientMap {
 public:
  virtual ~CoefficientMap() = default;
  virtual void apply(const Vec& y, const Vec& w, Vec& out) const = 0;
  /// Post-step correction (e.g. projection onto an invariant manifold).
  virtual void retract(Vec&) const {}
  virtual void check_initial(const Vec&) const {}
};

/// A(u) = I - u u^T / U on the sphere |u|^2 = U.
class SphereTangentMap final : public CoefficientMap {
 public:
  explicit SphereTangentMap(double total_energy);
  void apply(const Vec& y, const Vec& w, Vec& out) const override;
  void retract(Vec& y) const override;
  void check_initial(const Vec& y) const override;

 private:
  double total_energy_;
};

/// A(a, b) = diag(1, a): y_1 follows x_1 and y_2 accumulates int y_1 dx_2.
class AreaAccumulatorMap final : public CoefficientMap {
 public:
  void apply(const Vec& y, const Vec& w, Vec& out) const override;
};

/// Solves du = A(u) dW along each linear piece of W with RK4 substeps of at
/// most `step`, followed by A's retraction. Returns u at `output_times`
/// (sorted, inside W's domain).
std::vector<Vec> solve_driven_ode(const CoefficientMap& map, const PiecewiseLinearPath& driver,
                                  const Vec& u0, double step,
                                  const std::vector<double>& output_times);

/// Piecewise-linear spiral eps (cos(t/eps^2), sin(t/eps^2)) on [0, 1].
PiecewiseLinearPath spiral_example(double epsilon, std::size_t segments);

struct SpiralReport {
  double epsilon = 0.0;
  std::size_t segments = 0;
  double sup_norm = 0.0;          // sup |x(t)| over knots
  double area_term = 0.0;         // y_2(1) = int_0^1 x_1 dx_2 with y(0) = x(0)
  double area_term_exact = 0.0;   // 1/2 + eps^2 sin(2/eps^2) / 4
  double antisymmetric = 0.0;     // XX_12(0,1) - XX_21(0,1)
  double antisymmetric_exact = 0.0;  // 1 - eps^2 sin(1/eps^2)
};

/// Drives the area system with the spiral and lifts it on {0, 1}.
SpiralReport spiral_report(double epsilon, std::size_t segments);

}  // namespace thermolab::rough
