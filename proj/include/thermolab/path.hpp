#pragma once

#include <cstddef>
#include <vector>

#include "thermolab/geom.hpp"

namespace thermolab {

/// Continuous piecewise-linear path in R^m.
///
/// Stored as knots t_0 < ... < t_K with values X(t_i) and the constant slope
/// on each segment [t_i, t_{i+1}]. Slopes are kept explicitly (not recovered
/// from value differences) so short segments keep their exact direction.
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath(int dim, double start_time, const Vec& start_value);

  int dim() const noexcept { return dim_; }
  std::size_t knot_count() const noexcept { return knots_.size(); }
  std::size_t segment_count() const noexcept { return knots_.size() - 1; }
  double start_time() const noexcept { return knots_.front(); }
  double end_time() const noexcept { return knots_.back(); }
  const std::vector<double>& knots() const noexcept { return knots_; }

  Eigen::Map<const Vec> value_at_knot(std::size_t i) const {
    return Eigen::Map<const Vec>(values_.data() + i * dim_, dim_);
  }
  Eigen::Map<const Vec> slope(std::size_t segment) const {
    return Eigen::Map<const Vec>(slopes_.data() + segment * dim_, dim_);
  }

  /// Extends the path to `time` with constant `slope`. A zero-length step is
  /// ignored.
  void append(double time, const Vec& slope);

  /// Value at any t in [start, end] (linear interpolation).
  Vec value(double t) const;
  /// Index of the segment containing t (right-closed at the final knot).
  std::size_t segment_index(double t) const;

  /// Y(t) = value_scale * X(t / time_scale). With time_scale = eps^2 and
  /// value_scale = eps this is eps * Phi(t / eps^2).
  PiecewiseLinearPath rescaled(double time_scale, double value_scale) const;
  /// Restriction to [start, t_end], cutting the last segment if needed.
  PiecewiseLinearPath truncated(double t_end) const;

 private:
  int dim_;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace thermolab
