#include "thermolab/path.hpp"

#include <algorithm>

#include "thermolab/error.hpp"

namespace thermolab {

PiecewiseLinearPath::PiecewiseLinearPath(int dim, double start_time, const Vec& start_value)
    : dim_(dim) {
  require(dim >= 1, ErrorKind::invalid_dimension, "path dimension must be >= 1");
  require(start_value.size() == dim, ErrorKind::invalid_dimension, "start value has wrong size");
  knots_.push_back(start_time);
  values_.assign(start_value.data(), start_value.data() + dim);
}

void PiecewiseLinearPath::append(double time, const Vec& slope) {
  require(slope.size() == dim_, ErrorKind::invalid_dimension, "slope has wrong size");
  const double last = knots_.back();
  require(time >= last, ErrorKind::invalid_parameter, "knots must be nondecreasing");
  if (time == last) return;
  const double dt = time - last;
  const std::size_t base = values_.size() - dim_;
  for (int i = 0; i < dim_; ++i) values_.push_back(values_[base + i] + dt * slope[i]);
  slopes_.insert(slopes_.end(), slope.data(), slope.data() + dim_);
  knots_.push_back(time);
}

std::size_t PiecewiseLinearPath::segment_index(double t) const {
  require(t >= knots_.front() && t <= knots_.back(), ErrorKind::insufficient_data,
          "time outside path domain");
  require(segment_count() > 0, ErrorKind::insufficient_data, "path has no segments");
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, segment_count() - 1);
}

Vec PiecewiseLinearPath::value(double t) const {
  if (segment_count() == 0) {
    require(t == knots_.front(), ErrorKind::insufficient_data, "time outside path domain");
    return value_at_knot(0);
  }
  const std::size_t seg = segment_index(t);
  return value_at_knot(seg) + (t - knots_[seg]) * slope(seg);
}

PiecewiseLinearPath PiecewiseLinearPath::rescaled(double time_scale, double value_scale) const {
  require(time_scale > 0.0, ErrorKind::invalid_parameter, "time scale must be positive");
  PiecewiseLinearPath out(dim_, knots_.front() * time_scale, value_scale * value_at_knot(0));
  const double slope_scale = value_scale / time_scale;
  out.knots_.reserve(knots_.size());
  for (std::size_t s = 0; s < segment_count(); ++s) {
    const double t = knots_[s + 1] * time_scale;
    Vec v = value_scale * value_at_knot(s + 1);
    Vec sl = slope_scale * slope(s);
    // Direct assignment keeps the rescaled knot values exact images of the
    // original ones instead of re-accumulating them.
    out.knots_.push_back(t);
    out.values_.insert(out.values_.end(), v.data(), v.data() + dim_);
    out.slopes_.insert(out.slopes_.end(), sl.data(), sl.data() + dim_);
  }
  return out;
}

PiecewiseLinearPath PiecewiseLinearPath::truncated(double t_end) const {
  require(t_end >= knots_.front(), ErrorKind::invalid_parameter, "truncation before path start");
  require(t_end <= knots_.back(), ErrorKind::insufficient_data,
          "requested horizon exceeds the path domain");
  PiecewiseLinearPath out(dim_, knots_.front(), value_at_knot(0));
  for (std::size_t s = 0; s < segment_count() && knots_[s] < t_end; ++s) {
    const double t = std::min(knots_[s + 1], t_end);
    if (t == knots_[s + 1]) {
      Vec v = value_at_knot(s + 1);
      Vec sl = slope(s);
      out.knots_.push_back(t);
      out.values_.insert(out.values_.end(), v.data(), v.data() + dim_);
      out.slopes_.insert(out.slopes_.end(), sl.data(), sl.data() + dim_);
    } else {
      out.append(t, slope(s));
    }
  }
  return out;
}

}  // namespace thermolab
