#include "thermolab/rough_lift.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "thermolab/error.hpp"

namespace thermolab::rough {

RoughPathGrid::RoughPathGrid(std::vector<double> times, int dim)
    : times_(std::move(times)), dim_(dim) {
  require(dim >= 1, ErrorKind::invalid_dimension, "rough path dimension must be >= 1");
  require(!times_.empty(), ErrorKind::insufficient_data, "rough path grid is empty");
  require(std::is_sorted(times_.begin(), times_.end()) &&
              std::adjacent_find(times_.begin(), times_.end()) == times_.end(),
          ErrorKind::grid_mismatch, "grid times must be strictly increasing");
  const std::size_t n = times_.size();
  level1_.assign(n * dim_, 0.0);
  level2_.assign(n * dim_ * dim_, 0.0);
  local2_.assign((n - 1) * dim_ * dim_, 0.0);
}

void RoughPathGrid::check_pair(std::size_t i, std::size_t j) const {
  require(i <= j && j < times_.size(), ErrorKind::grid_mismatch,
          "increments need grid indices i <= j inside the grid");
}

Vec RoughPathGrid::increment(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  return anchored_level1(j) - anchored_level1(i);
}

Mat RoughPathGrid::level2(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  if (i == j) return Mat::Zero(dim_, dim_);
  if (j == i + 1) return interval_level2(i);
  const auto xi = anchored_level1(i);
  return anchored_level2(j) - anchored_level2(i) - xi * (anchored_level1(j) - xi).transpose();
}

double RoughPathGrid::level2_scale() const {
  double scale = 0.0;
  for (double v : level2_) scale = std::max(scale, std::abs(v));
  for (double v : local2_) scale = std::max(scale, std::abs(v));
  return scale;
}

RoughPathGrid canonical_lift(const PiecewiseLinearPath& path, const std::vector<double>& grid) {
  require(!grid.empty(), ErrorKind::insufficient_data, "lift grid is empty");
  require(grid.front() >= path.start_time() && grid.back() <= path.end_time(),
          ErrorKind::grid_mismatch, "lift grid lies outside the path domain");
  RoughPathGrid rp(grid, path.dim());
  const int m = path.dim();
  const Vec origin = path.value(grid.front());

  Vec x = Vec::Zero(m);       // X(t0, t)
  Vec x_local = Vec::Zero(m); // X(t_i, t)
  Mat prefix = Mat::Zero(m, m);
  Mat local = Mat::Zero(m, m);
  Vec delta(m);

  double t = grid.front();
  std::size_t seg = path.segment_count() > 0 ? path.segment_index(t) : 0;
  const auto& knots = path.knots();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double target = grid[i + 1];
    x_local.setZero();
    local.setZero();
    while (t < target) {
      while (seg + 1 < path.segment_count() && knots[seg + 1] <= t) ++seg;
      const double t_next = std::min(knots[seg + 1], target);
      Vec x_next = (t_next == knots[seg + 1])
                       ? Vec(path.value_at_knot(seg + 1) - origin)
                       : Vec(path.value_at_knot(seg) + (t_next - knots[seg]) * path.slope(seg) - origin);
      delta = x_next - x;
      prefix.noalias() += x * delta.transpose();
      prefix.noalias() += 0.5 * delta * delta.transpose();
      local.noalias() += x_local * delta.transpose();
      local.noalias() += 0.5 * delta * delta.transpose();
      x = x_next;
      x_local += delta;
      t = t_next;
    }
    rp.anchored_level1(i + 1) = x;
    rp.anchored_level2(i + 1) = prefix;
    rp.interval_level2(i) = local;
  }
  return rp;
}

Mat chen_defect(const RoughPathGrid& rp, std::size_t s, std::size_t u, std::size_t t) {
  require(s <= u && u <= t && t < rp.size(), ErrorKind::grid_mismatch,
          "Chen defect needs grid indices s <= u <= t");
  return rp.level2(s, t) - rp.level2(s, u) - rp.level2(u, t) -
         rp.increment(s, u) * rp.increment(u, t).transpose();
}

double max_chen_defect(const RoughPathGrid& rp, std::size_t random_triples, std::uint64_t seed) {
  const std::size_t n = rp.size();
  double worst = 0.0;
  if (n < 3) return worst;
  auto track = [&](std::size_t s, std::size_t u, std::size_t t) {
    worst = std::max(worst, chen_defect(rp, s, u, t).cwiseAbs().maxCoeff());
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    track(0, i, i + 1);
    track(i, i + 1, n - 1);
  }
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t r = 0; r < random_triples; ++r) {
    std::size_t idx[3] = {pick(gen), pick(gen), pick(gen)};
    std::sort(idx, idx + 3);
    track(idx[0], idx[1], idx[2]);
  }
  return worst;
}

HolderReport holder_norms(const RoughPathGrid& rp, double alpha, Execution exec) {
  require(alpha > 1.0 / 3.0 && alpha < 0.5, ErrorKind::invalid_parameter,
          "alpha must lie in (1/3, 1/2)");
  const std::size_t n = rp.size();
  require(n >= 2, ErrorKind::insufficient_data, "Hoelder norms need at least two grid points");

  HolderReport report;
  report.alpha = alpha;
  report.grid_points = n;
  report.exhaustive = n <= kExhaustivePairLimit;

  const auto& times = rp.times();
  std::vector<double> row_level1(n, 0.0), row_level2(n, 0.0);
  std::vector<std::size_t> row_pairs(n, 0);
  const int m = rp.dim();

  auto visit = [&](std::size_t i, std::size_t j, double& s1, double& s2) {
    const double gap = times[j] - times[i];
    const auto xi = rp.anchored_level1(i);
    const auto xj = rp.anchored_level1(j);
    const double inc = (xj - xi).norm();
    const double scale = std::pow(gap, alpha);
    s1 = std::max(s1, inc / scale);
    double level2_norm2 = 0.0;
    if (j == i + 1) {
      level2_norm2 = rp.interval_level2(i).squaredNorm();
    } else {
      const auto ai = rp.anchored_level2(i);
      const auto aj = rp.anchored_level2(j);
      for (int c = 0; c < m; ++c) {
        const double dx = xj[c] - xi[c];
        for (int r = 0; r < m; ++r) {
          const double v = aj(r, c) - ai(r, c) - xi[r] * dx;
          level2_norm2 += v * v;
        }
      }
    }
    s2 = std::max(s2, std::sqrt(level2_norm2) / (scale * scale));
  };

  parallel_for(
      n - 1,
      [&](std::size_t i) {
        double s1 = 0.0, s2 = 0.0;
        std::size_t pairs = 0;
        if (report.exhaustive) {
          for (std::size_t j = i + 1; j < n; ++j, ++pairs) visit(i, j, s1, s2);
        } else {
          for (std::size_t gap = 1; i + gap < n; gap *= 2, ++pairs) visit(i, i + gap, s1, s2);
        }
        row_level1[i] = s1;
        row_level2[i] = s2;
        row_pairs[i] = pairs;
      },
      exec);

  for (std::size_t i = 0; i < n; ++i) {
    report.seminorm_level1 = std::max(report.seminorm_level1, row_level1[i]);
    report.seminorm_level2 = std::max(report.seminorm_level2, row_level2[i]);
    report.pairs_evaluated += row_pairs[i];
  }
  report.norm = report.seminorm_level1 + std::sqrt(report.seminorm_level2);
  return report;
}

SphereTangentMap::SphereTangentMap(double total_energy) : total_energy_(total_energy) {
  require(total_energy > 0.0, ErrorKind::invalid_parameter, "total energy must be positive");
}

void SphereTangentMap::apply(const Vec& y, const Vec& w, Vec& out) const {
  out = w - y * (y.dot(w) / total_energy_);
}

void SphereTangentMap::retract(Vec& y) const { geom::project_to_sphere_inplace(y, total_energy_); }

void SphereTangentMap::check_initial(const Vec& y) const {
  require(std::abs(y.squaredNorm() - total_energy_) <= 1e-10 * total_energy_,
          ErrorKind::invalid_initial_condition, "initial condition is off the energy sphere");
}

void AreaAccumulatorMap::apply(const Vec& y, const Vec& w, Vec& out) const {
  require(y.size() == 2 && w.size() == 2, ErrorKind::invalid_dimension,
          "area system is two-dimensional");
  out.resize(2);
  out[0] = w[0];
  out[1] = y[0] * w[1];
}

std::vector<Vec> solve_driven_ode(const CoefficientMap& map, const PiecewiseLinearPath& driver,
                                  const Vec& u0, double step,
                                  const std::vector<double>& output_times) {
  require(step > 0.0, ErrorKind::invalid_parameter, "step must be positive");
  require(std::is_sorted(output_times.begin(), output_times.end()), ErrorKind::grid_mismatch,
          "output times must be sorted");
  require(output_times.empty() || (output_times.front() >= driver.start_time() &&
                                   output_times.back() <= driver.end_time()),
          ErrorKind::grid_mismatch, "output times lie outside the driver domain");
  map.check_initial(u0);

  Vec u = u0;
  const auto n = u.size();
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<Vec> out;
  out.reserve(output_times.size());
  std::size_t next_out = 0;
  auto flush = [&](double t) {
    while (next_out < output_times.size() && output_times[next_out] <= t) {
      out.push_back(u);
      ++next_out;
    }
  };

  double t = driver.start_time();
  flush(t);
  const auto& knots = driver.knots();
  for (std::size_t seg = 0; seg < driver.segment_count(); ++seg) {
    const Vec w = driver.slope(seg);
    while (t < knots[seg + 1]) {
      double t_next = knots[seg + 1];
      if (next_out < output_times.size() && output_times[next_out] < t_next)
        t_next = output_times[next_out];
      const double span = t_next - t;
      const int substeps = std::max(1, static_cast<int>(std::ceil(span / step - 1e-12)));
      const double h = span / substeps;
      for (int s = 0; s < substeps; ++s) {
        map.apply(u, w, k1);
        tmp = u + 0.5 * h * k1;
        map.apply(tmp, w, k2);
        tmp = u + 0.5 * h * k2;
        map.apply(tmp, w, k3);
        tmp = u + h * k3;
        map.apply(tmp, w, k4);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      map.retract(u);
      t = t_next;
      flush(t);
    }
  }
  flush(driver.end_time());
  return out;
}

PiecewiseLinearPath spiral_example(double epsilon, std::size_t segments) {
  require(epsilon > 0.0, ErrorKind::invalid_parameter, "epsilon must be positive");
  require(segments >= 10, ErrorKind::invalid_parameter, "spiral needs at least 10 segments");
  const double freq = 1.0 / (epsilon * epsilon);
  auto point = [&](double t) {
    Vec v(2);
    v << epsilon * std::cos(freq * t), epsilon * std::sin(freq * t);
    return v;
  };
  PiecewiseLinearPath path(2, 0.0, point(0.0));
  Vec prev = point(0.0);
  const double n = static_cast<double>(segments);
  for (std::size_t i = 1; i <= segments; ++i) {
    const double t0 = static_cast<double>(i - 1) / n;
    const double t1 = (i == segments) ? 1.0 : static_cast<double>(i) / n;
    Vec next = point(t1);
    path.append(t1, (next - prev) / (t1 - t0));
    prev = std::move(next);
  }
  return path;
}

SpiralReport spiral_report(double epsilon, std::size_t segments) {
  const PiecewiseLinearPath path = spiral_example(epsilon, segments);
  SpiralReport report;
  report.epsilon = epsilon;
  report.segments = segments;
  for (std::size_t i = 0; i < path.knot_count(); ++i)
    report.sup_norm = std::max(report.sup_norm, path.value_at_knot(i).norm());

  const AreaAccumulatorMap area;
  const Vec y0 = path.value_at_knot(0);
  const double step = 1.0 / static_cast<double>(segments);
  const auto y = solve_driven_ode(area, path, y0, step, {1.0});
  report.area_term = y.front()[1];
  const double e2 = epsilon * epsilon;
  report.area_term_exact = 0.5 + e2 * std::sin(2.0 / e2) / 4.0;

  const RoughPathGrid lift = canonical_lift(path, {0.0, 1.0});
  const Mat ww = lift.level2(0, 1);
  report.antisymmetric = ww(0, 1) - ww(1, 0);
  report.antisymmetric_exact = 1.0 - e2 * std::sin(1.0 / e2);
  return report;
}

}  // namespace thermolab::rough
