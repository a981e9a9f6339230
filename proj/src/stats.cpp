#include "thermolab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermolab/error.hpp"

namespace thermolab::stats {

void MomentAccumulator::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double MomentAccumulator::variance() const noexcept {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double MomentAccumulator::std_error() const noexcept {
  return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

MatrixAccumulator::MatrixAccumulator(Eigen::Index rows, Eigen::Index cols)
    : mean_(Mat::Zero(rows, cols)), m2_(Mat::Zero(rows, cols)) {}

void MatrixAccumulator::add(const Mat& x) {
  if (count_ == 0 && mean_.size() == 0) {
    mean_ = Mat::Zero(x.rows(), x.cols());
    m2_ = Mat::Zero(x.rows(), x.cols());
  }
  require(x.rows() == mean_.rows() && x.cols() == mean_.cols(), ErrorKind::invalid_dimension,
          "accumulator shape mismatch");
  ++count_;
  const Mat delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_.array() += delta.array() * (x - mean_).array();
}

void MatrixAccumulator::merge(const MatrixAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  require(other.mean_.rows() == mean_.rows() && other.mean_.cols() == mean_.cols(),
          ErrorKind::invalid_dimension, "accumulator shape mismatch");
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Mat delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_.array() += other.m2_.array() + delta.array().square() * (na * nb / n);
  count_ += other.count_;
}

Mat MatrixAccumulator::variance() const {
  if (count_ < 2) return Mat::Zero(mean_.rows(), mean_.cols());
  return m2_ / static_cast<double>(count_ - 1);
}

Mat MatrixAccumulator::std_error() const {
  return (variance() / static_cast<double>(std::max<std::size_t>(count_, 1))).array().sqrt();
}

Mat CorrelationEstimate::z_scores() const {
  Mat z(estimate.rows(), estimate.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double diff = estimate(i, j) - target(i, j);
      const double se = std_error(i, j);
      if (se > 0.0) {
        z(i, j) = diff / se;
      } else {
        z(i, j) = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
    }
  }
  return z;
}

bool CorrelationEstimate::within(double n_se) const {
  return (z_scores().array().abs() <= n_se).all();
}

bool CorrelationEstimate::diagonal_within(double n_se) const {
  return (z_scores().diagonal().array().abs() <= n_se).all();
}

CorrelationEstimate make_estimate(const MatrixAccumulator& acc, Mat target,
                                  std::string formula_id, double lag) {
  CorrelationEstimate e;
  e.estimate = acc.mean();
  e.std_error = acc.std_error();
  e.sample_count = acc.count();
  require(target.rows() == e.estimate.rows() && target.cols() == e.estimate.cols(),
          ErrorKind::invalid_dimension, "target shape does not match the estimate");
  e.target = std::move(target);
  e.formula_id = std::move(formula_id);
  e.lag = lag;
  e.low_power = acc.count() < kLowPowerSamples;
  return e;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
  require(n > 0 && m > 0, ErrorKind::insufficient_data, "empty sample");
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // 1 - Q(0.2) is below 1e-12
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::insufficient_data, "KS test needs nonempty samples");
  require(a.size() >= kKsMinSamples && b.size() >= kKsMinSamples, ErrorKind::insufficient_data,
          "KS test needs at least 50 points per sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  r.critical_05 = ks_critical_value(0.05, r.n, r.m);
  r.critical_01 = ks_critical_value(0.01, r.n, r.m);
  const double en = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_survival(en * d);
  return r;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::invalid_dimension, "fit inputs differ in length");
  require(x.size() >= 2, ErrorKind::insufficient_data, "line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::insufficient_data, "line fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

MomentBoundFit moment_scaling_fit(const std::vector<double>& gaps,
                                  const std::vector<std::vector<double>>& magnitudes, double q,
                                  int level) {
  require(q > 3.0, ErrorKind::invalid_parameter, "moment bounds need q > 3");
  require(level == 1 || level == 2, ErrorKind::invalid_parameter, "level must be 1 or 2");
  require(gaps.size() == magnitudes.size(), ErrorKind::invalid_dimension,
          "one sample set per gap is required");
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  require(sorted.size() >= 5, ErrorKind::insufficient_data, "need at least 5 distinct gap sizes");
  require(sorted.front() > 0.0, ErrorKind::invalid_parameter, "gaps must be positive");
  require(sorted.back() / sorted.front() >= 100.0 * (1.0 - 1e-9), ErrorKind::insufficient_data,
          "gap sizes must span at least two decades");

  MomentBoundFit fit;
  fit.q = q;
  fit.level = level;
  fit.norm_order = level == 1 ? 2.0 * q : q;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    require(!magnitudes[i].empty(), ErrorKind::insufficient_data, "empty increment sample");
    double acc = 0.0;
    for (double m : magnitudes[i]) acc += std::pow(std::abs(m), fit.norm_order);
    const double norm =
        std::pow(acc / static_cast<double>(magnitudes[i].size()), 1.0 / fit.norm_order);
    require(norm > 0.0, ErrorKind::degenerate_state, "zero increment norm");
    fit.gaps.push_back(gaps[i]);
    fit.norms.push_back(norm);
    fit.samples.push_back(magnitudes[i].size());
    lx.push_back(std::log(gaps[i]));
    ly.push_back(std::log(norm));
  }
  const LinearFit line = fit_line(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_se = line.slope_se;
  return fit;
}

RawMoments raw_moments(const std::vector<double>& x) {
  std::array<MomentAccumulator, 4> acc;
  for (double v : x) {
    double p = v;
    for (auto& a : acc) {
      a.add(p);
      p *= v;
    }
  }
  RawMoments out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.value[k] = acc[k].mean();
    out.std_error[k] = acc[k].std_error();
  }
  return out;
}

}  // namespace thermolab::stats
