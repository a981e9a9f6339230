#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "thermolab/geom.hpp"

namespace thermolab::stats {

/// Streaming (count, mean, M2) accumulator; merges are associative.
class MomentAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MomentAccumulator& other) noexcept;

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double std_error() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Entrywise MomentAccumulator over fixed-shape matrices.
class MatrixAccumulator {
 public:
  MatrixAccumulator() = default;
  MatrixAccumulator(Eigen::Index rows, Eigen::Index cols);

  void add(const Mat& x);
  void merge(const MatrixAccumulator& other);

  std::size_t count() const noexcept { return count_; }
  const Mat& mean() const noexcept { return mean_; }
  const Mat& m2() const noexcept { return m2_; }
  Mat variance() const;
  Mat std_error() const;

 private:
  std::size_t count_ = 0;
  Mat mean_, m2_;
};

constexpr std::size_t kLowPowerSamples = 100;

struct CorrelationEstimate {
  Mat estimate;
  Mat std_error;
  std::size_t sample_count = 0;
  Mat target;
  std::string formula_id;
  double lag = 0.0;
  bool low_power = false;  // fewer than kLowPowerSamples samples

  /// (estimate - target) / std_error entrywise; a zero s.e. gives 0 when
  /// the estimate hits the target exactly and infinity otherwise.
  Mat z_scores() const;
  bool within(double n_se) const;
  bool diagonal_within(double n_se) const;
};

CorrelationEstimate make_estimate(const MatrixAccumulator& acc, Mat target,
                                  std::string formula_id, double lag = 0.0);

struct KsResult {
  double statistic = 0.0;
  double critical_05 = 0.0;
  double critical_01 = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;

  bool reject_05() const noexcept { return statistic > critical_05; }
  bool reject_01() const noexcept { return statistic > critical_01; }
};

constexpr std::size_t kKsMinSamples = 50;

/// Asymptotic critical value c(alpha) sqrt((n + m) / (n m)),
/// c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);
/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_survival(double x);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct MomentBoundFit {
  double q = 0.0;
  int level = 1;
  double norm_order = 0.0;      // 2q for level 1, q for level 2
  std::vector<double> gaps;     // |t - s|
  std::vector<double> norms;    // empirical L^p norm at each gap
  std::vector<std::size_t> samples;
  double slope = 0.0;
  double intercept = 0.0;       // log C
  double slope_se = 0.0;
};

/// Log-log fit of the empirical L^{2q} (level 1) or L^q (level 2) norm of
/// increment magnitudes against the gap size. magnitudes[i] holds samples of
/// |X(s, s + gaps[i])|.
MomentBoundFit moment_scaling_fit(const std::vector<double>& gaps,
                                  const std::vector<std::vector<double>>& magnitudes, double q,
                                  int level);

/// Sample raw moments E[x^k], k = 1..4, with standard errors.
struct RawMoments {
  std::array<double, 4> value{};
  std::array<double, 4> std_error{};
};
RawMoments raw_moments(const std::vector<double>& x);

}  // namespace thermolab::stats
