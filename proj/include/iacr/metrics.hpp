#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace iacr {

/// Welford mean/variance accumulator; merge() is exact up to round-off and
/// independent of how samples were partitioned.
class RunningStat {
 public:
  void add(double x);
  void merge(const RunningStat& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 with fewer than two samples.
  double variance() const;
  double stddev() const;
  /// stddev / sqrt(count); 0 when empty.
  double std_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MetricRow {
  std::string group;       // e.g. "T=3,N0=3"; may be empty
  std::string point_name;  // e.g. "snr_db"
  double point = 0.0;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Ordered rows of (group, sweep point, metric, mean, std error, trials, seed).
class MetricTable {
 public:
  MetricTable() = default;
  explicit MetricTable(std::string experiment) : experiment_(std::move(experiment)) {}

  void add(std::string group, std::string point_name, double point, std::string metric,
           const RunningStat& stat, std::uint64_t seed);
  void add_row(MetricRow row) { rows_.push_back(std::move(row)); }

  const std::string& experiment() const { return experiment_; }
  const std::vector<MetricRow>& rows() const { return rows_; }
  /// First row matching (group, metric, point); throws std::out_of_range if absent.
  const MetricRow& find(const std::string& group, const std::string& metric, double point) const;
  /// Rows of one metric within a group, in insertion order.
  std::vector<const MetricRow*> series(const std::string& group, const std::string& metric) const;

 private:
  std::string experiment_;
  std::vector<MetricRow> rows_;
};

/// Two-sided one-sample Kolmogorov-Smirnov statistic D_n of `samples`
/// against `cdf`. Samples are copied and sorted.
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf cdf);

/// Asymptotic Kolmogorov p-value Pr(K > sqrt(n) D) with the small-sample
/// correction sqrt(n) + 0.12 + 0.11/sqrt(n).
double ks_pvalue(double d, std::size_t n);

}  // namespace iacr

#include <algorithm>
#include <cmath>

namespace iacr {

template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf cdf) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace iacr
