#include "iacr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace iacr {

void RunningStat::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStat::merge(const RunningStat& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStat::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStat::stddev() const { return std::sqrt(variance()); }

double RunningStat::std_error() const {
  return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
}

void MetricTable::add(std::string group, std::string point_name, double point,
                      std::string metric, const RunningStat& stat, std::uint64_t seed) {
  rows_.push_back({std::move(group), std::move(point_name), point, std::move(metric), stat.mean(), stat.std_error(),
                   stat.count(), seed});
}

const MetricRow& MetricTable::find(const std::string& group, const std::string& metric,
                                   double point) const {
  for (const auto& r : rows_) {
    if (r.group == group && r.metric == metric && r.point == point) return r;
  }
  throw std::out_of_range("metric table: no row " + group + "/" + metric);
}

std::vector<const MetricRow*> MetricTable::series(const std::string& group,
                                                  const std::string& metric) const {
  std::vector<const MetricRow*> out;
  for (const auto& r : rows_) {
    if (r.group == group && r.metric == metric) out.push_back(&r);
  }
  return out;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace iacr
