#include "iacr/sensing_fast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "iacr/errors.hpp"
#include "iacr/tracy_widom.hpp"

namespace iacr {

std::string to_string(DimConvention c) {
  return c == DimConvention::kReceiveAntennas ? "n0" : "n0t";
}

std::string to_string(CovarianceForm f) {
  return f == CovarianceForm::kStacked ? "stacked" : "per-sample";
}

StackedSamples stack_samples(std::span<const CVector> raw, int smoothing, int count) {
  if (smoothing < 1 || count < 1) throw InputError("stack_samples: T and L must be >= 1");
  const auto needed = static_cast<std::size_t>(smoothing + count - 1);
  if (raw.size() < needed) {
    throw InputError("stack_samples: need " + std::to_string(needed) + " raw samples, got " +
                     std::to_string(raw.size()));
  }
  const auto n0 = raw.front().size();
  StackedSamples out;
  out.smoothing = smoothing;
  out.count = count;
  out.rx_antennas = static_cast<int>(n0);
  out.vectors.reserve(static_cast<std::size_t>(count));
  for (int n = smoothing - 1; n <= smoothing + count - 2; ++n) {
    CVector v(n0 * smoothing);
    for (int lag = 0; lag < smoothing; ++lag) {
      const CVector& y = raw[static_cast<std::size_t>(n - lag)];
      if (y.size() != n0) throw InputError("stack_samples: raw samples differ in dimension");
      v.segment(lag * n0, n0) = y;
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

void check_smoothing_factor(int smoothing, int rx_antennas) {
  if (smoothing < rx_antennas) {
    throw InputError("smoothing factor T = " + std::to_string(smoothing) +
                     " is below the receive antenna count " + std::to_string(rx_antennas));
  }
}

int required_raw_samples(int smoothing, int count, CovarianceForm form) {
  return form == CovarianceForm::kStacked ? smoothing + count - 1 : smoothing * count;
}

CMatrix sensing_covariance(std::span<const CVector> raw, int smoothing, int count,
                           double noise_var, CovarianceForm form) {
  if (form == CovarianceForm::kStacked) {
    const auto st = stack_samples(raw, smoothing, count);
    return sample_covariance(st.vectors, noise_var);
  }
  const auto needed = static_cast<std::size_t>(required_raw_samples(smoothing, count, form));
  if (smoothing < 1 || count < 1 || raw.size() < needed) {
    throw InputError("sensing_covariance: need " + std::to_string(needed) + " raw samples");
  }
  // Sum of L*T outer products over L: the scale of W_N0(LT, I) / L.
  return sample_covariance(raw.first(needed), noise_var) * static_cast<double>(smoothing);
}

double min_eig_statistic(const CMatrix& r) { return min_eigenvalue(r); }

WeylBounds weyl_bounds(const CMatrix& r_x, const CMatrix& r_z) {
  if (r_x.rows() != r_z.rows() || r_x.cols() != r_z.cols()) {
    throw InputError("weyl_bounds: matrices differ in size");
  }
  const auto ex = hermitian_eig(r_x);
  const auto ez = hermitian_eig(r_z);
  WeylBounds b;
  b.lower = ex.values(0) + ez.values(0);
  b.upper = ex.values(0) + ez.values(ez.values.size() - 1);
  b.value = min_eigenvalue(r_x + r_z);
  return b;
}

CMatrix stacked_covariance_exact(const CMatrix& per_sample, int smoothing, double noise_var) {
  const auto n0 = per_sample.rows();
  CMatrix out = CMatrix::Zero(n0 * smoothing, n0 * smoothing);
  for (int b = 0; b < smoothing; ++b) out.block(b * n0, b * n0, n0, n0) = per_sample / noise_var;
  return out;
}

TwScaling tw_max_scaling(int count, int smoothing, int rx_antennas, DimConvention dim) {
  if (count < 1 || smoothing < 1 || rx_antennas < 1) {
    throw InputError("fast_threshold: L, T and N0 must be >= 1");
  }
  const double lt = static_cast<double>(count) * smoothing;
  const double n = dim == DimConvention::kReceiveAntennas
                       ? static_cast<double>(rx_antennas)
                       : static_cast<double>(rx_antennas) * smoothing;
  const double s = std::sqrt(lt) + std::sqrt(n);
  const double inv = std::sqrt(1.0 / lt) + std::sqrt(1.0 / n);
  return {s * s / count, s * std::cbrt(inv) / count};
}

double fast_threshold_with(const std::function<double(double)>& tw_inverse, double target_pfa,
                           int count, int smoothing, int rx_antennas, DimConvention dim) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0)) {
    throw InputError("fast_threshold: target PFA must lie in (0, 1)");
  }
  const TwScaling sc = tw_max_scaling(count, smoothing, rx_antennas, dim);
  return sc.scale * tw_inverse(1.0 - target_pfa) + sc.centre;
}

double fast_threshold(double target_pfa, int count, int smoothing, int rx_antennas,
                      DimConvention dim) {
  return fast_threshold_with(tw2_quantile, target_pfa, count, smoothing, rx_antennas, dim);
}

double tw_upper_pfa_bound(double eta, int count, int smoothing, int rx_antennas,
                          DimConvention dim) {
  const TwScaling sc = tw_max_scaling(count, smoothing, rx_antennas, dim);
  return 1.0 - tw2_cdf((eta - sc.centre) / sc.scale);
}

double tw_lower_pfa_bound(double eta, int count, int smoothing, int rx_antennas,
                          DimConvention dim) {
  if (count < 1 || smoothing < 1 || rx_antennas < 1) {
    throw InputError("tw_lower_pfa_bound: L, T and N0 must be >= 1");
  }
  const double lt = static_cast<double>(count) * smoothing;
  const double n = dim == DimConvention::kReceiveAntennas
                       ? static_cast<double>(rx_antennas)
                       : static_cast<double>(rx_antennas) * smoothing;
  const double d = std::sqrt(lt) - std::sqrt(n);
  const double scale = d * std::cbrt(std::sqrt(1.0 / lt) - std::sqrt(1.0 / n)) / count;
  if (scale == 0.0) throw DomainError("tw_lower_pfa_bound: LT equals the dimension");
  const double centre = d * d / count;
  // scale < 0: lambda_min ~ centre + scale * X with X ~ F2, so large X means
  // a small eigenvalue and Pr(lambda_min > eta) = F2((eta - centre) / scale).
  return tw2_cdf((eta - centre) / scale);
}

FastDecision detect_hole(const StackedSamples& stacked, double noise_var, double eta) {
  FastDecision d;
  d.lambda_min = min_eig_statistic(sample_covariance(stacked.vectors, noise_var));
  d.threshold = eta;
  d.hole_present = d.lambda_min < eta;
  d.smoothing = stacked.smoothing;
  d.count = stacked.count;
  d.rx_antennas = stacked.rx_antennas;
  return d;
}

FastDecision detect_hole(std::span<const CVector> raw, int smoothing, int count, double noise_var,
                         double eta, CovarianceForm form) {
  if (form == CovarianceForm::kStacked) {
    return detect_hole(stack_samples(raw, smoothing, count), noise_var, eta);
  }
  FastDecision d;
  d.lambda_min = min_eig_statistic(sensing_covariance(raw, smoothing, count, noise_var, form));
  d.threshold = eta;
  d.hole_present = d.lambda_min < eta;
  d.smoothing = smoothing;
  d.count = count;
  d.rx_antennas = raw.empty() ? 0 : static_cast<int>(raw.front().size());
  return d;
}

std::vector<ThresholdCalibration> calibrate_fast_thresholds(std::span<const double> pfa_targets,
                                                            int count, int smoothing,
                                                            int rx_antennas, DimConvention dim) {
  std::vector<ThresholdCalibration> out;
  for (double p : pfa_targets) {
    out.push_back({p, fast_threshold(p, count, smoothing, rx_antennas, dim), count, smoothing,
                   rx_antennas, dim});
  }
  return out;
}

void write_calibration_csv(std::ostream& out, std::span<const ThresholdCalibration> rows) {
  out << "pfa_target,eta,L,T,N0,dim_convention\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.pfa_target);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.eta);
    out << buf << ',' << r.count << ',' << r.smoothing << ',' << r.rx_antennas << ','
        << to_string(r.dim) << '\n';
  }
}

}  // namespace iacr
