#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "iacr/linalg.hpp"

namespace iacr {

/// Which dimension enters the Tracy-Widom centring/scaling: the receive
/// antenna count N0 (the literal threshold formula) or the stacked
/// dimension N0 * T.
enum class DimConvention { kReceiveAntennas, kStackedDimension };

/// Covariance the eigenvalue test runs on: the N0*T-dim covariance of
/// stacked vectors (1/(L sigma^2) sum over L stacks), or the N0-dim matrix
/// 1/(L sigma^2) sum over L*T single samples, i.e. a complex Wishart W_N0(LT, I)
/// divided by L.
enum class CovarianceForm { kStacked, kPerSample };

std::string to_string(DimConvention c);
std::string to_string(CovarianceForm f);

/// L sliding-window vectors [y_n; y_{n-1}; ...; y_{n-T+1}], n = T-1 .. T+L-2.
struct StackedSamples {
  int smoothing = 1;    // T
  int count = 0;        // L
  int rx_antennas = 0;  // N0
  std::vector<CVector> vectors;
};

/// Requires T >= 1, L >= 1 and raw.size() >= T + L - 1. Smoothing factors
/// below N0 are allowed here; see check_smoothing_factor.
StackedSamples stack_samples(std::span<const CVector> raw, int smoothing, int count);

/// Throws InputError when T < N0.
void check_smoothing_factor(int smoothing, int rx_antennas);

/// Raw sample vectors the chosen covariance form consumes.
int required_raw_samples(int smoothing, int count, CovarianceForm form);

/// Noise-normalised covariance of the sensing window.
CMatrix sensing_covariance(std::span<const CVector> raw, int smoothing, int count,
                           double noise_var, CovarianceForm form = CovarianceForm::kStacked);

/// Smallest eigenvalue of a Hermitian PSD covariance.
double min_eig_statistic(const CMatrix& r);

struct WeylBounds {
  double lower = 0.0;  // lambda_min(R_X) + lambda_min(R_Z)
  double upper = 0.0;  // lambda_min(R_X) + lambda_max(R_Z)
  double value = 0.0;  // lambda_min(R_X + R_Z)
  bool holds(double tol = 1e-10) const {
    const double slack = tol * std::max({1.0, std::abs(lower), std::abs(upper)});
    return lower <= value + slack && value <= upper + slack;
  }
};

WeylBounds weyl_bounds(const CMatrix& r_x, const CMatrix& r_z);

/// Block-diagonal T-fold replication of a per-sample covariance, normalised
/// by the noise variance: the exact stacked covariance for i.i.d. samples.
CMatrix stacked_covariance_exact(const CMatrix& per_sample, int smoothing, double noise_var);

/// Centre and scale of the largest-eigenvalue Tracy-Widom approximation,
/// already divided by L:
///   centre = (sqrt(LT) + sqrt(n))^2 / L
///   scale  = (sqrt(LT) + sqrt(n)) (1/sqrt(LT) + 1/sqrt(n))^(1/3) / L
/// with n = N0 or N0*T per `dim`.
struct TwScaling {
  double centre = 0.0;
  double scale = 0.0;
};
TwScaling tw_max_scaling(int count, int smoothing, int rx_antennas, DimConvention dim);

/// eta = scale * F2^{-1}(1 - pfa) + centre.
double fast_threshold(double target_pfa, int count, int smoothing, int rx_antennas,
                      DimConvention dim = DimConvention::kReceiveAntennas);

/// Same formula with a caller-supplied inverse CDF (used to check the formula
/// independently of the Tracy-Widom table).
double fast_threshold_with(const std::function<double(double)>& tw_inverse, double target_pfa,
                           int count, int smoothing, int rx_antennas, DimConvention dim);

/// Tracy-Widom approximation of Pr(lambda_max(R_Z) > eta).
double tw_upper_pfa_bound(double eta, int count, int smoothing, int rx_antennas,
                          DimConvention dim = DimConvention::kReceiveAntennas);

/// Tracy-Widom approximation of Pr(lambda_min(R_Z) > eta), using the
/// smallest-eigenvalue centring (sqrt(LT) - sqrt(n))^2 and scaling
/// (sqrt(LT) - sqrt(n)) (1/sqrt(LT) - 1/sqrt(n))^(1/3), real cube root.
/// That scale is negative, so the result is F2((eta - centre) / scale),
/// which decreases in eta.
double tw_lower_pfa_bound(double eta, int count, int smoothing, int rx_antennas,
                          DimConvention dim = DimConvention::kReceiveAntennas);

struct FastDecision {
  double lambda_min = 0.0;
  double threshold = 0.0;
  bool hole_present = false;  // lambda_min < threshold
  int smoothing = 0;
  int count = 0;
  int rx_antennas = 0;
};

FastDecision detect_hole(const StackedSamples& stacked, double noise_var, double eta);

/// Coarse test straight from raw samples using the chosen covariance form.
FastDecision detect_hole(std::span<const CVector> raw, int smoothing, int count, double noise_var,
                         double eta, CovarianceForm form);

struct ThresholdCalibration {
  double pfa_target = 0.0;
  double eta = 0.0;
  int count = 0;
  int smoothing = 0;
  int rx_antennas = 0;
  DimConvention dim = DimConvention::kReceiveAntennas;
};

std::vector<ThresholdCalibration> calibrate_fast_thresholds(std::span<const double> pfa_targets,
                                                            int count, int smoothing,
                                                            int rx_antennas, DimConvention dim);

/// CSV with header pfa_target,eta,L,T,N0,dim_convention.
void write_calibration_csv(std::ostream& out, std::span<const ThresholdCalibration> rows);

}  // namespace iacr
