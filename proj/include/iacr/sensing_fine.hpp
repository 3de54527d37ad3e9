#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iacr/fusion.hpp"
#include "iacr/sensing_fast.hpp"

namespace iacr {

/// How complex projected samples D^H y[n] become the real scalars the GLRT
/// consumes.
///   kRealPart: sqrt(2) Re(D^H y[n]), T real values of variance sigma^2 under
///              noise only, so energy / sigma^2 ~ chi^2(T).
///   kComplex:  sqrt(2) Re and sqrt(2) Im, 2T real values, chi^2(2T).
enum class SampleConvention { kRealPart, kComplex };

std::string to_string(SampleConvention c);

/// All received stream directions except `omit`, N0 x (sum(d) - 1),
/// pair-major, stream-minor.
CMatrix build_r_matrix(const ChannelSet& channels, const IASolution& ia, StreamId omit);

/// Unit vector maximising Re(D^H h) subject to D^H R = 0, where h = H_0i V_i(:, l):
/// D = (h - Pi h) / ||h - Pi h|| with Pi the projector onto range(R).
/// Throws SingularityError if R is rank deficient (including N0 < sum(d) - 1)
/// and DegenerateDirectionError if h lies in range(R).
CVector sensing_vector(const ChannelSet& channels, const IASolution& ia, StreamId id);

struct SensingVectorSet {
  std::vector<StreamId> streams;  // pair-major, stream-minor
  std::vector<CVector> vectors;

  const CVector& at(StreamId id) const;
};

SensingVectorSet build_sensing_vectors(const ChannelSet& channels, const IASolution& ia);

/// Real GLRT samples from D and the received vectors.
std::vector<double> project_stream_samples(const CVector& d, std::span<const CVector> received,
                                           SampleConvention convention = SampleConvention::kRealPart);

/// Y^H Y / (2T) - sigma^2 for T complex samples. May be negative.
double mle_signal_variance(std::span<const cplx> y, double noise_var);

/// g(theta) = exp(theta / (2 dof)) / (sigma^2 theta): the statistic as a
/// function of theta = energy / sigma^2.
double glrt_g(double theta, int dof, double noise_var);

/// exp(E / (2 T sigma^2)) / E with E = sum y^2 and T = y.size().
/// Throws DomainError when E = 0. Overflows to +inf for very large E;
/// decisions use glrt_log_statistic.
double glrt_statistic(std::span<const double> y, double noise_var);

/// log of the statistic from energy and the number of real samples.
double glrt_log_statistic(double energy, int dof, double noise_var);

/// Smallest value the statistic can take: e / (2 T sigma^2).
double glrt_minimum(int dof, double noise_var);

struct GlrtPfa {
  double value = 1.0;
  bool degenerate = false;  // threshold at or below the minimum: PFA = 1
};

/// Pr(statistic > eta') with theta ~ chi^2(dof):
///   F(-2T W0(z)) + 1 - F(-2T W-1(z)),  z = -1 / (2 T sigma^2 eta').
GlrtPfa glrt_pfa(double eta_prime, int dof, double noise_var);

/// As glrt_pfa, but throws DomainError at or below the minimum.
double glrt_pfa_checked(double eta_prime, int dof, double noise_var);

/// The two theta values where the statistic equals eta'.
struct AcceptanceInterval {
  double lower = 0.0;
  double upper = 0.0;
};
AcceptanceInterval glrt_acceptance_interval(double eta_prime, int dof, double noise_var);

/// Inverts glrt_pfa by bisection: |glrt_pfa(eta') - target| <= 1e-6.
double glrt_threshold(double target_pfa, int dof, double noise_var);

struct GlrtDecision {
  StreamId stream;
  double statistic = 0.0;       // may be +inf
  double log_statistic = 0.0;
  double threshold = 0.0;
  double signal_variance = 0.0;  // MLE, reported as-is
  bool inactive = false;         // statistic < threshold
};

GlrtDecision glrt_decide(StreamId id, std::span<const double> y, double noise_var,
                         double eta_prime);

struct SensingConfig {
  // Stage one.
  int smoothing = 3;  // T
  int count = 30;     // L
  double fast_pfa = 0.1;
  std::optional<double> fast_eta;  // overrides fast_pfa
  DimConvention dim = DimConvention::kReceiveAntennas;
  CovarianceForm form = CovarianceForm::kStacked;
  bool enforce_smoothing = true;  // reject T < N0
  // Stage two.
  int fine_samples = 64;
  double fine_pfa = 0.1;
  std::optional<double> fine_threshold;  // overrides fine_pfa
  SampleConvention convention = SampleConvention::kRealPart;
  double noise_var = 1.0;

  int fast_samples() const { return required_raw_samples(smoothing, count, form); }
  int total_samples() const { return fast_samples() + fine_samples; }
  int fine_dof() const {
    return convention == SampleConvention::kRealPart ? fine_samples : 2 * fine_samples;
  }
};

void validate(const SensingConfig& cfg);

struct DetectionReport {
  FastDecision fast;
  std::vector<GlrtDecision> fine;  // empty when no hole was flagged
  std::vector<StreamId> inactive_index_set;

  bool flagged(StreamId id) const;
};

/// One pass of the two-stage detector. The first cfg.fast_samples() vectors
/// feed the eigenvalue test; the next cfg.fine_samples vectors feed the
/// per-stream GLRTs, which only run when a hole is flagged.
DetectionReport run_sensing_pipeline(std::span<const CVector> raw, const ChannelSet& channels,
                                     const IASolution& ia, const SensingConfig& cfg);

/// Same, with precomputed sensing vectors and thresholds.
DetectionReport run_sensing_pipeline(std::span<const CVector> raw, const SensingVectorSet& vectors,
                                     const SensingConfig& cfg, double fast_eta, double fine_eta);

/// Repeats the pipeline on fresh samples while stage one keeps flagging a
/// hole, up to max_rounds. `source(n)` must return n new received vectors.
std::vector<DetectionReport> run_sensing_rounds(
    const std::function<std::vector<CVector>(int)>& source, const ChannelSet& channels,
    const IASolution& ia, const SensingConfig& cfg, int max_rounds);

/// One line: "hole=<0|1> lambda_min=<v> eta=<v> inactive=(i,l);(i,l)".
std::string to_text(const DetectionReport& report);

/// trial,stage1_lambda_min,stage1_eta,hole,pair,stream,statistic,threshold,inactive
void write_report_csv_header(std::ostream& out);
/// One row per GLRT decision; a single row with empty stream fields when
/// stage two did not run. Streams are written 1-based.
void write_report_csv(std::ostream& out, long trial, const DetectionReport& report);

}  // namespace iacr
