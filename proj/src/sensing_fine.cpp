#include "iacr/sensing_fine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "iacr/errors.hpp"
#include "iacr/lambert_w.hpp"

namespace iacr {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int column_of(const IASolution& ia, StreamId id) {
  const int k = static_cast<int>(ia.V.size()) - 1;
  if (id.pair < 1 || id.pair > k) throw InputError("stream pair index out of range");
  if (id.stream < 0 || id.stream >= ia.V[static_cast<std::size_t>(id.pair)].cols()) {
    throw InputError("stream index out of range");
  }
  int col = 0;
  for (int j = 1; j < id.pair; ++j) col += static_cast<int>(ia.V[static_cast<std::size_t>(j)].cols());
  return col + id.stream;
}

double chi2_cdf(double x, int dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_sf(double x, int dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

void check_dof(int dof, double noise_var) {
  if (dof < 1) throw InputError("GLRT needs at least one sample");
  if (!(noise_var > 0.0)) throw InputError("noise variance must be positive");
}

}  // namespace

std::string to_string(SampleConvention c) {
  return c == SampleConvention::kRealPart ? "real" : "complex";
}

CMatrix build_r_matrix(const ChannelSet& channels, const IASolution& ia, StreamId omit) {
  const CMatrix all = stream_directions(channels, ia);
  const int skip = column_of(ia, omit);
  CMatrix r(all.rows(), all.cols() - 1);
  for (Eigen::Index c = 0, o = 0; c < all.cols(); ++c) {
    if (c == skip) continue;
    r.col(o++) = all.col(c);
  }
  return r;
}

CVector sensing_vector(const ChannelSet& channels, const IASolution& ia, StreamId id) {
  const CMatrix all = stream_directions(channels, ia);
  const CVector h = all.col(column_of(ia, id));
  const CMatrix r = build_r_matrix(channels, ia, id);
  std::string name = "R_" + std::to_string(id.stream + 1) + "^[" + std::to_string(id.pair) + "]";
  const CMatrix pi = orthogonal_projector(r, name);
  const CVector resid = h - pi * h;
  const double n = resid.norm();
  if (!(n > 1e-10 * std::max(1.0, h.norm()))) {
    throw DegenerateDirectionError("sensing vector for stream (" + std::to_string(id.pair) + "," +
                                   std::to_string(id.stream + 1) +
                                   "): direction lies in the span of the other streams");
  }
  return resid / n;
}

const CVector& SensingVectorSet::at(StreamId id) const {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i] == id) return vectors[i];
  }
  throw InputError("no sensing vector for the requested stream");
}

SensingVectorSet build_sensing_vectors(const ChannelSet& channels, const IASolution& ia) {
  SensingVectorSet out;
  for (std::size_t k = 1; k < ia.V.size(); ++k) {
    for (Eigen::Index s = 0; s < ia.V[k].cols(); ++s) {
      const StreamId id{static_cast<int>(k), static_cast<int>(s)};
      out.streams.push_back(id);
      out.vectors.push_back(sensing_vector(channels, ia, id));
    }
  }
  return out;
}

std::vector<double> project_stream_samples(const CVector& d, std::span<const CVector> received,
                                           SampleConvention convention) {
  std::vector<double> y;
  y.reserve(received.size() * (convention == SampleConvention::kRealPart ? 1 : 2));
  for (const CVector& r : received) {
    if (r.size() != d.size()) throw InputError("project_stream_samples: dimension mismatch");
    const cplx v = d.dot(r) * std::numbers::sqrt2;  // dot conjugates d
    y.push_back(v.real());
    if (convention == SampleConvention::kComplex) y.push_back(v.imag());
  }
  return y;
}

double mle_signal_variance(std::span<const cplx> y, double noise_var) {
  if (y.empty()) throw InputError("mle_signal_variance: no samples");
  double e = 0.0;
  for (const cplx& v : y) e += std::norm(v);
  return e / (2.0 * static_cast<double>(y.size())) - noise_var;
}

double glrt_g(double theta, int dof, double noise_var) {
  check_dof(dof, noise_var);
  if (!(theta > 0.0)) throw DomainError("glrt_g: theta must be positive");
  return std::exp(theta / (2.0 * dof)) / (noise_var * theta);
}

double glrt_log_statistic(double energy, int dof, double noise_var) {
  check_dof(dof, noise_var);
  if (!(energy > 0.0)) throw DomainError("GLRT statistic undefined for zero sample energy");
  return energy / (2.0 * dof * noise_var) - std::log(energy);
}

double glrt_statistic(std::span<const double> y, double noise_var) {
  double e = 0.0;
  for (double v : y) e += v * v;
  const auto t = static_cast<int>(y.size());
  check_dof(t, noise_var);
  if (!(e > 0.0)) throw DomainError("GLRT statistic undefined for zero sample energy");
  return std::exp(e / (2.0 * t * noise_var)) / e;
}

double glrt_minimum(int dof, double noise_var) {
  check_dof(dof, noise_var);
  return std::numbers::e / (2.0 * dof * noise_var);
}

AcceptanceInterval glrt_acceptance_interval(double eta_prime, int dof, double noise_var) {
  const double min = glrt_minimum(dof, noise_var);
  if (!(eta_prime > min)) throw DomainError("GLRT threshold at or below the statistic minimum");
  const double z = -1.0 / (2.0 * dof * noise_var * eta_prime);
  return {-2.0 * dof * lambert_w0(z), -2.0 * dof * lambert_wm1(z)};
}

GlrtPfa glrt_pfa(double eta_prime, int dof, double noise_var) {
  if (std::isnan(eta_prime)) throw InputError("glrt_pfa: threshold is NaN");
  if (!(eta_prime > glrt_minimum(dof, noise_var))) return {1.0, true};
  const auto iv = glrt_acceptance_interval(eta_prime, dof, noise_var);
  const double p = chi2_cdf(iv.lower, dof) + chi2_sf(iv.upper, dof);
  return {std::clamp(p, 0.0, 1.0), false};
}

double glrt_pfa_checked(double eta_prime, int dof, double noise_var) {
  const GlrtPfa p = glrt_pfa(eta_prime, dof, noise_var);
  if (p.degenerate) throw DomainError("GLRT threshold at or below the statistic minimum");
  return p.value;
}

double glrt_threshold(double target_pfa, int dof, double noise_var) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0)) {
    throw InputError("glrt_threshold: target PFA must lie in (0, 1)");
  }
  // Bisection on log(eta'), PFA is nonincreasing in eta'.
  double lo = std::log(glrt_minimum(dof, noise_var));
  double hi = lo + 1.0;
  while (glrt_pfa(std::exp(hi), dof, noise_var).value > target_pfa) {
    hi = lo + 2.0 * (hi - lo);
    if (hi - lo > 1e6) throw DomainError("glrt_threshold: target PFA unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (glrt_pfa(std::exp(mid), dof, noise_var).value > target_pfa) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(hi);
}

GlrtDecision glrt_decide(StreamId id, std::span<const double> y, double noise_var,
                         double eta_prime) {
  double e = 0.0;
  for (double v : y) e += v * v;
  const auto t = static_cast<int>(y.size());
  GlrtDecision d;
  d.stream = id;
  d.log_statistic = glrt_log_statistic(e, t, noise_var);
  d.statistic = std::exp(d.log_statistic);
  d.threshold = eta_prime;
  d.signal_variance = e / t - noise_var;
  d.inactive = d.log_statistic < std::log(eta_prime);
  return d;
}

void validate(const SensingConfig& cfg) {
  if (cfg.smoothing < 1 || cfg.count < 1) throw InputError("sensing: T and L must be >= 1");
  if (cfg.fine_samples < 1) throw InputError("sensing: fine stage needs >= 1 sample");
  if (!(cfg.noise_var > 0.0)) throw InputError("sensing: noise variance must be positive");
  if (!cfg.fast_eta && !(cfg.fast_pfa > 0.0 && cfg.fast_pfa < 1.0)) {
    throw InputError("sensing: fast PFA must lie in (0, 1)");
  }
  if (!cfg.fine_threshold && !(cfg.fine_pfa > 0.0 && cfg.fine_pfa < 1.0)) {
    throw InputError("sensing: fine PFA must lie in (0, 1)");
  }
}

bool DetectionReport::flagged(StreamId id) const {
  return std::find(inactive_index_set.begin(), inactive_index_set.end(), id) !=
         inactive_index_set.end();
}

DetectionReport run_sensing_pipeline(std::span<const CVector> raw, const SensingVectorSet& vectors,
                                     const SensingConfig& cfg, double fast_eta, double fine_eta) {
  validate(cfg);
  if (raw.size() < static_cast<std::size_t>(cfg.total_samples())) {
    throw InputError("sensing pipeline: need " + std::to_string(cfg.total_samples()) +
                     " samples, got " + std::to_string(raw.size()));
  }
  if (cfg.enforce_smoothing) check_smoothing_factor(cfg.smoothing, static_cast<int>(raw[0].size()));
  DetectionReport rep;
  const auto fast_part = raw.first(static_cast<std::size_t>(cfg.fast_samples()));
  rep.fast = detect_hole(fast_part, cfg.smoothing, cfg.count, cfg.noise_var, fast_eta, cfg.form);
  if (!rep.fast.hole_present) return rep;
  const auto fine_part =
      raw.subspan(static_cast<std::size_t>(cfg.fast_samples()), static_cast<std::size_t>(cfg.fine_samples));
  for (std::size_t i = 0; i < vectors.streams.size(); ++i) {
    const auto y = project_stream_samples(vectors.vectors[i], fine_part, cfg.convention);
    rep.fine.push_back(glrt_decide(vectors.streams[i], y, cfg.noise_var, fine_eta));
    if (rep.fine.back().inactive) rep.inactive_index_set.push_back(vectors.streams[i]);
  }
  return rep;
}

namespace {

double resolve_fast_eta(const SensingConfig& cfg, int rx_antennas) {
  if (cfg.fast_eta) return *cfg.fast_eta;
  return fast_threshold(cfg.fast_pfa, cfg.count, cfg.smoothing, rx_antennas, cfg.dim);
}

double resolve_fine_eta(const SensingConfig& cfg) {
  if (cfg.fine_threshold) return *cfg.fine_threshold;
  return glrt_threshold(cfg.fine_pfa, cfg.fine_dof(), cfg.noise_var);
}

}  // namespace

DetectionReport run_sensing_pipeline(std::span<const CVector> raw, const ChannelSet& channels,
                                     const IASolution& ia, const SensingConfig& cfg) {
  validate(cfg);
  const int n0 = static_cast<int>(channels(0, 1).rows());
  return run_sensing_pipeline(raw, build_sensing_vectors(channels, ia), cfg,
                              resolve_fast_eta(cfg, n0), resolve_fine_eta(cfg));
}

std::vector<DetectionReport> run_sensing_rounds(
    const std::function<std::vector<CVector>(int)>& source, const ChannelSet& channels,
    const IASolution& ia, const SensingConfig& cfg, int max_rounds) {
  validate(cfg);
  if (max_rounds < 1) throw InputError("run_sensing_rounds: max_rounds must be >= 1");
  const int n0 = static_cast<int>(channels(0, 1).rows());
  const auto vectors = build_sensing_vectors(channels, ia);
  const double fast_eta = resolve_fast_eta(cfg, n0);
  const double fine_eta = resolve_fine_eta(cfg);
  std::vector<DetectionReport> out;
  for (int round = 0; round < max_rounds; ++round) {
    const auto raw = source(cfg.total_samples());
    out.push_back(run_sensing_pipeline(raw, vectors, cfg, fast_eta, fine_eta));
    if (!out.back().fast.hole_present) break;
  }
  return out;
}

std::string to_text(const DetectionReport& report) {
  std::ostringstream os;
  os << "hole=" << (report.fast.hole_present ? 1 : 0) << " lambda_min=" << fmt(report.fast.lambda_min)
     << " eta=" << fmt(report.fast.threshold) << " inactive=";
  for (std::size_t i = 0; i < report.inactive_index_set.size(); ++i) {
    if (i) os << ';';
    os << '(' << report.inactive_index_set[i].pair << ',' << report.inactive_index_set[i].stream + 1
       << ')';
  }
  return os.str();
}

void write_report_csv_header(std::ostream& out) {
  out << "trial,stage1_lambda_min,stage1_eta,hole,pair,stream,statistic,threshold,inactive\n";
}

void write_report_csv(std::ostream& out, long trial, const DetectionReport& report) {
  const std::string head = std::to_string(trial) + ',' + fmt(report.fast.lambda_min) + ',' +
                           fmt(report.fast.threshold) + ',' +
                           (report.fast.hole_present ? "1" : "0") + ',';
  if (report.fine.empty()) {
    out << head << ",,,,\n";
    return;
  }
  for (const auto& d : report.fine) {
    out << head << d.stream.pair << ',' << d.stream.stream + 1 << ',' << fmt(d.statistic) << ','
        << fmt(d.threshold) << ',' << (d.inactive ? 1 : 0) << '\n';
  }
}

}  // namespace iacr
