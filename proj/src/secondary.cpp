#include "iacr/secondary.hpp"

#include <cmath>

#include "iacr/errors.hpp"

namespace iacr {

CMatrix stack_interference_matrix(const ChannelSet& channels, const IASolution& ia,
                                  const ActivityPattern& activity) {
  const Eigen::Index m0 = channels(1, 0).cols();
  CMatrix p(activity.total_active(), m0);
  Eigen::Index row = 0;
  for (int k = 1; k <= activity.num_pairs(); ++k) {
    const CMatrix& u = ia.U[static_cast<std::size_t>(k)];
    for (int s = 0; s < activity.streams(k); ++s) {
      if (!activity.is_active(k, s)) continue;
      p.row(row++) = u.col(s).adjoint() * channels(k, 0);
    }
  }
  return p;
}

bool zf_feasible(int tx_antennas, int streams, const ActivityPattern& activity) {
  return tx_antennas >= streams + activity.total_active();
}

CMatrix zf_precoder(const CMatrix& p, int streams, double null_tol) {
  if (streams < 0) throw InputError("zf_precoder: negative stream count");
  const CMatrix basis = null_space_basis(p, null_tol);
  if (basis.cols() < streams) {
    throw FeasibilityError("zf_precoder: null space of P has dimension " +
                           std::to_string(basis.cols()) + " < " + std::to_string(streams) +
                           " requested streams; use underlay_precoder instead");
  }
  return basis.leftCols(streams);
}

CMatrix leakage_matrix(const ChannelSet& channels, const IASolution& ia, const NetworkConfig& cfg,
                       const ActivityPattern& activity) {
  const CMatrix p = stack_interference_matrix(channels, ia, activity);
  const CMatrix q = cfg.secondary().power_per_stream() * (p.adjoint() * p);
  return 0.5 * (q + q.adjoint());
}

UnderlayPrecoder underlay_precoder(const ChannelSet& channels, const IASolution& ia,
                                   const NetworkConfig& cfg, const ActivityPattern& activity,
                                   int streams) {
  if (streams < 0 || streams > cfg.secondary().tx_antennas) {
    throw InputError("underlay_precoder: stream count exceeds transmit antennas");
  }
  const auto eig = hermitian_eig(leakage_matrix(channels, ia, cfg, activity));
  return {eig.vectors.leftCols(streams), eig.values.head(streams).sum()};
}

double cr_leakage(const CMatrix& v0, const ChannelSet& channels, const IASolution& ia,
                  const NetworkConfig& cfg, int k) {
  if (v0.cols() == 0) return 0.0;
  const CMatrix g = ia.U[static_cast<std::size_t>(k)].adjoint() * channels(k, 0) * v0;
  return cfg.secondary().power_per_stream() * g.squaredNorm();
}

double cr_leakage(const CMatrix& v0, const ChannelSet& channels, const IASolution& ia,
                  const NetworkConfig& cfg, int k, const ActivityPattern& activity) {
  if (v0.cols() == 0 || !activity.pair_active(k)) return 0.0;
  const CMatrix u = active_columns(ia.U[static_cast<std::size_t>(k)], activity, k);
  const CMatrix g = u.adjoint() * channels(k, 0) * v0;
  return cfg.secondary().power_per_stream() * g.squaredNorm();
}

CMatrix interference_covariance(int l, const ChannelSet& channels, const IASolution& ia,
                                const NetworkConfig& cfg, const ActivityPattern& activity,
                                const CMatrix& v0) {
  const int n0 = cfg.secondary().rx_antennas;
  CMatrix b = cfg.noise_var * CMatrix::Identity(n0, n0);
  for (int j = 1; j <= cfg.num_pairs(); ++j) {
    if (!activity.pair_active(j)) continue;
    const CMatrix g =
        channels(0, j) * active_columns(ia.V[static_cast<std::size_t>(j)], activity, j);
    b.noalias() += cfg.pair(j).power_per_stream() * g * g.adjoint();
  }
  // Other secondary streams; the stream's own term cancels.
  for (Eigen::Index c = 0; c < v0.cols(); ++c) {
    if (c == l) continue;
    const CVector g = channels(0, 0) * v0.col(c);
    b.noalias() += cfg.secondary().power_per_stream() * g * g.adjoint();
  }
  return 0.5 * (b + b.adjoint());
}

CVector max_sinr_decoder(const CMatrix& b, const CMatrix& h00, const CVector& v) {
  const CVector w = solve_hermitian_pd(b, h00 * v);
  const double n = w.norm();
  if (!(n > 0.0)) throw SingularityError("max_sinr_decoder: effective channel is zero");
  return w / n;
}

double sinr_of_decoder(const CVector& u, const CMatrix& b, const CVector& h,
                       double power_per_stream) {
  const double num = std::norm(u.dot(h));  // dot() conjugates the left operand
  const double den = u.dot(b * u).real();
  return power_per_stream * num / den;
}

double max_sinr_closed_form(const CMatrix& b, const CVector& h, double power_per_stream) {
  return power_per_stream * h.dot(solve_hermitian_pd(b, h)).real();
}

double secondary_sinr(int l, const SecondaryDesign& design, const ChannelSet& channels,
                      const IASolution& ia, const NetworkConfig& cfg,
                      const ActivityPattern& activity) {
  const CMatrix b = interference_covariance(l, channels, ia, cfg, activity, design.V0);
  return sinr_of_decoder(design.U0.col(l), b, channels(0, 0) * design.V0.col(l),
                         cfg.secondary().power_per_stream());
}

KantorovichBounds kantorovich_bounds(const CVector& h, const CMatrix& b) {
  const double n = h.norm();
  if (!(n > 0.0)) throw InputError("kantorovich_bounds: zero vector");
  const CVector unit = h / n;
  const auto eig = hermitian_eig(b);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  if (!(lo > 0.0)) throw SingularityError("kantorovich_bounds: B is not positive definite");
  const double quad = unit.dot(b * unit).real();
  KantorovichBounds out;
  out.lower = 1.0 / quad;
  out.upper = (lo + hi) * (lo + hi) / (4.0 * lo * hi) / quad;
  out.value = unit.dot(solve_hermitian_pd(b, unit)).real();
  return out;
}

double secondary_rate(const SecondaryDesign& design) {
  double rate = 0.0;
  for (double g : design.sinr_per_stream) rate += std::log2(1.0 + g);
  return rate;
}

SecondaryDesign design_secondary(const ChannelSet& channels, const IASolution& ia,
                                 const NetworkConfig& cfg, const ActivityPattern& activity,
                                 PrecoderRequest request) {
  const LinkConfig& sec = cfg.secondary();
  SecondaryDesign d;
  const bool feasible = zf_feasible(sec.tx_antennas, sec.streams, activity);
  const bool use_zf = request == PrecoderRequest::kZeroForcing ||
                      (request == PrecoderRequest::kAuto && feasible);
  if (use_zf) {
    d.V0 = zf_precoder(stack_interference_matrix(channels, ia, activity), sec.streams);
    d.mode = PrecoderMode::kZeroForcing;
  } else {
    d.V0 = underlay_precoder(channels, ia, cfg, activity, sec.streams).V0;
    d.mode = PrecoderMode::kTraceMin;
  }

  d.U0 = CMatrix(sec.rx_antennas, sec.streams);
  for (int l = 0; l < sec.streams; ++l) {
    const CMatrix b = interference_covariance(l, channels, ia, cfg, activity, d.V0);
    d.U0.col(l) = max_sinr_decoder(b, channels(0, 0), d.V0.col(l));
    d.sinr_per_stream.push_back(sinr_of_decoder(d.U0.col(l), b, channels(0, 0) * d.V0.col(l),
                                                sec.power_per_stream()));
  }
  d.leakage_per_receiver.assign(static_cast<std::size_t>(cfg.num_pairs() + 1), 0.0);
  for (int k = 1; k <= cfg.num_pairs(); ++k)
    d.leakage_per_receiver[static_cast<std::size_t>(k)] =
        cr_leakage(d.V0, channels, ia, cfg, k, activity);
  return d;
}

double primary_to_secondary_interference(const SecondaryDesign& design,
                                         const ChannelSet& channels, const IASolution& ia,
                                         const NetworkConfig& cfg,
                                         const ActivityPattern& activity) {
  double total = 0.0;
  for (int j = 1; j <= cfg.num_pairs(); ++j) {
    if (!activity.pair_active(j)) continue;
    const CMatrix g = design.U0.adjoint() * channels(0, j) *
                      active_columns(ia.V[static_cast<std::size_t>(j)], activity, j);
    total += cfg.pair(j).power_per_stream() * g.squaredNorm();
  }
  return total;
}

}  // namespace iacr
