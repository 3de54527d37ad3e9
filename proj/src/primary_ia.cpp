#include "iacr/primary_ia.hpp"

#include <algorithm>
#include <cmath>

#include "iacr/errors.hpp"
#include "iacr/secondary.hpp"

namespace iacr {

namespace {

void check_dims(const ChannelSet& channels, const NetworkConfig& cfg) {
  const int nodes = cfg.num_pairs() + 1;
  if (channels.num_nodes() != nodes) {
    throw InputError("distributed_ia: channel set has " + std::to_string(channels.num_nodes()) +
                     " nodes, config has " + std::to_string(nodes));
  }
  for (int k = 0; k < nodes; ++k) {
    for (int l = 0; l < nodes; ++l) {
      const CMatrix& h = channels(k, l);
      if (h.rows() != cfg.pair(k).rx_antennas || h.cols() != cfg.pair(l).tx_antennas) {
        throw InputError("channel H[" + std::to_string(k) + "][" + std::to_string(l) +
                         "] does not match the configured antenna counts");
      }
    }
  }
}

// Interference covariance seen at primary receiver k.
CMatrix receive_interference(const IASolution& sol, const ChannelSet& channels,
                             const NetworkConfig& cfg, int k) {
  const int n = cfg.pair(k).rx_antennas;
  CMatrix q = CMatrix::Zero(n, n);
  for (int j = 1; j <= cfg.num_pairs(); ++j) {
    if (j == k) continue;
    const CMatrix hv = channels(k, j) * sol.V[static_cast<std::size_t>(j)];
    q.noalias() += cfg.pair(j).power_per_stream() * hv * hv.adjoint();
  }
  return q;
}

// Interference covariance seen at primary transmitter j on the reciprocal
// channels H^H, with the receivers' decoders acting as precoders.
CMatrix reciprocal_interference(const IASolution& sol, const ChannelSet& channels,
                                const NetworkConfig& cfg, int j) {
  const int m = cfg.pair(j).tx_antennas;
  CMatrix q = CMatrix::Zero(m, m);
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    if (k == j) continue;
    const CMatrix hu = channels(k, j).adjoint() * sol.U[static_cast<std::size_t>(k)];
    q.noalias() += cfg.pair(k).power_per_stream() * hu * hu.adjoint();
  }
  return q;
}

}  // namespace

CMatrix active_columns(const CMatrix& v, const ActivityPattern& activity, int k) {
  CMatrix out(v.rows(), activity.active_streams(k));
  Eigen::Index c = 0;
  for (int s = 0; s < v.cols(); ++s)
    if (activity.is_active(k, s)) out.col(c++) = v.col(s);
  return out;
}

double total_leakage(const IASolution& sol, const ChannelSet& channels, const NetworkConfig& cfg) {
  double total = 0.0;
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    const CMatrix& u = sol.U[static_cast<std::size_t>(k)];
    total += (u.adjoint() * receive_interference(sol, channels, cfg, k) * u).trace().real();
  }
  return total;
}

IASolution distributed_ia(const ChannelSet& channels, const NetworkConfig& cfg, SeededRng& rng,
                          IAOptions options) {
  require_valid(cfg);
  check_dims(channels, cfg);
  if (options.iterations < 1) throw InputError("distributed_ia: iterations must be >= 1");

  const int K = cfg.num_pairs();
  IASolution sol;
  sol.V.resize(static_cast<std::size_t>(K + 1));
  sol.U.resize(static_cast<std::size_t>(K + 1));
  for (int k = 1; k <= K; ++k) {
    sol.V[static_cast<std::size_t>(k)] =
        random_orthonormal(cfg.pair(k).tx_antennas, cfg.pair(k).streams, rng);
  }

  for (int it = 0; it < options.iterations; ++it) {
    for (int k = 1; k <= K; ++k) {
      sol.U[static_cast<std::size_t>(k)] =
          smallest_eigenvectors(receive_interference(sol, channels, cfg, k), cfg.pair(k).streams);
    }
    for (int j = 1; j <= K; ++j) {
      sol.V[static_cast<std::size_t>(j)] = smallest_eigenvectors(
          reciprocal_interference(sol, channels, cfg, j), cfg.pair(j).streams);
    }
    sol.iterations_used = it + 1;
    sol.final_leakage = total_leakage(sol, channels, cfg);
    sol.leakage_history.push_back(sol.final_leakage);
    if (sol.final_leakage < options.leakage_threshold) break;
  }
  return sol;
}

double alignment_residual(const IASolution& sol, const ChannelSet& channels,
                          const NetworkConfig& cfg) {
  double worst = 0.0;
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    for (int j = 1; j <= cfg.num_pairs(); ++j) {
      if (j == k) continue;
      const double r = (sol.U[static_cast<std::size_t>(k)].adjoint() * channels(k, j) *
                        sol.V[static_cast<std::size_t>(j)])
                           .norm();
      worst = std::max(worst, r);
    }
  }
  return worst;
}

double relative_alignment_residual(const IASolution& sol, const ChannelSet& channels,
                                   const NetworkConfig& cfg) {
  double worst = 0.0;
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    const CMatrix& u = sol.U[static_cast<std::size_t>(k)];
    const double interference =
        (u.adjoint() * receive_interference(sol, channels, cfg, k) * u).trace().real();
    const double signal = cfg.pair(k).power_per_stream() *
                          (u.adjoint() * channels(k, k) * sol.V[static_cast<std::size_t>(k)])
                              .squaredNorm();
    if (interference == 0.0) continue;
    worst = std::max(worst, signal > 0.0 ? interference / signal
                                         : std::numeric_limits<double>::infinity());
  }
  return worst;
}

int direct_link_rank(const IASolution& sol, const ChannelSet& channels, int k, double rel_tol) {
  const CMatrix& h = channels(k, k);
  const CMatrix g = sol.U[static_cast<std::size_t>(k)].adjoint() * h * sol.V[static_cast<std::size_t>(k)];
  if (g.size() == 0) return 0;
  const double scale = Eigen::JacobiSVD<CMatrix>(h).singularValues()(0);
  const RVector sv = Eigen::JacobiSVD<CMatrix>(g).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * scale) ++rank;
  return rank;
}

double pair_rate(const IASolution& sol, const ChannelSet& channels, const NetworkConfig& cfg,
                 const ActivityPattern& activity, int k, const SecondaryDesign* secondary) {
  if (!activity.pair_active(k)) return 0.0;
  const CMatrix& u = sol.U[static_cast<std::size_t>(k)];
  const Eigen::Index d = u.cols();

  CMatrix c = cfg.noise_var * (u.adjoint() * u);
  for (int j = 1; j <= cfg.num_pairs(); ++j) {
    if (j == k || !activity.pair_active(j)) continue;
    const CMatrix g =
        u.adjoint() * channels(k, j) * active_columns(sol.V[static_cast<std::size_t>(j)], activity, j);
    c.noalias() += cfg.pair(j).power_per_stream() * g * g.adjoint();
  }
  if (secondary != nullptr && secondary->V0.cols() > 0) {
    const CMatrix g = u.adjoint() * channels(k, 0) * secondary->V0;
    c.noalias() += cfg.secondary().power_per_stream() * g * g.adjoint();
  }

  const CMatrix s =
      u.adjoint() * channels(k, k) * active_columns(sol.V[static_cast<std::size_t>(k)], activity, k);
  const CMatrix signal = cfg.pair(k).power_per_stream() * s * s.adjoint();

  Eigen::LLT<CMatrix> llt(c);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("pair_rate: interference-plus-noise covariance is singular");
  }
  // det(I + S C^{-1}) = det(I + L^{-1} S L^{-H}) with C = L L^H.
  CMatrix whitened = llt.matrixL().solve(signal);
  whitened = llt.matrixL().solve(whitened.adjoint()).adjoint();
  const CMatrix m = CMatrix::Identity(d, d) + 0.5 * (whitened + whitened.adjoint());
  const auto eig = hermitian_eig(m);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) rate += std::log2(eig.values(i));
  return rate;
}

std::vector<double> pair_rates(const IASolution& sol, const ChannelSet& channels,
                               const NetworkConfig& cfg, const ActivityPattern& activity,
                               const SecondaryDesign* secondary) {
  std::vector<double> out(static_cast<std::size_t>(cfg.num_pairs() + 1), 0.0);
  for (int k = 1; k <= cfg.num_pairs(); ++k)
    out[static_cast<std::size_t>(k)] = pair_rate(sol, channels, cfg, activity, k, secondary);
  return out;
}

}  // namespace iacr
