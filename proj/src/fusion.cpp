#include "iacr/fusion.hpp"

#include <cmath>

namespace iacr {

CMatrix stream_directions(const ChannelSet& channels, const IASolution& ia) {
  const int pairs = static_cast<int>(ia.V.size()) - 1;
  Eigen::Index total = 0;
  for (int k = 1; k <= pairs; ++k) total += ia.V[static_cast<std::size_t>(k)].cols();
  CMatrix out(channels(0, 0).rows(), total);
  Eigen::Index c = 0;
  for (int k = 1; k <= pairs; ++k) {
    const CMatrix hv = channels(0, k) * ia.V[static_cast<std::size_t>(k)];
    out.middleCols(c, hv.cols()) = hv;
    c += hv.cols();
  }
  return out;
}

FusionSamples simulate_fusion_samples(const ChannelSet& channels, const IASolution& ia,
                                      const NetworkConfig& cfg, const ActivityPattern& activity,
                                      int n, SeededRng& rng) {
  const int n0 = cfg.secondary().rx_antennas;
  FusionSamples out;
  out.signal.assign(static_cast<std::size_t>(n), CVector::Zero(n0));
  // Symbols of silent streams are still drawn so that the random sequence
  // does not depend on the activity pattern.
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    const CMatrix hv = channels(0, k) * ia.V[static_cast<std::size_t>(k)];
    const double amp = std::sqrt(cfg.pair(k).power_per_stream());
    const auto symbols = draw_symbols(cfg.pair(k).streams, n, rng);
    for (int s = 0; s < cfg.pair(k).streams; ++s) {
      if (!activity.is_active(k, s)) continue;
      for (int t = 0; t < n; ++t)
        out.signal[static_cast<std::size_t>(t)] += amp * symbols[static_cast<std::size_t>(t)](s) * hv.col(s);
    }
  }
  out.noise = draw_noise(n0, cfg.noise_var, n, rng);
  out.received.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    out.received[static_cast<std::size_t>(t)] =
        out.signal[static_cast<std::size_t>(t)] + out.noise[static_cast<std::size_t>(t)];
  }
  return out;
}

CMatrix signal_covariance_exact(const ChannelSet& channels, const IASolution& ia,
                                const NetworkConfig& cfg, const ActivityPattern& activity) {
  const int n0 = cfg.secondary().rx_antennas;
  CMatrix r = CMatrix::Zero(n0, n0);
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    const CMatrix g = channels(0, k) * active_columns(ia.V[static_cast<std::size_t>(k)], activity, k);
    r.noalias() += cfg.pair(k).power_per_stream() * g * g.adjoint();
  }
  return r;
}

}  // namespace iacr
