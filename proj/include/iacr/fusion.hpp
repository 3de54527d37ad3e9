#pragma once

#include <vector>

#include "iacr/model.hpp"
#include "iacr/primary_ia.hpp"

namespace iacr {

/// Identifies primary stream `stream` (0-based) of pair `pair` (1-based).
struct StreamId {
  int pair = 1;
  int stream = 0;
  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// N0 x sum(d) matrix whose columns are the received directions H_0k V_k(:,s),
/// pair-major, stream-minor.
CMatrix stream_directions(const ChannelSet& channels, const IASolution& ia);

/// Primary signal, noise and their sum at the secondary receiver (the
/// fusion center) over n consecutive sample times. The secondary is silent.
struct FusionSamples {
  std::vector<CVector> signal;
  std::vector<CVector> noise;
  std::vector<CVector> received;
};

FusionSamples simulate_fusion_samples(const ChannelSet& channels, const IASolution& ia,
                                      const NetworkConfig& cfg, const ActivityPattern& activity,
                                      int n, SeededRng& rng);

/// E[x x^H] of the primary signal at the fusion center (active streams only).
CMatrix signal_covariance_exact(const ChannelSet& channels, const IASolution& ia,
                                const NetworkConfig& cfg, const ActivityPattern& activity);

}  // namespace iacr
