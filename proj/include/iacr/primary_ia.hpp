#pragma once

#include <optional>
#include <vector>

#include "iacr/model.hpp"

namespace iacr {

/// Primary precoders/decoders. Index k = 1..K; entry 0 is unused (the
/// secondary design lives in SecondaryDesign) so V[k] pairs with H(., k).
struct IASolution {
  std::vector<CMatrix> V;
  std::vector<CMatrix> U;
  int iterations_used = 0;
  double final_leakage = 0.0;            // total weighted leakage, watts
  std::vector<double> leakage_history;   // one entry per completed iteration
};

struct IAOptions {
  int iterations = 20;
  /// Stop early once total leakage falls below this (watts). 0 disables.
  double leakage_threshold = 0.0;
};

/// Distributed minimum-leakage alignment: each receiver takes the eigenvectors
/// of the d smallest eigenvalues of its interference covariance as decoder,
/// then the reciprocal network (H^H) does the same for the precoders.
/// Precoders are initialised with Haar-random orthonormal columns from `rng`.
IASolution distributed_ia(const ChannelSet& channels, const NetworkConfig& cfg,
                          SeededRng& rng, IAOptions options = {});

/// Total weighted interference power left in the decoders' signal subspaces.
double total_leakage(const IASolution& sol, const ChannelSet& channels, const NetworkConfig& cfg);

/// max over k != j of ||U_k^H H_kj V_j||_F; 0 when K = 1.
double alignment_residual(const IASolution& sol, const ChannelSet& channels,
                          const NetworkConfig& cfg);

/// max over receivers of (interference power after decoding) / (desired
/// signal power after decoding), both weighted by per-stream powers.
double relative_alignment_residual(const IASolution& sol, const ChannelSet& channels,
                                   const NetworkConfig& cfg);

/// Numerical rank of U_k^H H_kk V_k: singular values above rel_tol * ||H_kk||_2.
/// The scale is the channel's, not the product's, so a d = 1 link whose
/// precoder sits in null(H_kk) reports rank 0.
int direct_link_rank(const IASolution& sol, const ChannelSet& channels, int k,
                     double rel_tol = kDefaultTolerances.rank);

struct SecondaryDesign;

/// Achievable rate (bits/s/Hz) of every primary pair, index 1..K (entry 0 is
/// unused and 0). Interference from other pairs' active streams and, when a
/// design is given, from the secondary transmitter is treated as noise.
std::vector<double> pair_rates(const IASolution& sol, const ChannelSet& channels,
                               const NetworkConfig& cfg, const ActivityPattern& activity,
                               const SecondaryDesign* secondary = nullptr);

double pair_rate(const IASolution& sol, const ChannelSet& channels, const NetworkConfig& cfg,
                 const ActivityPattern& activity, int k,
                 const SecondaryDesign* secondary = nullptr);

/// Columns of V_k belonging to active streams.
CMatrix active_columns(const CMatrix& v, const ActivityPattern& activity, int k);

}  // namespace iacr
