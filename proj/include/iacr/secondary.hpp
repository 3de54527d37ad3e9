#pragma once

#include <vector>

#include "iacr/model.hpp"
#include "iacr/primary_ia.hpp"

namespace iacr {

enum class PrecoderMode { kZeroForcing, kTraceMin };

/// Which precoder the caller wants. kAuto picks zero-forcing when the
/// antenna condition holds and trace minimisation otherwise.
enum class PrecoderRequest { kAuto, kZeroForcing, kTraceMin };

struct SecondaryDesign {
  CMatrix V0;                                // M0 x d0, orthonormal columns
  CMatrix U0;                                // N0 x d0, unit-norm columns
  std::vector<double> sinr_per_stream;       // linear
  std::vector<double> leakage_per_receiver;  // watts on active streams, index 1..K
  PrecoderMode mode = PrecoderMode::kZeroForcing;
};

/// Rows U_k(:,s)^H H_k0 for every active primary stream (k, s), pair-major.
CMatrix stack_interference_matrix(const ChannelSet& channels, const IASolution& ia,
                                  const ActivityPattern& activity);

/// M0 >= d0 + total active primary streams.
bool zf_feasible(int tx_antennas, int streams, const ActivityPattern& activity);

/// d0 orthonormal vectors from null(P), ordered by increasing singular value.
/// Throws FeasibilityError when null(P) has fewer than d0 dimensions.
CMatrix zf_precoder(const CMatrix& p, int streams,
                    double null_tol = kDefaultTolerances.null_space);

struct UnderlayPrecoder {
  CMatrix V0;
  double objective = 0.0;  // Tr(V0^H Q V0) = sum of the d0 smallest eigenvalues of Q
};

/// Minimises the total leakage Tr(V0^H Q V0) over orthonormal V0, with
/// Q = (p0/d0) sum_k H_k0^H U_k U_k^H H_k0 over active primary streams.
UnderlayPrecoder underlay_precoder(const ChannelSet& channels, const IASolution& ia,
                                   const NetworkConfig& cfg, const ActivityPattern& activity,
                                   int streams);

/// The leakage matrix Q used by underlay_precoder.
CMatrix leakage_matrix(const ChannelSet& channels, const IASolution& ia, const NetworkConfig& cfg,
                       const ActivityPattern& activity);

/// Interference the secondary transmitter leaks into primary receiver k's
/// decoded subspace (watts).
double cr_leakage(const CMatrix& v0, const ChannelSet& channels, const IASolution& ia,
                  const NetworkConfig& cfg, int k);

/// Same, restricted to the decoder columns of k's active streams (0 for a
/// silent pair).
double cr_leakage(const CMatrix& v0, const ChannelSet& channels, const IASolution& ia,
                  const NetworkConfig& cfg, int k, const ActivityPattern& activity);

/// Interference-plus-noise covariance B_l seen by secondary stream l.
CMatrix interference_covariance(int l, const ChannelSet& channels, const IASolution& ia,
                                const NetworkConfig& cfg, const ActivityPattern& activity,
                                const CMatrix& v0);

/// B^{-1} h / ||B^{-1} h|| with h = H00 v.
CVector max_sinr_decoder(const CMatrix& b, const CMatrix& h00, const CVector& v);

/// (p/d) |u^H h|^2 / (u^H B u), the SINR of a decoder u.
double sinr_of_decoder(const CVector& u, const CMatrix& b, const CVector& h,
                       double power_per_stream);

/// (p/d) h^H B^{-1} h, the largest achievable SINR.
double max_sinr_closed_form(const CMatrix& b, const CVector& h, double power_per_stream);

double secondary_sinr(int l, const SecondaryDesign& design, const ChannelSet& channels,
                      const IASolution& ia, const NetworkConfig& cfg,
                      const ActivityPattern& activity);

struct KantorovichBounds {
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;  // h^H B^{-1} h for the unit-normalised h
};

/// Sandwich 1/(h^H B h) <= h^H B^{-1} h <= (l1 + lN)^2 / (4 l1 lN) / (h^H B h)
/// for h normalised to unit norm. Scale by p0/d0 for SINR bounds.
KantorovichBounds kantorovich_bounds(const CVector& h, const CMatrix& b);

/// sum_l log2(1 + SINR_l).
double secondary_rate(const SecondaryDesign& design);

/// Full secondary design: precoder (per `request`), per-stream max-SINR
/// decoders, SINRs and per-receiver leakage.
SecondaryDesign design_secondary(const ChannelSet& channels, const IASolution& ia,
                                 const NetworkConfig& cfg, const ActivityPattern& activity,
                                 PrecoderRequest request = PrecoderRequest::kAuto);

/// Interference power from active primary streams in the secondary decoders'
/// outputs, summed over secondary streams (watts).
double primary_to_secondary_interference(const SecondaryDesign& design,
                                         const ChannelSet& channels, const IASolution& ia,
                                         const NetworkConfig& cfg,
                                         const ActivityPattern& activity);

}  // namespace iacr
