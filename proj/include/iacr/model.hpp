#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iacr/linalg.hpp"
#include "iacr/rng.hpp"

namespace iacr {

/// Antennas, streams and transmit power of one transmitter/receiver pair.
struct LinkConfig {
  int tx_antennas = 0;
  int rx_antennas = 0;
  int streams = 0;
  double power_w = 0.0;

  double power_per_stream() const { return streams > 0 ? power_w / streams : 0.0; }
};

/// Link 0 is the secondary (cognitive) pair, links 1..K the primary pairs.
struct NetworkConfig {
  std::vector<LinkConfig> links;
  double noise_var = 1.0;

  int num_pairs() const { return static_cast<int>(links.size()) - 1; }
  const LinkConfig& secondary() const { return links.at(0); }
  LinkConfig& secondary() { return links.at(0); }
  const LinkConfig& pair(int k) const { return links.at(static_cast<std::size_t>(k)); }
  LinkConfig& pair(int k) { return links.at(static_cast<std::size_t>(k)); }
  /// Sum of primary stream counts.
  int total_primary_streams() const;

  /// K primary pairs of identical shape plus one secondary link.
  static NetworkConfig uniform(int num_pairs, LinkConfig primary, LinkConfig secondary,
                               double noise_var);
  /// Three 2x2 single-stream primary pairs, a 3x3 single-stream secondary,
  /// 10 dBW everywhere, unit noise.
  static NetworkConfig reference();
};

/// Every violated invariant as a human-readable message; empty means valid.
std::vector<std::string> validate_config(const NetworkConfig& cfg);

/// Throws InputError listing every violation.
void require_valid(const NetworkConfig& cfg);

/// All channel matrices H[k][l] (receiver k, transmitter l), k, l in 0..K.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(std::vector<std::vector<CMatrix>> h) : h_(std::move(h)) {}

  const CMatrix& operator()(int rx, int tx) const {
    return h_.at(static_cast<std::size_t>(rx)).at(static_cast<std::size_t>(tx));
  }
  CMatrix& operator()(int rx, int tx) {
    return h_.at(static_cast<std::size_t>(rx)).at(static_cast<std::size_t>(tx));
  }
  int num_nodes() const { return static_cast<int>(h_.size()); }

 private:
  std::vector<std::vector<CMatrix>> h_;
};

/// Which primary streams transmit. Pairs are 1-based (pair 0 is the secondary
/// and is always considered active); streams are 0-based.
class ActivityPattern {
 public:
  ActivityPattern() = default;
  static ActivityPattern all_active(const NetworkConfig& cfg);

  int num_pairs() const { return static_cast<int>(active_.size()); }
  int streams(int pair) const;
  bool is_active(int pair, int stream) const;
  void set(int pair, int stream, bool active);
  void silence_pair(int pair);
  /// Active stream count of a pair.
  int active_streams(int pair) const;
  int total_active() const;
  bool pair_active(int pair) const { return active_streams(pair) > 0; }

 private:
  std::vector<std::vector<bool>> active_;  // [pair - 1][stream]
};

/// Draws every H[k][l] with i.i.d. CN(0, 1) entries.
ChannelSet draw_channels(const NetworkConfig& cfg, SeededRng& rng);

/// n unit-variance complex Gaussian symbol vectors of dimension d. The
/// per-stream power p/d is applied by the caller.
std::vector<CVector> draw_symbols(int d, int n, SeededRng& rng);

/// n noise vectors with i.i.d. CN(0, noise_var) entries.
std::vector<CVector> draw_noise(int dim, double noise_var, int n, SeededRng& rng);

/// Keeps the first `tx` secondary transmit antennas (columns of H[k][0]) and
/// the first `rx` secondary receive antennas (rows of H[0][l]), so antenna
/// sweeps share one channel draw.
ChannelSet truncate_secondary(const ChannelSet& channels, int tx, int rx);

/// Replaces h by a random matrix of the given rank (for degenerate-channel tests).
void inject_rank_deficiency(CMatrix& h, int rank, SeededRng& rng);

}  // namespace iacr
