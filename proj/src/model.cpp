#include "iacr/model.hpp"

#include <algorithm>
#include <sstream>

#include "iacr/errors.hpp"

namespace iacr {

CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng,
                              double variance) {
  CMatrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian(variance);
  return m;
}

CMatrix random_orthonormal(Eigen::Index n, Eigen::Index k, SeededRng& rng) {
  if (k > n) throw InputError("random_orthonormal: more columns than rows");
  const CMatrix g = random_complex_matrix(n, k, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, k);
  // Fix the phase ambiguity of QR so the result is Haar distributed.
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

int NetworkConfig::total_primary_streams() const {
  int total = 0;
  for (int k = 1; k <= num_pairs(); ++k) total += pair(k).streams;
  return total;
}

NetworkConfig NetworkConfig::uniform(int num_pairs, LinkConfig primary, LinkConfig secondary,
                                     double noise_var) {
  NetworkConfig cfg;
  cfg.links.push_back(secondary);
  for (int k = 0; k < num_pairs; ++k) cfg.links.push_back(primary);
  cfg.noise_var = noise_var;
  return cfg;
}

NetworkConfig NetworkConfig::reference() {
  return uniform(3, {2, 2, 1, 10.0}, {3, 3, 1, 10.0}, 1.0);
}

std::vector<std::string> validate_config(const NetworkConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.links.size() < 2) out.emplace_back("network needs at least one primary pair");
  for (std::size_t k = 0; k < cfg.links.size(); ++k) {
    const auto& l = cfg.links[k];
    const std::string name = k == 0 ? std::string("secondary") : "pair " + std::to_string(k);
    if (l.tx_antennas < 1) out.push_back(name + ": transmit antenna count must be >= 1");
    if (l.rx_antennas < 1) out.push_back(name + ": receive antenna count must be >= 1");
    // The secondary may be configured with zero streams (sensing-only runs).
    if (l.streams < (k == 0 ? 0 : 1)) out.push_back(name + ": stream count must be >= 1");
    if (l.streams > std::min(l.tx_antennas, l.rx_antennas)) {
      std::ostringstream msg;
      msg << name << ": streams (" << l.streams << ") exceed min(M, N) = "
          << std::min(l.tx_antennas, l.rx_antennas);
      out.push_back(msg.str());
    }
    if (!(l.power_w > 0.0)) out.push_back(name + ": transmit power must be > 0");
  }
  if (!(cfg.noise_var > 0.0)) out.emplace_back("noise variance must be > 0");
  return out;
}

void require_valid(const NetworkConfig& cfg) {
  const auto v = validate_config(cfg);
  if (v.empty()) return;
  std::string msg = "invalid network configuration:";
  for (const auto& s : v) msg += "\n  " + s;
  throw InputError(msg);
}

ActivityPattern ActivityPattern::all_active(const NetworkConfig& cfg) {
  ActivityPattern a;
  for (int k = 1; k <= cfg.num_pairs(); ++k)
    a.active_.emplace_back(static_cast<std::size_t>(cfg.pair(k).streams), true);
  return a;
}

int ActivityPattern::streams(int pair) const {
  return static_cast<int>(active_.at(static_cast<std::size_t>(pair - 1)).size());
}

bool ActivityPattern::is_active(int pair, int stream) const {
  if (pair == 0) return true;
  return active_.at(static_cast<std::size_t>(pair - 1)).at(static_cast<std::size_t>(stream));
}

void ActivityPattern::set(int pair, int stream, bool active) {
  active_.at(static_cast<std::size_t>(pair - 1)).at(static_cast<std::size_t>(stream)) = active;
}

void ActivityPattern::silence_pair(int pair) {
  auto& row = active_.at(static_cast<std::size_t>(pair - 1));
  std::fill(row.begin(), row.end(), false);
}

int ActivityPattern::active_streams(int pair) const {
  const auto& row = active_.at(static_cast<std::size_t>(pair - 1));
  return static_cast<int>(std::count(row.begin(), row.end(), true));
}

int ActivityPattern::total_active() const {
  int total = 0;
  for (int k = 1; k <= num_pairs(); ++k) total += active_streams(k);
  return total;
}

ChannelSet draw_channels(const NetworkConfig& cfg, SeededRng& rng) {
  const int nodes = cfg.num_pairs() + 1;
  std::vector<std::vector<CMatrix>> h(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    for (int l = 0; l < nodes; ++l) {
      h[static_cast<std::size_t>(k)].push_back(
          random_complex_matrix(cfg.pair(k).rx_antennas, cfg.pair(l).tx_antennas, rng));
    }
  }
  return ChannelSet(std::move(h));
}

std::vector<CVector> draw_symbols(int d, int n, SeededRng& rng) {
  if (d < 1 || n < 1) throw InputError("draw_symbols: d and n must be >= 1");
  std::vector<CVector> out(static_cast<std::size_t>(n), CVector(d));
  for (auto& v : out)
    for (int i = 0; i < d; ++i) v(i) = rng.complex_gaussian(1.0);
  return out;
}

std::vector<CVector> draw_noise(int dim, double noise_var, int n, SeededRng& rng) {
  if (!(noise_var > 0.0)) throw InputError("draw_noise: noise variance must be > 0");
  if (dim < 1 || n < 1) throw InputError("draw_noise: dim and n must be >= 1");
  std::vector<CVector> out(static_cast<std::size_t>(n), CVector(dim));
  for (auto& v : out)
    for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian(noise_var);
  return out;
}

void inject_rank_deficiency(CMatrix& h, int rank, SeededRng& rng) {
  if (rank < 0 || rank > std::min(h.rows(), h.cols())) {
    throw InputError("inject_rank_deficiency: rank out of range");
  }
  h = random_complex_matrix(h.rows(), rank, rng) * random_complex_matrix(rank, h.cols(), rng) /
      std::sqrt(std::max(rank, 1));
}

}  // namespace iacr

namespace iacr {

ChannelSet truncate_secondary(const ChannelSet& channels, int tx, int rx) {
  ChannelSet out = channels;
  const int n = channels.num_nodes();
  if (n == 0) return out;
  if (tx < 1 || tx > channels(0, 0).cols() || rx < 1 || rx > channels(0, 0).rows()) {
    throw InputError("truncate_secondary: antenna counts exceed the drawn channels");
  }
  for (int k = 0; k < n; ++k) {
    out(k, 0) = CMatrix(out(k, 0).leftCols(tx));
    out(0, k) = CMatrix(out(0, k).topRows(rx));
  }
  return out;
}

}  // namespace iacr
