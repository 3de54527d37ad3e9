#include "iacr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "iacr/errors.hpp"
#include "iacr/fusion.hpp"
#include "iacr/primary_ia.hpp"
#include "iacr/secondary.hpp"

namespace iacr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kChunk = 64;

// Slot bookkeeping: every (group, point, metric) cell gets one accumulator.
class Layout {
 public:
  std::size_t add(const std::string& group, const std::string& point_name, double point,
                  const std::string& metric) {
    cells_.push_back({group, point_name, point, metric, 0.0, 0.0, 0, 0});
    return cells_.size() - 1;
  }
  std::size_t size() const { return cells_.size(); }

  MetricTable table(const std::string& experiment, const std::vector<RunningStat>& stats,
                    std::uint64_t seed) const {
    MetricTable t(experiment);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto& c = cells_[i];
      t.add(c.group, c.point_name, c.point, c.metric, stats[i], seed);
    }
    return t;
  }

 private:
  std::vector<MetricRow> cells_;
};

std::string group_name(const std::string& key, int value) { return key + "=" + std::to_string(value); }

std::string group_name(int t, int n0) {
  return "T=" + std::to_string(t) + ",N0=" + std::to_string(n0);
}

double indicator(bool b) { return b ? 1.0 : 0.0; }

// Interference power among active primary pairs after decoding.
double primary_interference(const IASolution& ia, const ChannelSet& ch, const NetworkConfig& cfg,
                            const ActivityPattern& act) {
  double total = 0.0;
  for (int k = 1; k <= cfg.num_pairs(); ++k) {
    if (!act.pair_active(k)) continue;
    const CMatrix u = active_columns(ia.U[static_cast<std::size_t>(k)], act, k);
    for (int j = 1; j <= cfg.num_pairs(); ++j) {
      if (j == k || !act.pair_active(j)) continue;
      const CMatrix v = active_columns(ia.V[static_cast<std::size_t>(j)], act, j);
      total += cfg.pair(j).power_per_stream() * (u.adjoint() * ch(k, j) * v).squaredNorm();
    }
  }
  return total;
}

double sum_primary(const std::vector<double>& rates) {
  double s = 0.0;
  for (std::size_t k = 1; k < rates.size(); ++k) s += rates[k];
  return s;
}

NetworkConfig with_secondary(NetworkConfig cfg, int tx, int rx, double noise_var) {
  cfg.secondary().tx_antennas = tx;
  cfg.secondary().rx_antennas = rx;
  cfg.noise_var = noise_var;
  return cfg;
}

int max_of(const std::vector<int>& v, int fallback) {
  return v.empty() ? fallback : *std::max_element(v.begin(), v.end());
}

// The silent stream used by the sensing experiments and a second one for the
// two-hole case (the next stream in pair-major order).
std::pair<StreamId, std::optional<StreamId>> sensing_holes(const Scenario& s) {
  std::vector<StreamId> all;
  for (int k = 1; k <= s.network.num_pairs(); ++k)
    for (int l = 0; l < s.network.pair(k).streams; ++l) all.push_back({k, l});
  const StreamId first = s.silent.empty() ? all.front() : s.silent.front();
  const auto it = std::find(all.begin(), all.end(), first);
  if (it == all.end()) throw InputError("scenario: silent stream does not exist");
  std::optional<StreamId> second;
  if (all.size() > 1) second = (it + 1 == all.end()) ? all.front() : *(it + 1);
  return {first, second};
}

}  // namespace

ActivityPattern Scenario::activity() const {
  ActivityPattern a = ActivityPattern::all_active(network);
  for (const auto& id : silent) a.set(id.pair, id.stream, false);
  return a;
}

double Scenario::noise_var_at(double snr) const {
  return network.pair(1).power_w / std::pow(10.0, snr / 10.0);
}

void validate(const Scenario& s) {
  if (s.trials < 1) throw InputError("scenario: trials must be >= 1");
  if (s.snr_db.empty()) throw InputError("scenario: SNR grid is empty");
  if (s.ia_iterations < 1) throw InputError("scenario: IA iterations must be >= 1");
  if (s.workers < 0) throw InputError("scenario: workers must be >= 0");
  require_valid(s.network);
  for (int tx : s.tx_antennas_grid)
    if (tx < 1) throw InputError("scenario: transmit antenna counts must be >= 1");
  for (int rx : s.rx_antennas_grid)
    if (rx < 1) throw InputError("scenario: receive antenna counts must be >= 1");
  for (int t : s.smoothing_grid)
    if (t < 1) throw InputError("scenario: smoothing factors must be >= 1");
  for (int t : s.fine_samples_grid)
    if (t < 1) throw InputError("scenario: fine sample counts must be >= 1");
  for (double p : s.pfa_targets)
    if (!(p > 0.0 && p < 1.0)) throw InputError("scenario: PFA targets must lie in (0, 1)");
  for (const auto& id : s.silent) {
    if (id.pair < 1 || id.pair > s.network.num_pairs() || id.stream < 0 ||
        id.stream >= s.network.pair(id.pair).streams) {
      throw InputError("scenario: silent stream out of range");
    }
  }
}

std::vector<RunningStat> run_trials(int trials, std::size_t slots, int workers,
                                    const std::function<void(int, std::span<double>)>& trial) {
  if (trials < 1) throw InputError("run_trials: trials must be >= 1");
  const int chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::vector<RunningStat>> partial(static_cast<std::size_t>(chunks),
                                                std::vector<RunningStat>(slots));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    std::vector<double> buf(slots);
    for (int c = next++; c < chunks && !failed; c = next++) {
      try {
        auto& acc = partial[static_cast<std::size_t>(c)];
        for (int t = c * kChunk; t < std::min(trials, (c + 1) * kChunk); ++t) {
          std::fill(buf.begin(), buf.end(), kNaN);
          trial(t, buf);
          for (std::size_t i = 0; i < slots; ++i)
            if (!std::isnan(buf[i])) acc[i].add(buf[i]);
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  int n = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = std::min(n, chunks);
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<RunningStat> out(slots);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < slots; ++i) out[i].merge(p[i]);
  return out;
}

MetricTable run_leakage_experiment(const Scenario& s) {
  validate(s);
  if (s.tx_antennas_grid.empty()) throw InputError("leakage experiment: no transmit antenna counts");
  const ActivityPattern act = s.activity();
  const int max_tx = max_of(s.tx_antennas_grid, 1);
  const int rx = s.network.secondary().rx_antennas;
  const std::size_t n_snr = s.snr_db.size();
  const std::size_t n_tx = s.tx_antennas_grid.size();

  Layout layout;
  std::vector<std::size_t> prim(n_snr);
  std::vector<std::vector<std::size_t>> leak(n_tx, std::vector<std::size_t>(n_snr));
  std::vector<std::vector<std::size_t>> leak_max(n_tx, std::vector<std::size_t>(n_snr));
  std::vector<std::vector<std::size_t>> p2s(n_tx, std::vector<std::size_t>(n_snr));
  for (std::size_t i = 0; i < n_snr; ++i)
    prim[i] = layout.add("primary", "snr_db", s.snr_db[i], "primary_interference_w");
  for (std::size_t a = 0; a < n_tx; ++a) {
    const std::string g = group_name("M0", s.tx_antennas_grid[a]);
    for (std::size_t i = 0; i < n_snr; ++i) {
      leak[a][i] = layout.add(g, "snr_db", s.snr_db[i], "cr_leakage_w");
      leak_max[a][i] = layout.add(g, "snr_db", s.snr_db[i], "cr_leakage_max_receiver_w");
      p2s[a][i] = layout.add(g, "snr_db", s.snr_db[i], "primary_to_secondary_w");
    }
  }

  const NetworkConfig drawn = with_secondary(s.network, max_tx, rx, s.network.noise_var);
  auto stats = run_trials(s.trials, layout.size(), s.workers, [&](int t, std::span<double> out) {
    SeededRng rng(s.seed, static_cast<std::uint64_t>(t));
    const ChannelSet full = draw_channels(drawn, rng);
    const IASolution ia = distributed_ia(full, drawn, rng, {s.ia_iterations, 0.0});
    for (std::size_t i = 0; i < n_snr; ++i) {
      NetworkConfig cfg = drawn;
      cfg.noise_var = s.noise_var_at(s.snr_db[i]);
      out[prim[i]] = primary_interference(ia, full, cfg, act);
    }
    for (std::size_t a = 0; a < n_tx; ++a) {
      const int tx = s.tx_antennas_grid[a];
      const ChannelSet ch = truncate_secondary(full, tx, rx);
      for (std::size_t i = 0; i < n_snr; ++i) {
        const NetworkConfig cfg = with_secondary(s.network, tx, rx, s.noise_var_at(s.snr_db[i]));
        const SecondaryDesign d = design_secondary(ch, ia, cfg, act);
        double total = 0.0;
        double worst = 0.0;
        for (int k = 1; k <= cfg.num_pairs(); ++k) {
          total += d.leakage_per_receiver[static_cast<std::size_t>(k)];
          worst = std::max(worst, d.leakage_per_receiver[static_cast<std::size_t>(k)]);
        }
        out[leak[a][i]] = total;
        out[leak_max[a][i]] = worst;
        out[p2s[a][i]] = primary_to_secondary_interference(d, ch, ia, cfg, act);
      }
    }
  });
  return layout.table("leakage", stats, s.seed);
}

MetricTable run_sumrate_experiment(const Scenario& s) {
  validate(s);
  if (s.tx_antennas_grid.empty()) throw InputError("sum-rate experiment: no transmit antenna counts");
  const ActivityPattern act = s.activity();
  const int max_tx = max_of(s.tx_antennas_grid, 1);
  const int rx_cfg = s.network.secondary().rx_antennas;
  const int max_rx = std::max(rx_cfg, max_of(s.rx_antennas_grid, rx_cfg));
  const std::size_t n_snr = s.snr_db.size();
  const std::size_t n_tx = s.tx_antennas_grid.size();
  const std::size_t n_rx = s.rx_antennas_grid.size();

  Layout layout;
  std::vector<std::size_t> without(n_snr);
  std::vector<std::vector<std::size_t>> with(n_tx, std::vector<std::size_t>(n_snr));
  std::vector<std::vector<std::size_t>> sec(n_tx, std::vector<std::size_t>(n_snr));
  std::vector<std::size_t> sweep_sinr(n_rx), sweep_rate(n_rx);
  for (std::size_t i = 0; i < n_snr; ++i)
    without[i] = layout.add("no_secondary", "snr_db", s.snr_db[i], "primary_sumrate");
  for (std::size_t a = 0; a < n_tx; ++a) {
    const std::string g = group_name("M0", s.tx_antennas_grid[a]);
    for (std::size_t i = 0; i < n_snr; ++i) {
      with[a][i] = layout.add(g, "snr_db", s.snr_db[i], "primary_sumrate");
      sec[a][i] = layout.add(g, "snr_db", s.snr_db[i], "secondary_rate");
    }
  }
  const std::string sweep_group = "rx_sweep,M0=" + std::to_string(s.tx_antennas_grid.front()) +
                                  ",snr_db=" + std::to_string(static_cast<int>(s.snr_db.front()));
  for (std::size_t r = 0; r < n_rx; ++r) {
    sweep_sinr[r] = layout.add(sweep_group, "N0", s.rx_antennas_grid[r], "secondary_sinr");
    sweep_rate[r] = layout.add(sweep_group, "N0", s.rx_antennas_grid[r], "secondary_rate");
  }

  const NetworkConfig drawn = with_secondary(s.network, max_tx, max_rx, s.network.noise_var);
  auto stats = run_trials(s.trials, layout.size(), s.workers, [&](int t, std::span<double> out) {
    SeededRng rng(s.seed, static_cast<std::uint64_t>(t));
    const ChannelSet full = draw_channels(drawn, rng);
    const IASolution ia = distributed_ia(full, drawn, rng, {s.ia_iterations, 0.0});
    for (std::size_t i = 0; i < n_snr; ++i) {
      const NetworkConfig cfg = with_secondary(s.network, max_tx, max_rx, s.noise_var_at(s.snr_db[i]));
      out[without[i]] = sum_primary(pair_rates(ia, full, cfg, act));
    }
    for (std::size_t a = 0; a < n_tx; ++a) {
      const int tx = s.tx_antennas_grid[a];
      const ChannelSet ch = truncate_secondary(full, tx, rx_cfg);
      for (std::size_t i = 0; i < n_snr; ++i) {
        const NetworkConfig cfg = with_secondary(s.network, tx, rx_cfg, s.noise_var_at(s.snr_db[i]));
        const SecondaryDesign d = design_secondary(ch, ia, cfg, act);
        out[with[a][i]] = sum_primary(pair_rates(ia, ch, cfg, act, &d));
        out[sec[a][i]] = secondary_rate(d);
      }
    }
    for (std::size_t r = 0; r < n_rx; ++r) {
      const int tx = s.tx_antennas_grid.front();
      const int n0 = s.rx_antennas_grid[r];
      const ChannelSet ch = truncate_secondary(full, tx, n0);
      const NetworkConfig cfg = with_secondary(s.network, tx, n0, s.noise_var_at(s.snr_db.front()));
      const SecondaryDesign d = design_secondary(ch, ia, cfg, act);
      double sinr = 0.0;
      for (double v : d.sinr_per_stream) sinr += v;
      out[sweep_sinr[r]] = sinr;
      out[sweep_rate[r]] = secondary_rate(d);
    }
  });
  return layout.table("sumrate", stats, s.seed);
}

MetricTable run_fast_sensing_experiment(const Scenario& s) {
  validate(s);
  validate(s.sensing);
  if (s.smoothing_grid.empty()) throw InputError("fast sensing: smoothing grid is empty");
  const auto [hole1, hole2] = sensing_holes(s);
  ActivityPattern one = ActivityPattern::all_active(s.network);
  one.set(hole1.pair, hole1.stream, false);
  ActivityPattern two = one;
  if (hole2) two.set(hole2->pair, hole2->stream, false);
  const ActivityPattern all = ActivityPattern::all_active(s.network);

  NetworkConfig cfg = s.network;
  cfg.noise_var = s.noise_var_at(s.snr_db.front());
  const int rx_cfg = cfg.secondary().rx_antennas;
  const std::vector<int> rx_grid = s.rx_antennas_grid.empty() ? std::vector<int>{rx_cfg}
                                                              : s.rx_antennas_grid;
  cfg.secondary().rx_antennas = max_of(rx_grid, rx_cfg);
  const SensingConfig& sc = s.sensing;
  const std::size_t n_t = s.smoothing_grid.size();
  int max_samples = 0;
  for (int t : s.smoothing_grid) {
    for (int n0 : rx_grid)
      if (sc.enforce_smoothing) check_smoothing_factor(t, n0);
    max_samples = std::max(max_samples, required_raw_samples(t, sc.count, sc.form));
  }

  // One cell block per (N0, T) pair, N0-major.
  struct Cells {
    std::vector<std::size_t> pfa1, pfa2, lower, upper, pd;
  };
  struct Block {
    int n0 = 0;
    int t = 0;
    std::vector<double> etas, target_eta;
    Cells grid, target;
  };
  Layout layout;
  std::vector<Block> blocks;
  std::vector<MetricRow> fixed_rows;
  for (int n0 : rx_grid) {
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      Block b;
      b.n0 = n0;
      b.t = s.smoothing_grid[ti];
      const std::string g = group_name(b.t, n0);
      if (s.eta_grid.empty()) {
        const double top = 1.5 * fast_threshold(1e-3, sc.count, b.t, n0, sc.dim);
        for (int i = 0; i <= 60; ++i) b.etas.push_back(top * i / 60.0);
      } else {
        b.etas = s.eta_grid;
      }
      for (double eta : b.etas) {
        b.grid.pfa1.push_back(layout.add(g, "eta", eta, "pfa_one_silent"));
        b.grid.pfa2.push_back(layout.add(g, "eta", eta, "pfa_two_silent"));
        b.grid.lower.push_back(layout.add(g, "eta", eta, "bound_lower"));
        b.grid.upper.push_back(layout.add(g, "eta", eta, "bound_upper"));
        b.grid.pd.push_back(layout.add(g, "eta", eta, "pd_all_active"));
        fixed_rows.push_back({g, "eta", eta, "tw_upper_bound",
                              tw_upper_pfa_bound(eta, sc.count, b.t, n0, sc.dim), 0.0, 0, s.seed});
      }
      const std::string gt = "target," + g;
      for (double p : s.pfa_targets) {
        const double eta = fast_threshold(p, sc.count, b.t, n0, sc.dim);
        b.target_eta.push_back(eta);
        b.target.pfa1.push_back(layout.add(gt, "pfa_target", p, "pfa_one_silent"));
        b.target.pfa2.push_back(layout.add(gt, "pfa_target", p, "pfa_two_silent"));
        b.target.lower.push_back(layout.add(gt, "pfa_target", p, "bound_lower"));
        b.target.upper.push_back(layout.add(gt, "pfa_target", p, "bound_upper"));
        b.target.pd.push_back(layout.add(gt, "pfa_target", p, "pd_all_active"));
        fixed_rows.push_back({gt, "pfa_target", p, "eta", eta, 0.0, 0, s.seed});
      }
      blocks.push_back(std::move(b));
    }
  }

  auto stats = run_trials(s.trials, layout.size(), s.workers, [&](int trial, std::span<double> out) {
    SeededRng rng(s.seed, static_cast<std::uint64_t>(trial));
    const ChannelSet ch = draw_channels(cfg, rng);
    const IASolution ia = distributed_ia(ch, cfg, rng, {s.ia_iterations, 0.0});
    const FusionSamples f1 = simulate_fusion_samples(ch, ia, cfg, one, max_samples, rng);
    const FusionSamples f2 = simulate_fusion_samples(ch, ia, cfg, two, max_samples, rng);
    const FusionSamples fa = simulate_fusion_samples(ch, ia, cfg, all, max_samples, rng);
    for (const Block& b : blocks) {
      auto cov = [&](const std::vector<CVector>& v) {
        std::vector<CVector> head(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) head[i] = v[i].head(b.n0);
        return sensing_covariance(head, b.t, sc.count, cfg.noise_var, sc.form);
      };
      const double y1 = min_eig_statistic(cov(f1.received));
      const double y2 = min_eig_statistic(cov(f2.received));
      const double ya = min_eig_statistic(cov(fa.received));
      const auto rz = hermitian_eig(cov(f1.noise));
      const double zmin = rz.values(0);
      const double zmax = rz.values(rz.values.size() - 1);
      auto fill = [&](const Cells& c, std::size_t i, double eta) {
        out[c.pfa1[i]] = indicator(y1 > eta);
        out[c.pfa2[i]] = indicator(y2 > eta);
        out[c.lower[i]] = indicator(zmin > eta);
        out[c.upper[i]] = indicator(zmax > eta);
        out[c.pd[i]] = indicator(ya > eta);
      };
      for (std::size_t i = 0; i < b.etas.size(); ++i) fill(b.grid, i, b.etas[i]);
      for (std::size_t i = 0; i < b.target_eta.size(); ++i) fill(b.target, i, b.target_eta[i]);
    }
  });
  MetricTable table = layout.table("fast_sensing", stats, s.seed);
  for (auto& r : fixed_rows) table.add_row(std::move(r));
  return table;
}

MetricTable run_fine_sensing_experiment(const Scenario& s) {
  validate(s);
  validate(s.sensing);
  if (s.fine_samples_grid.empty()) throw InputError("fine sensing: sample grid is empty");
  if (s.pfa_targets.empty()) throw InputError("fine sensing: no PFA targets");
  const StreamId hole = sensing_holes(s).first;
  ActivityPattern act = ActivityPattern::all_active(s.network);
  act.set(hole.pair, hole.stream, false);

  const int rx_cfg = s.network.secondary().rx_antennas;
  const std::vector<int> rx_grid = s.rx_antennas_grid.empty() ? std::vector<int>{rx_cfg}
                                                              : s.rx_antennas_grid;
  const int max_rx = max_of(rx_grid, rx_cfg);
  const int max_t = max_of(s.fine_samples_grid, 1);
  NetworkConfig cfg = s.network;
  cfg.secondary().rx_antennas = max_rx;
  cfg.noise_var = s.noise_var_at(s.snr_db.front());
  const SampleConvention conv = s.sensing.convention;

  Layout layout;
  struct Cells {
    std::vector<std::size_t> pfa, pd;
    std::vector<double> eta;
  };
  std::vector<std::vector<Cells>> cells(rx_grid.size(), std::vector<Cells>(s.fine_samples_grid.size()));
  std::vector<MetricRow> fixed_rows;
  for (std::size_t r = 0; r < rx_grid.size(); ++r) {
    for (std::size_t ti = 0; ti < s.fine_samples_grid.size(); ++ti) {
      const int t = s.fine_samples_grid[ti];
      const int dof = conv == SampleConvention::kRealPart ? t : 2 * t;
      const std::string g = group_name(t, rx_grid[r]);
      for (double p : s.pfa_targets) {
        const double eta = glrt_threshold(p, dof, cfg.noise_var);
        cells[r][ti].eta.push_back(eta);
        cells[r][ti].pfa.push_back(layout.add(g, "pfa_target", p, "pfa"));
        cells[r][ti].pd.push_back(layout.add(g, "pfa_target", p, "pd"));
        fixed_rows.push_back({g, "pfa_target", p, "threshold", eta, 0.0, 0, s.seed});
        fixed_rows.push_back(
            {g, "pfa_target", p, "pfa_theory", glrt_pfa(eta, dof, cfg.noise_var).value, 0.0, 0, s.seed});
      }
    }
  }

  auto stats = run_trials(s.trials, layout.size(), s.workers, [&](int trial, std::span<double> out) {
    SeededRng rng(s.seed, static_cast<std::uint64_t>(trial));
    const ChannelSet full = draw_channels(cfg, rng);
    const IASolution ia = distributed_ia(full, cfg, rng, {s.ia_iterations, 0.0});
    const FusionSamples f = simulate_fusion_samples(full, ia, cfg, act, max_t, rng);
    for (std::size_t r = 0; r < rx_grid.size(); ++r) {
      const int n0 = rx_grid[r];
      const ChannelSet ch = truncate_secondary(full, cfg.secondary().tx_antennas, n0);
      const SensingVectorSet vecs = build_sensing_vectors(ch, ia);
      std::vector<CVector> rx(f.received.size());
      for (std::size_t i = 0; i < rx.size(); ++i) rx[i] = f.received[i].head(n0);
      for (std::size_t ti = 0; ti < s.fine_samples_grid.size(); ++ti) {
        const int t = s.fine_samples_grid[ti];
        const auto window = std::span<const CVector>(rx).first(static_cast<std::size_t>(t));
        const Cells& c = cells[r][ti];
        std::vector<double> silent_log;
        std::vector<double> active_log;
        for (std::size_t v = 0; v < vecs.streams.size(); ++v) {
          const auto y = project_stream_samples(vecs.vectors[v], window, conv);
          double e = 0.0;
          for (double x : y) e += x * x;
          const double ls = glrt_log_statistic(e, static_cast<int>(y.size()), cfg.noise_var);
          (vecs.streams[v] == hole ? silent_log : active_log).push_back(ls);
        }
        for (std::size_t i = 0; i < c.eta.size(); ++i) {
          const double le = std::log(c.eta[i]);
          out[c.pfa[i]] = indicator(silent_log.front() > le);
          double hits = 0.0;
          for (double ls : active_log) hits += indicator(ls > le);
          if (!active_log.empty()) out[c.pd[i]] = hits / static_cast<double>(active_log.size());
        }
      }
    }
  });
  MetricTable table = layout.table("fine_sensing", stats, s.seed);
  for (auto& r : fixed_rows) table.add_row(std::move(r));
  return table;
}

}  // namespace iacr
