#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "iacr/metrics.hpp"
#include "iacr/model.hpp"
#include "iacr/sensing_fine.hpp"

namespace iacr {

struct Scenario {
  std::string name = "scenario";
  NetworkConfig network = NetworkConfig::reference();
  /// Silent primary streams; everything else transmits. The sensing
  /// experiments use the first entry as the spatial hole.
  std::vector<StreamId> silent{{2, 0}};
  /// SNR grid in dB; SNR = p / sigma^2 with p the primary power of pair 1.
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  /// Secondary receive antenna counts swept by the sum-rate antenna sweep and
  /// both sensing experiments; empty means the configured value.
  std::vector<int> rx_antennas_grid;
  /// Secondary transmit antenna counts compared by the leakage and sum-rate
  /// experiments. The default contrasts the zero-forcing case with an
  /// antenna-starved one.
  std::vector<int> tx_antennas_grid{3, 2};
  int trials = 2000;
  std::uint64_t seed = 1;
  int ia_iterations = 20;
  /// Worker threads; 0 picks the hardware concurrency.
  int workers = 0;

  SensingConfig sensing;
  std::vector<int> smoothing_grid{3};            // fast-sensing T values
  std::vector<double> eta_grid;                  // fast-sensing thresholds
  std::vector<double> pfa_targets{0.1, 0.01};    // both stages
  std::vector<int> fine_samples_grid{16, 32, 64};

  ActivityPattern activity() const;
  double noise_var_at(double snr_db) const;
};

/// Throws InputError on an unusable scenario (no trials, empty grid, invalid
/// network).
void validate(const Scenario& s);

/// Runs `trials` independent trials, trial t seeded with stream t of `seed`.
/// Each trial writes `slots` values; NaN marks "not applicable". Values are
/// aggregated in trial order, so the result does not depend on `workers`.
std::vector<RunningStat> run_trials(int trials, std::size_t slots, int workers,
                                    const std::function<void(int, std::span<double>)>& trial);

/// Secondary-to-primary leakage for each transmit antenna count, interference
/// among the primary pairs, and primary-to-secondary interference, per SNR.
MetricTable run_leakage_experiment(const Scenario& s);

/// Primary sum-rate with and without the secondary and the secondary rate,
/// per SNR and transmit antenna count; when rx_antennas_grid is set, also the
/// secondary SINR and rate per receive antenna count at the first SNR point.
MetricTable run_sumrate_experiment(const Scenario& s);

/// Eigenvalue test: false-alarm rates for one and two silent streams, the
/// sandwich bounds from the noise eigenvalues, the Tracy-Widom upper-bound
/// approximation and the detection rate with every stream active, per
/// threshold, smoothing factor and receive antenna count.
MetricTable run_fast_sensing_experiment(const Scenario& s);

/// GLRT: per-stream false-alarm and detection rates against the calibrated
/// thresholds, with the closed-form false-alarm overlay, per sample count
/// and receive antenna count.
MetricTable run_fine_sensing_experiment(const Scenario& s);

}  // namespace iacr
