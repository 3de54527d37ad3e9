// Command-line front end for the simulation library.
//
//   iacr simulate            one scenario at the first SNR point
//   iacr sweep               leakage and sum-rate over the whole SNR grid
//   iacr sense-roc           fast and fine sensing experiments
//   iacr calibrate-threshold eigenvalue-test thresholds for the PFA targets
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 1 other failures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iacr/config_file.hpp"
#include "iacr/errors.hpp"
#include "iacr/experiments.hpp"
#include "iacr/outputs.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> workers;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "scenario file (key = value)");
  cmd->add_option("-s,--seed", o.seed, "RNG seed (overrides IACR_SEED and the config)");
  cmd->add_option("-n,--trials", o.trials, "Monte Carlo trials per point");
  cmd->add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_option("-o,--out", o.out, "output directory");
}

iacr::Scenario load(const CommonOptions& o) {
  iacr::Scenario s = o.config.empty() ? iacr::Scenario{} : iacr::load_scenario(o.config);
  if (const char* env = std::getenv("IACR_SEED"); env && *env) {
    try {
      s.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw iacr::InputError(std::string("IACR_SEED is not an unsigned integer: ") + env);
    }
  }
  if (o.seed) s.seed = *o.seed;
  if (o.trials) s.trials = *o.trials;
  if (o.workers) s.workers = *o.workers;
  iacr::validate(s);
  return s;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive-radio interference-alignment simulator"};
  app.require_subcommand(1);

  CommonOptions sim_opts, sweep_opts, roc_opts, cal_opts;
  auto* sim = app.add_subcommand("simulate", "leakage and rates of one scenario at its first SNR point");
  add_common(sim, sim_opts);
  auto* sweep = app.add_subcommand("sweep", "leakage and sum-rate over the SNR and antenna grids");
  add_common(sweep, sweep_opts);
  auto* roc = app.add_subcommand("sense-roc", "fast and fine sensing false-alarm/detection tables");
  add_common(roc, roc_opts);
  auto* cal = app.add_subcommand("calibrate-threshold", "eigenvalue-test thresholds per PFA target");
  add_common(cal, cal_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<iacr::MetricTable> tables;
    std::filesystem::path out;
    if (sim->parsed()) {
      iacr::Scenario s = load(sim_opts);
      s.snr_db.resize(1);
      s.rx_antennas_grid.clear();
      tables.push_back(iacr::run_leakage_experiment(s));
      tables.push_back(iacr::run_sumrate_experiment(s));
      out = sim_opts.out;
    } else if (sweep->parsed()) {
      const iacr::Scenario s = load(sweep_opts);
      tables.push_back(iacr::run_leakage_experiment(s));
      tables.push_back(iacr::run_sumrate_experiment(s));
      out = sweep_opts.out;
    } else if (roc->parsed()) {
      const iacr::Scenario s = load(roc_opts);
      tables.push_back(iacr::run_fast_sensing_experiment(s));
      tables.push_back(iacr::run_fine_sensing_experiment(s));
      out = roc_opts.out;
    } else {
      const iacr::Scenario s = load(cal_opts);
      const int n0 = s.network.secondary().rx_antennas;
      std::vector<iacr::ThresholdCalibration> rows;
      for (int t : s.smoothing_grid) {
        const auto part = iacr::calibrate_fast_thresholds(s.pfa_targets, s.sensing.count, t, n0,
                                                          s.sensing.dim);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::filesystem::create_directories(cal_opts.out);
      const auto path = std::filesystem::path(cal_opts.out) / "thresholds.csv";
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!f) throw iacr::InputError("cannot write " + path.string());
      iacr::write_calibration_csv(f, rows);
      report({path});
      return 0;
    }
    report(iacr::emit_outputs(tables, out));
  } catch (const iacr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
