#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "iacr/config_file.hpp"
#include "iacr/errors.hpp"
#include "iacr/experiments.hpp"
#include "iacr/outputs.hpp"

using namespace iacr;
namespace fs = std::filesystem;

namespace {

Scenario small(int trials = 40) {
  Scenario s;
  s.trials = trials;
  s.snr_db = {10.0, 30.0};
  s.workers = 1;
  return s;
}

std::string csv(const MetricTable& t) {
  std::ostringstream os;
  write_metric_csv(os, t);
  return os.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("iacr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("RunningStat") {
  RunningStat a, b, all;
  const std::vector<double> xs{1.0, 4.0, -2.0, 7.5, 3.25, 0.0, 9.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    (i < 3 ? a : b).add(xs[i]);
    all.add(xs[i]);
  }
  a.merge(b);
  CHECK(a.count() == 7);
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-14));
  double mean = 0.0, ss = 0.0;
  for (double x : xs) mean += x / 7.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  CHECK(all.mean() == doctest::Approx(mean));
  CHECK(all.variance() == doctest::Approx(ss / 6.0));
  CHECK(all.std_error() == doctest::Approx(std::sqrt(ss / 6.0 / 7.0)));
  RunningStat empty;
  CHECK(empty.std_error() == 0.0);
  empty.merge(all);
  CHECK(empty.mean() == doctest::Approx(mean));
}

TEST_CASE("ks_pvalue") {
  CHECK(ks_pvalue(0.0, 100) == doctest::Approx(1.0));
  CHECK(ks_pvalue(0.5, 100) < 1e-10);
  // Critical value at alpha = 0.05 is about 1.358 / sqrt(n) for large n.
  CHECK(ks_pvalue(1.358 / (std::sqrt(10000.0) + 0.12 + 0.11 / 100.0), 10000) ==
        doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("run_trials is independent of the worker count") {
  auto fn = [](int t, std::span<double> out) {
    SeededRng rng(5, static_cast<std::uint64_t>(t));
    out[0] = rng.gaussian();
    out[1] = t % 3 == 0 ? std::nan("") : rng.uniform();
  };
  const auto one = run_trials(300, 2, 1, fn);
  const auto four = run_trials(300, 2, 4, fn);
  for (int i = 0; i < 2; ++i) {
    CHECK(one[i].mean() == four[i].mean());
    CHECK(one[i].variance() == four[i].variance());
  }
  CHECK(one[0].count() == 300);
  CHECK(one[1].count() == 200);
}

TEST_CASE("scenario validation") {
  Scenario s = small();
  CHECK_NOTHROW(validate(s));
  s.trials = 0;
  CHECK_THROWS_AS(validate(s), InputError);
  CHECK_THROWS_AS(run_leakage_experiment(s), InputError);
  s = small();
  s.snr_db.clear();
  CHECK_THROWS_AS(validate(s), InputError);
  CHECK(small().noise_var_at(10.0) == doctest::Approx(1.0));
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "scenario.trials = 12\n"
      "seed = 99\n"
      "scenario.snr_db = 0, 20\n"
      "scenario.silent = 3:1\n"
      "network.pair[2].p = 5\n"
      "sensing.form = per-sample\n"
      "sensing.convention = complex\n");
  const auto s = scenario_from_keys(parse_key_values(in, "mem"));
  CHECK(s.trials == 12);
  CHECK(s.seed == 99);
  CHECK(s.snr_db == std::vector<double>{0.0, 20.0});
  REQUIRE(s.silent.size() == 1);
  CHECK(s.silent[0] == StreamId{3, 0});
  CHECK(s.network.pair(2).power_w == 5.0);
  CHECK(s.network.pair(1).power_w == 10.0);
  CHECK(s.sensing.form == CovarianceForm::kPerSample);
  CHECK(s.sensing.convention == SampleConvention::kComplex);

  std::istringstream dup("seed = 1\nseed = 2\n");
  CHECK_THROWS_AS(parse_key_values(dup), InputError);
  std::istringstream noeq("seed 1\n");
  CHECK_THROWS_AS(parse_key_values(noeq), InputError);

  std::istringstream bad("bogus.key = 1\nscenario.trials = x\nnetwork.pair[9].M = 2\n");
  try {
    scenario_from_keys(parse_key_values(bad));
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus.key") != std::string::npos);
    CHECK(msg.find("scenario.trials") != std::string::npos);
    CHECK(msg.find("pair[9]") != std::string::npos);
  }
  std::istringstream infeasible("network.pair.d = 3\n");
  CHECK_THROWS_AS(scenario_from_keys(parse_key_values(infeasible)), InputError);
}

TEST_CASE("metric CSV roundtrip and schema stamp") {
  MetricTable t("demo");
  RunningStat r;
  r.add(0.1);
  r.add(0.30000000000000004);
  t.add("T=3,N0=3", "eta", 1.25, "pfa", r, 7);
  t.add("", "snr_db", -5.0, "rate", r, 7);
  const std::string text = csv(t);
  CHECK(text.rfind("# schema: iacr-metrics/1\n", 0) == 0);
  std::istringstream in(text);
  const auto back = read_metric_csv(in);
  CHECK(back.experiment() == "demo");
  REQUIRE(back.rows().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto &a = t.rows()[i], &b = back.rows()[i];
    CHECK(a.group == b.group);
    CHECK(a.point_name == b.point_name);
    CHECK(a.point == b.point);
    CHECK(a.metric == b.metric);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.trials == b.trials);
    CHECK(a.seed == b.seed);
  }
  CHECK(csv(back) == text);

  std::istringstream unstamped(text.substr(text.find('\n') + 1));
  CHECK_THROWS_AS(read_metric_csv(unstamped), InputError);
  std::istringstream wrong("# schema: iacr-metrics/0\n" + text.substr(text.find('\n') + 1));
  CHECK_THROWS_AS(read_metric_csv(wrong), InputError);
}

TEST_CASE("emit_outputs is idempotent") {
  const fs::path dir = temp_dir("emit");
  std::vector<MetricTable> tables{run_leakage_experiment(small(8))};
  const auto first = emit_outputs(tables, dir);
  REQUIRE(first.size() == 2);
  CHECK(first[0].filename() == "leakage.csv");
  CHECK(first[1].filename() == "plot_leakage.py");
  const std::string a = slurp(first[0]), p = slurp(first[1]);
  const auto second = emit_outputs(tables, dir);
  CHECK(second == first);
  CHECK(slurp(second[0]) == a);
  CHECK(slurp(second[1]) == p);
  CHECK(p.find("leakage.csv") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("determinism: byte-identical CSV regardless of workers") {
  Scenario s = small(70);
  const std::string a = csv(run_leakage_experiment(s));
  s.workers = 3;
  CHECK(csv(run_leakage_experiment(s)) == a);
  s.seed = 2;
  CHECK(csv(run_leakage_experiment(s)) != a);

  Scenario f = small(70);
  f.pfa_targets = {0.1};
  f.fine_samples_grid = {16};
  f.eta_grid = {1.0, 3.0};
  const std::string fast = csv(run_fast_sensing_experiment(f));
  const std::string fine = csv(run_fine_sensing_experiment(f));
  f.workers = 2;
  CHECK(csv(run_fast_sensing_experiment(f)) == fast);
  CHECK(csv(run_fine_sensing_experiment(f)) == fine);
}

TEST_CASE("leakage experiment properties") {
  Scenario s = small(100);
  const auto t = run_leakage_experiment(s);
  for (double snr : s.snr_db) {
    const auto& zf = t.find("M0=3", "cr_leakage_w", snr);
    const auto& starved = t.find("M0=2", "cr_leakage_w", snr);
    CHECK(zf.trials == 100);
    CHECK(10.0 * std::log10(std::max(zf.mean, 1e-300)) <= -90.0);
    CHECK(starved.mean > zf.mean);
  }
}

TEST_CASE("sum-rate experiment properties") {
  Scenario s = small(100);
  s.rx_antennas_grid = {3, 5};
  const auto t = run_sumrate_experiment(s);
  for (double snr : s.snr_db) {
    const auto& with = t.find("M0=3", "primary_sumrate", snr);
    const auto& without = t.find("no_secondary", "primary_sumrate", snr);
    CHECK(std::abs(with.mean - without.mean) <= 2 * without.std_error + 1e-9);
  }
  const auto& hi_with = t.find("M0=2", "primary_sumrate", 30.0);
  const auto& hi_without = t.find("no_secondary", "primary_sumrate", 30.0);
  CHECK(hi_without.mean - hi_with.mean >= 3 * hi_with.std_error);
  const auto sinr = t.series("rx_sweep,M0=3,snr_db=10", "secondary_sinr");
  REQUIRE(sinr.size() == 2);
  CHECK(sinr[1]->mean > sinr[0]->mean);
}

namespace {

// Best detection rate over thresholds whose one-hole false-alarm rate stays
// at or below `pfa`.
double pd_at_pfa(const MetricTable& t, const std::string& group, double pfa) {
  const auto fa = t.series(group, "pfa_one_silent");
  const auto pd = t.series(group, "pd_all_active");
  REQUIRE(fa.size() == pd.size());
  double best = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i)
    if (fa[i]->mean <= pfa) best = std::max(best, pd[i]->mean);
  return best;
}

}  // namespace

TEST_CASE("fast sensing experiment properties") {
  Scenario s = small(800);
  s.snr_db = {0.0};
  s.sensing.form = CovarianceForm::kPerSample;
  s.smoothing_grid = {4, 16};
  for (int i = 0; i <= 120; ++i) s.eta_grid.push_back(0.25 * i);
  const auto t = run_fast_sensing_experiment(s);

  for (int tt : s.smoothing_grid) {
    const std::string g = "T=" + std::to_string(tt) + ",N0=3";
    const auto one = t.series(g, "pfa_one_silent");
    const auto two = t.series(g, "pfa_two_silent");
    for (std::size_t i = 0; i < one.size(); ++i)
      CHECK(two[i]->mean <= one[i]->mean + 2 * one[i]->std_error + 1e-12);
  }
  const double pd4 = pd_at_pfa(t, "T=4,N0=3", 0.1);
  const double pd16 = pd_at_pfa(t, "T=16,N0=3", 0.1);
  MESSAGE("PD at PFA 0.1: T=4 " << pd4 << ", T=16 " << pd16);
  CHECK(pd16 > pd4 + 0.03);
}

TEST_CASE("fast sensing cannot see a hole once N0 exceeds the stream count") {
  // With three single-stream pairs and four receive antennas the received
  // covariance keeps a noise-only direction even when every stream is on.
  Scenario s = small(400);
  s.snr_db = {30.0};
  s.sensing.form = CovarianceForm::kPerSample;
  s.smoothing_grid = {4};
  s.rx_antennas_grid = {3, 4};
  for (int i = 0; i <= 120; ++i) s.eta_grid.push_back(0.25 * i);
  const auto t = run_fast_sensing_experiment(s);
  const double pd3 = pd_at_pfa(t, "T=4,N0=3", 0.1);
  const double pd4 = pd_at_pfa(t, "T=4,N0=4", 0.1);
  MESSAGE("PD at PFA 0.1: N0=3 " << pd3 << ", N0=4 " << pd4);
  CHECK(pd3 >= 0.99);
  CHECK(pd4 < 0.7);
}

TEST_CASE("fine sensing experiment properties") {
  Scenario s = small(1500);
  s.snr_db = {10.0};
  s.fine_samples_grid = {16, 64};
  s.rx_antennas_grid = {3, 4};
  s.pfa_targets = {0.1, 0.3};
  const auto t = run_fine_sensing_experiment(s);
  for (int n0 : s.rx_antennas_grid) {
    for (int tt : s.fine_samples_grid) {
      const std::string g = "T=" + std::to_string(tt) + ",N0=" + std::to_string(n0);
      for (double p : s.pfa_targets) {
        const auto& emp = t.find(g, "pfa", p);
        CHECK(std::abs(emp.mean - t.find(g, "pfa_theory", p).mean) <= 2 * emp.std_error);
      }
      CHECK(t.find(g, "pd", 0.3).mean > 0.5);
    }
  }
  for (int tt : s.fine_samples_grid) {
    const std::string t3 = "T=" + std::to_string(tt) + ",N0=3";
    const std::string t4 = "T=" + std::to_string(tt) + ",N0=4";
    CHECK(t.find(t4, "pd", 0.1).mean > t.find(t3, "pd", 0.1).mean);
  }
}

#ifdef IACR_CLI_PATH
TEST_CASE("CLI exit codes and seed override") {
  const fs::path dir = temp_dir("cli");
  const fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "unknown.key = 3\n";
  const std::string cli = IACR_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + (dir / "log.txt").string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  CHECK(run("simulate -c \"" + cfg.string() + "\"") == 2);
  CHECK(run("simulate -n 0 -o \"" + dir.string() + "\"") == 2);
  CHECK(run("calibrate-threshold -o \"" + (dir / "a").string() + "\"") == 0);
  CHECK(fs::exists(dir / "a" / "thresholds.csv"));

  const fs::path good = dir / "good.cfg";
  std::ofstream(good) << "scenario.snr_db = 10\nscenario.trials = 6\nseed = 4\n";
  CHECK(run("simulate -c \"" + good.string() + "\" -o \"" + (dir / "b").string() + "\"") == 0);
  CHECK(run("simulate -c \"" + good.string() + "\" -s 4 -o \"" + (dir / "c").string() + "\"") == 0);
  CHECK(run("simulate -c \"" + good.string() + "\" -s 5 -o \"" + (dir / "d").string() + "\"") == 0);
  CHECK(slurp(dir / "b" / "leakage.csv") == slurp(dir / "c" / "leakage.csv"));
  CHECK(slurp(dir / "b" / "leakage.csv") != slurp(dir / "d" / "leakage.csv"));
  fs::remove_all(dir);
}
#endif
