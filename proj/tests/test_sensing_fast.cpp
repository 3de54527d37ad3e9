#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "iacr/errors.hpp"
#include "iacr/fusion.hpp"
#include "iacr/sensing_fast.hpp"
#include "iacr/tracy_widom.hpp"

using namespace iacr;

namespace {

struct Setup {
  NetworkConfig cfg = NetworkConfig::reference();
  ChannelSet ch;
  IASolution ia;
};

Setup setup(std::uint64_t seed, double noise_var = 1.0) {
  Setup s;
  s.cfg.noise_var = noise_var;
  SeededRng rng(seed);
  s.ch = draw_channels(s.cfg, rng);
  s.ia = distributed_ia(s.ch, s.cfg, rng);
  return s;
}

CVector vec(std::initializer_list<cplx> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("stack_samples") {
  const std::vector<CVector> raw{vec({1, 2}), vec({3, 4}), vec({5, 6})};
  const auto t1 = stack_samples(raw, 1, 3);
  CHECK(t1.vectors.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(t1.vectors[i] == raw[i]);

  const auto t2 = stack_samples(raw, 2, 2);
  REQUIRE(t2.vectors.size() == 2);
  CHECK(t2.vectors[0] == vec({3, 4, 1, 2}));
  CHECK(t2.vectors[1] == vec({5, 6, 3, 4}));
  CHECK(t2.vectors[0].size() == 2 * 2);
  CHECK(t2.rx_antennas == 2);

  CHECK_THROWS_AS(stack_samples(raw, 2, 3), InputError);
  CHECK_THROWS_AS(stack_samples(raw, 0, 1), InputError);
  CHECK_THROWS_AS(check_smoothing_factor(2, 3), InputError);
  CHECK_NOTHROW(check_smoothing_factor(3, 3));
  CHECK(required_raw_samples(3, 30, CovarianceForm::kStacked) == 32);
  CHECK(required_raw_samples(3, 30, CovarianceForm::kPerSample) == 90);
}

TEST_CASE("min_eig_statistic") {
  CHECK(min_eig_statistic(CMatrix::Identity(4, 4)) == doctest::Approx(1.0));
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = 2.0;
  CHECK_THROWS_AS(min_eig_statistic(bad), ContractError);

  // Pure noise: concentrates at the lower Marchenko-Pastur edge.
  SeededRng rng(1);
  double mean = 0.0;
  const int trials = 200, n0 = 3, l = 3000;
  for (int t = 0; t < trials; ++t) {
    const auto z = draw_noise(n0, 2.0, l, rng);
    const double v = min_eig_statistic(sensing_covariance(z, 1, l, 2.0));
    CHECK(v >= -1e-10);
    mean += v / trials;
  }
  const double edge = std::pow(1.0 - std::sqrt(static_cast<double>(n0) / l), 2);
  CHECK(std::abs(mean - edge) <= 0.03);
}

TEST_CASE("min_eig_statistic: signal without a hole dominates noise") {
  Setup s = setup(2);
  const auto all = ActivityPattern::all_active(s.cfg);
  SeededRng rng(3);
  std::vector<double> y, z;
  for (int t = 0; t < 2000; ++t) {
    const auto f = simulate_fusion_samples(s.ch, s.ia, s.cfg, all, 32, rng);
    const auto noise = draw_noise(3, 1.0, 32, rng);
    y.push_back(min_eig_statistic(sensing_covariance(f.received, 3, 30, 1.0)));
    z.push_back(min_eig_statistic(sensing_covariance(noise, 3, 30, 1.0)));
  }
  std::sort(y.begin(), y.end());
  std::sort(z.begin(), z.end());
  // Empirical CDF of y never exceeds that of z by more than sampling noise.
  double worst = 0.0;
  for (double x : z) {
    const double fy = static_cast<double>(std::upper_bound(y.begin(), y.end(), x) - y.begin()) / 2000;
    const double fz = static_cast<double>(std::upper_bound(z.begin(), z.end(), x) - z.begin()) / 2000;
    worst = std::max(worst, fy - fz);
  }
  CHECK(worst <= 0.03);
}

TEST_CASE("weyl_bounds") {
  SeededRng rng(4);
  const CMatrix g = random_complex_matrix(4, 6, rng);
  const CMatrix rz = g * g.adjoint() / 6.0;
  const auto zero = weyl_bounds(CMatrix::Zero(4, 4), rz);
  CHECK(zero.lower == doctest::Approx(min_eigenvalue(rz)));
  CHECK(zero.upper == doctest::Approx(max_eigenvalue(rz)));
  CHECK(zero.holds());

  RVector a(3), b(3);
  a << 2, 0.5, 1;
  b << 0.1, 3, 0.2;
  const auto d = weyl_bounds(a.cast<cplx>().asDiagonal(), b.cast<cplx>().asDiagonal());
  CHECK(d.value == doctest::Approx((a + b).minCoeff()));
  CHECK(d.lower == doctest::Approx(0.6));
  CHECK(d.upper == doctest::Approx(3.5));

  for (int t = 0; t < 500; ++t) {
    const CMatrix x = random_complex_matrix(5, 5, rng), y = random_complex_matrix(5, 5, rng);
    const auto w = weyl_bounds(x + x.adjoint(), y + y.adjoint());
    CHECK(w.lower <= w.value + 1e-12);
    CHECK(w.value <= w.upper + 1e-12);
  }
  CHECK_THROWS_AS(weyl_bounds(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)), InputError);
}

TEST_CASE("fast_threshold: formula, conventions and monotonicity") {
  const auto zero = [](double) { return 0.0; };
  const int l = 30, t = 3, n0 = 3;
  const double lt = l * t;
  CHECK(fast_threshold_with(zero, 0.1, l, t, n0, DimConvention::kReceiveAntennas) ==
        doctest::Approx(std::pow(std::sqrt(lt) + std::sqrt(3.0), 2) / l));
  CHECK(fast_threshold_with(zero, 0.1, l, t, n0, DimConvention::kStackedDimension) ==
        doctest::Approx(std::pow(std::sqrt(lt) + std::sqrt(9.0), 2) / l));
  const auto one = [](double) { return 1.0; };
  const double scale = (std::sqrt(lt) + std::sqrt(3.0)) *
                       std::cbrt(std::sqrt(1.0 / lt) + std::sqrt(1.0 / 3.0)) / l;
  CHECK(fast_threshold_with(one, 0.1, l, t, n0, DimConvention::kReceiveAntennas) ==
        doctest::Approx(scale + std::pow(std::sqrt(lt) + std::sqrt(3.0), 2) / l));
  CHECK(fast_threshold(0.1, l, t, n0) ==
        doctest::Approx(scale * tw2_quantile(0.9) + std::pow(std::sqrt(lt) + std::sqrt(3.0), 2) / l));

  double prev = -1e9;
  for (double p : {0.5, 0.3, 0.1, 0.05, 0.01, 0.001}) {
    const double eta = fast_threshold(p, l, t, n0);
    CHECK(eta > prev);
    prev = eta;
    CHECK(tw_upper_pfa_bound(eta, l, t, n0) == doctest::Approx(p).epsilon(1e-4));
  }
  CHECK_THROWS_AS(fast_threshold(0.0, l, t, n0), InputError);
  CHECK_THROWS_AS(fast_threshold(0.1, 0, t, n0), InputError);
  for (double eta = 0.0; eta < 6.0; eta += 0.5)
    CHECK(tw_lower_pfa_bound(eta, l, t, n0) >= tw_lower_pfa_bound(eta + 0.5, l, t, n0));
}

TEST_CASE("per-sample covariance is a Wishart W_N0(LT, I) divided by L") {
  SeededRng rng(5);
  double trace = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto z = draw_noise(3, 0.7, 90, rng);
    trace += sensing_covariance(z, 3, 30, 0.7, CovarianceForm::kPerSample).trace().real() / 200;
  }
  CHECK(trace == doctest::Approx(3.0 * 3.0).epsilon(0.02));

  // The literal threshold then upper-bounds lambda_max at roughly the target.
  int exceed = 0;
  const double eta = fast_threshold(0.1, 30, 3, 3);
  for (int i = 0; i < 4000; ++i) {
    const auto z = draw_noise(3, 1.0, 90, rng);
    exceed += max_eigenvalue(sensing_covariance(z, 3, 30, 1.0, CovarianceForm::kPerSample)) > eta;
  }
  CHECK(exceed / 4000.0 == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("eigenvalue sandwich on simulated fusion samples") {
  Setup s = setup(6);
  ActivityPattern one = ActivityPattern::all_active(s.cfg);
  one.set(2, 0, false);
  SeededRng rng(7);
  const int trials = 5000;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5 + 0.25 * i);
  std::vector<int> low(grid.size()), mid(grid.size()), high(grid.size());
  for (int t = 0; t < trials; ++t) {
    const auto f = simulate_fusion_samples(s.ch, s.ia, s.cfg, one, 90, rng);
    const auto ry = sensing_covariance(f.received, 3, 30, 1.0, CovarianceForm::kPerSample);
    const auto rz = hermitian_eig(sensing_covariance(f.noise, 3, 30, 1.0, CovarianceForm::kPerSample));
    const double y = min_eig_statistic(ry);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      low[i] += rz.values(0) > grid[i];
      mid[i] += y > grid[i];
      high[i] += rz.values(2) > grid[i];
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double pl = low[i] / double(trials), pm = mid[i] / double(trials), ph = high[i] / double(trials);
    const double se = std::sqrt(std::max(pm * (1 - pm), 1.0 / trials) / trials);
    CHECK(pl <= pm + 2 * se);
    CHECK(pm <= ph + 2 * se);
  }
}

TEST_CASE("exact covariances: zero eigenvalue under a hole, additivity") {
  Setup s = setup(8);
  ActivityPattern one = ActivityPattern::all_active(s.cfg);
  one.set(3, 0, false);
  const CMatrix rx = signal_covariance_exact(s.ch, s.ia, s.cfg, one);
  CHECK(min_eigenvalue(rx) <= 1e-6 * rx.trace().real() / 3.0);
  const CMatrix rx_all = signal_covariance_exact(s.ch, s.ia, s.cfg, ActivityPattern::all_active(s.cfg));
  CHECK(min_eigenvalue(rx_all) > 1e-6 * rx_all.trace().real() / 3.0);

  const CMatrix stacked = stacked_covariance_exact(rx, 3, s.cfg.noise_var);
  CHECK(stacked.rows() == 9);
  CHECK(min_eigenvalue(stacked) <= 1e-6 * stacked.trace().real() / 9.0);
  const CMatrix ry = stacked_covariance_exact(rx + s.cfg.noise_var * CMatrix::Identity(3, 3), 3,
                                              s.cfg.noise_var);
  const CMatrix rz = stacked_covariance_exact(s.cfg.noise_var * CMatrix::Identity(3, 3), 3,
                                              s.cfg.noise_var);
  CHECK((ry - stacked - rz).norm() <= 1e-12 * ry.norm());

  // Sample covariances only add up to the cross terms, which vanish with L.
  SeededRng rng(9);
  double prev = 1e9;
  for (int l : {100, 1000, 10000}) {
    const auto f = simulate_fusion_samples(s.ch, s.ia, s.cfg, one, l + 2, rng);
    const CMatrix y = sensing_covariance(f.received, 3, l, 1.0);
    const CMatrix x = sensing_covariance(f.signal, 3, l, 1.0);
    const CMatrix z = sensing_covariance(f.noise, 3, l, 1.0);
    const double cross = (y - x - z).norm() / y.norm();
    CHECK(cross < prev);
    prev = cross;
  }
  CHECK(prev <= 0.05);
}

TEST_CASE("detect_hole at high SNR") {
  const int l = 100, t = 3;
  const double eta = fast_threshold(0.1, l, t, 3);
  int no_hole_all = 0, hole_one = 0, pass_one = 0, pass_two = 0;
  const int trials = 400;
  for (int i = 0; i < trials; ++i) {
    Setup s = setup(1000 + i, 1e-3);
    SeededRng rng(77, static_cast<std::uint64_t>(i));
    ActivityPattern all = ActivityPattern::all_active(s.cfg), one = all, two = all;
    one.set(2, 0, false);
    two.set(2, 0, false);
    two.set(3, 0, false);
    const int n = required_raw_samples(t, l, CovarianceForm::kStacked);
    const auto fa = simulate_fusion_samples(s.ch, s.ia, s.cfg, all, n, rng);
    const auto f1 = simulate_fusion_samples(s.ch, s.ia, s.cfg, one, n, rng);
    const auto f2 = simulate_fusion_samples(s.ch, s.ia, s.cfg, two, n, rng);
    const auto da = detect_hole(stack_samples(fa.received, t, l), s.cfg.noise_var, eta);
    const auto d1 = detect_hole(stack_samples(f1.received, t, l), s.cfg.noise_var, eta);
    const auto d2 = detect_hole(stack_samples(f2.received, t, l), s.cfg.noise_var, eta);
    CHECK(da.hole_present == (da.lambda_min < eta));
    no_hole_all += !da.hole_present;
    hole_one += d1.hole_present;
    pass_one += !d1.hole_present;
    pass_two += !d2.hole_present;
  }
  CHECK(no_hole_all >= 0.95 * trials);
  CHECK(hole_one >= 0.95 * trials);
  CHECK(pass_two <= pass_one);
}

TEST_CASE("calibration CSV") {
  const std::vector<double> targets{0.1, 0.01};
  const auto rows = calibrate_fast_thresholds(targets, 30, 3, 3, DimConvention::kStackedDimension);
  std::ostringstream os;
  write_calibration_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "pfa_target,eta,L,T,N0,dim_convention");
  std::getline(is, line);
  CHECK(line.rfind("0.10000000000000001,", 0) == 0);
  CHECK(line.find(",30,3,3,n0t") != std::string::npos);
}
