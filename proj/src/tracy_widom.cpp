#include "iacr/tracy_widom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "iacr/errors.hpp"

namespace iacr {
namespace {

#include "tw2_table.inc"

// Fritsch-Carlson slopes; keeps the interpolant monotone between knots.
struct MonotoneCubic {
  std::array<double, kTw2GridSize> slope{};

  MonotoneCubic() {
    constexpr std::size_t n = kTw2GridSize;
    std::array<double, n - 1> delta{};
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (kTw2Cdf[i + 1] - kTw2Cdf[i]) / kTw2GridStep;
    slope[0] = delta[0];
    slope[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        slope[i] = 0.0;
      } else {
        // Weighted harmonic mean (equal spacing).
        slope[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);
      }
    }
  }

  double eval(std::size_t i, double t) const {
    const double h = kTw2GridStep;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * kTw2Cdf[i] + (t3 - 2 * t2 + t) * h * slope[i] +
           (-2 * t3 + 3 * t2) * kTw2Cdf[i + 1] + (t3 - t2) * h * slope[i + 1];
  }
};

const MonotoneCubic& interpolant() {
  static const MonotoneCubic cubic;
  return cubic;
}

constexpr double kGridMax = kTw2GridMin + kTw2GridStep * static_cast<double>(kTw2GridSize - 1);

}  // namespace

double tw2_table_min() { return kTw2GridMin; }
double tw2_table_max() { return kGridMax; }

double tw2_cdf(double x) {
  if (std::isnan(x)) throw InputError("tw2_cdf: NaN argument");
  if (x <= kTw2GridMin) return 0.0;
  if (x >= kGridMax) return 1.0;
  const double pos = (x - kTw2GridMin) / kTw2GridStep;
  auto i = static_cast<std::size_t>(pos);
  if (i >= kTw2GridSize - 1) i = kTw2GridSize - 2;
  const double t = pos - static_cast<double>(i);
  return std::clamp(interpolant().eval(i, t), 0.0, 1.0);
}

double tw2_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("tw2_quantile: probability must lie in (0, 1)");
  if (p <= kTw2Cdf[0]) return kTw2GridMin;
  if (p >= kTw2Cdf[kTw2GridSize - 1]) return kGridMax;
  const auto* it = std::upper_bound(std::begin(kTw2Cdf), std::end(kTw2Cdf), p);
  const auto hi = static_cast<std::size_t>(it - std::begin(kTw2Cdf));
  const std::size_t i = hi - 1;
  double lo_t = 0.0;
  double hi_t = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo_t + hi_t);
    if (interpolant().eval(i, mid) < p) lo_t = mid; else hi_t = mid;
  }
  return kTw2GridMin + kTw2GridStep * (static_cast<double>(i) + 0.5 * (lo_t + hi_t));
}

}  // namespace iacr
