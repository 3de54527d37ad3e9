#include "iacr/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iacr/errors.hpp"

namespace iacr {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
// 1/e - kInvE, so that z + 1/e is formed without cancellation.
constexpr double kInvELo = -1.2428753672788363e-17;
// Below this |p| the series is used as is: it is accurate to ~p^10, while
// Halley steps are swamped by round-off in w e^w - z.
constexpr double kSeriesOnly = 1e-2;

// Series about the branch point z = -1/e in p = +-sqrt(2(e z + 1)).
double branch_point_series(double p) {
  static constexpr double mu[] = {-1.0,
                                  1.0,
                                  -1.0 / 3.0,
                                  11.0 / 72.0,
                                  -43.0 / 540.0,
                                  769.0 / 17280.0,
                                  -221.0 / 8505.0,
                                  680863.0 / 43545600.0,
                                  -1963.0 / 204120.0,
                                  226287557.0 / 37623398400.0};
  double w = 0.0;
  for (int k = 9; k >= 0; --k) w = w * p + mu[k];
  return w;
}

// 2 (e z + 1), clamped at zero.
double branch_p2(double z) {
  const double dz = (z + kInvE) + kInvELo;
  return std::max(0.0, 2.0 * std::numbers::e * dz);
}

double halley(double z, double w) {
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double principal(double z) {
  if (z == 0.0) return 0.0;
  double w;
  const double p2 = branch_p2(z);
  if (p2 < 0.5) {
    const double p = std::sqrt(p2);
    w = branch_point_series(p);
    if (p < kSeriesOnly) return w;
  } else if (z < 3.0) {
    w = std::log1p(z);
    if (z > 0.0) w *= 1.0 - std::log1p(w) / (2.0 + w);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(z, w);
}

double lower(double z) {
  double w;
  const double p2 = branch_p2(z);
  if (p2 < 0.5) {
    const double p = -std::sqrt(p2);
    w = branch_point_series(p);
    if (-p < kSeriesOnly) return w;
  } else {
    const double l1 = std::log(-z);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(z, w);
}

}  // namespace

double lambert_w(LambertBranch branch, double z) {
  if (std::isnan(z)) throw DomainError("lambert_w: z is NaN");
  // Accept round-off just below the branch point.
  if (z < -kInvE) {
    if (z >= -kInvE - 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw DomainError("lambert_w: z = " + std::to_string(z) + " is below -1/e");
  }
  if (branch == LambertBranch::kPrincipal) {
    if (std::isinf(z)) return z;
    return principal(z);
  }
  if (z >= 0.0) throw DomainError("lambert_w: lower branch needs z < 0");
  if (z == -kInvE) return -1.0;
  return lower(z);
}

}  // namespace iacr
