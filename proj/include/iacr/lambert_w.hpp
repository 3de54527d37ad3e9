#pragma once

namespace iacr {

enum class LambertBranch { kPrincipal, kLower };

/// Real Lambert W: the w with w * exp(w) = z.
/// kPrincipal (W0): z >= -1/e, w >= -1. kLower (W-1): -1/e <= z < 0, w <= -1.
/// Throws DomainError outside the branch domain.
double lambert_w(LambertBranch branch, double z);

inline double lambert_w0(double z) { return lambert_w(LambertBranch::kPrincipal, z); }
inline double lambert_wm1(double z) { return lambert_w(LambertBranch::kLower, z); }

}  // namespace iacr
