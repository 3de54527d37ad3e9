#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "iacr/linalg.hpp"

namespace iacr {

/// Deterministic generator keyed by (seed, stream). Distinct stream ids give
/// statistically independent sequences; Monte Carlo trial t uses stream t.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x1a2bu};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Real N(0, variance).
  double gaussian(double variance = 1.0) {
    return std::sqrt(variance) * normal_(engine_);
  }

  /// Circularly-symmetric complex Gaussian with total variance `variance`
  /// (real and imaginary parts each N(0, variance / 2)).
  cplx complex_gaussian(double variance = 1.0) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// rows x cols matrix of i.i.d. CN(0, variance) entries.
CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng,
                              double variance = 1.0);

/// Haar-distributed n x k matrix with orthonormal columns.
CMatrix random_orthonormal(Eigen::Index n, Eigen::Index k, SeededRng& rng);

}  // namespace iacr
