#include <cmath>
#include <vector>

#include "doctest.h"
#include "iacr/errors.hpp"
#include "iacr/linalg.hpp"
#include "iacr/rng.hpp"

using namespace iacr;

namespace {

CMatrix random_hermitian(int n, SeededRng& rng) {
  const CMatrix g = random_complex_matrix(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

CMatrix random_pd(int n, SeededRng& rng) {
  const CMatrix g = random_complex_matrix(n, n, rng);
  return g * g.adjoint() + 0.1 * CMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("hermitian_eig: identity and diagonal") {
  const auto e = hermitian_eig(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0));
  CHECK(orthonormality_error(e.vectors) < 1e-12);

  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto f = hermitian_eig(d);
  CHECK(f.values(0) == doctest::Approx(1.0));
  CHECK(f.values(1) == doctest::Approx(2.0));
  CHECK(f.values(2) == doctest::Approx(3.0));
  // Permuted standard basis: |v| entries are 0 or 1.
  CHECK(std::abs(f.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(f.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(f.vectors(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig: reconstruction, trace and orthonormality on random matrices") {
  SeededRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const CMatrix a = random_hermitian(n, rng);
    const auto e = hermitian_eig(a);
    const CMatrix rec = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    CHECK((a - rec).norm() <= 1e-10 * std::max(1.0, a.norm()));
    CHECK(std::abs(e.values.sum() - a.trace().real()) <= 1e-9 * std::max(1.0, a.norm()));
    CHECK(orthonormality_error(e.vectors) <= 1e-10);
    for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("hermitian_eig: contract violations") {
  CHECK_THROWS_AS(hermitian_eig(CMatrix::Zero(2, 3)), ContractError);
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(a), ContractError);
}

TEST_CASE("null_space_basis") {
  CMatrix a = CMatrix::Zero(2, 3);
  a(0, 0) = 1;
  a(1, 1) = 1;
  const CMatrix n = null_space_basis(a);
  REQUIRE(n.cols() == 1);
  CHECK(std::abs(n(2, 0)) == doctest::Approx(1.0));

  SeededRng rng(5);
  CHECK(null_space_basis(random_complex_matrix(4, 4, rng)).cols() == 0);

  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix r = random_complex_matrix(2, 3, rng);
    const CMatrix b = null_space_basis(r);
    REQUIRE(b.cols() == 1);
    CHECK((r * b).norm() <= 1e-10);
    CHECK(orthonormality_error(b) <= 1e-12);
  }
}

TEST_CASE("null_space_basis: rank plus nullity equals column count") {
  SeededRng rng(6);
  for (int rank = 0; rank <= 4; ++rank) {
    CMatrix a = CMatrix::Zero(5, 6);
    if (rank > 0) a = random_complex_matrix(5, rank, rng) * random_complex_matrix(rank, 6, rng);
    const CMatrix n = null_space_basis(a);
    CHECK(numerical_rank(a.adjoint() * a, 1e-9) + n.cols() == 6);
    CHECK((a * n).norm() <= 1e-8 * std::max(1.0, a.norm()));
  }
  // No rows: everything is in the null space.
  CHECK(null_space_basis(CMatrix(0, 3)).cols() == 3);
}

TEST_CASE("orthogonal_projector") {
  CMatrix e1 = CMatrix::Zero(4, 1);
  e1(0, 0) = 1;
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(0, 0) = 1;
  CHECK((orthogonal_projector(e1) - expect).norm() < 1e-14);
  CHECK((orthogonal_projector(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-14);

  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix r = random_complex_matrix(4, 2, rng);
    const CMatrix p = orthogonal_projector(r);
    CHECK(is_hermitian(p));
    CHECK((p * p - p).norm() <= 1e-9);
    CHECK((p * r - r).norm() <= 1e-9 * r.norm());
    const CMatrix q = CMatrix::Identity(4, 4) - p;
    CHECK((q * r).norm() <= 1e-9 * r.norm());
    CHECK((p + q - CMatrix::Identity(4, 4)).norm() == 0.0);
  }
}

TEST_CASE("orthogonal_projector: rank deficiency names the matrix") {
  CMatrix r(3, 2);
  r.col(0) << 1, 2, 3;
  r.col(1) = 2.0 * r.col(0);
  try {
    orthogonal_projector(r, "R_1^[2]");
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("R_1^[2]") != std::string::npos);
  }
  CHECK_THROWS_AS(orthogonal_projector(CMatrix::Ones(2, 3)), SingularityError);
  CHECK(orthogonal_projector(CMatrix(3, 0)).isZero());
}

TEST_CASE("solve_hermitian_pd") {
  SeededRng rng(8);
  const CVector y = random_complex_matrix(4, 1, rng).col(0);
  CHECK((solve_hermitian_pd(CMatrix::Identity(4, 4), y) - y).norm() < 1e-14);
  CHECK((solve_hermitian_pd(2.0 * CMatrix::Identity(4, 4), y) - 0.5 * y).norm() < 1e-14);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix b = random_pd(6, rng);
    const CVector v = random_complex_matrix(6, 1, rng).col(0);
    const CVector x = solve_hermitian_pd(b, v);
    CHECK((b * x - v).norm() <= 1e-9 * v.norm());
  }
  CMatrix indefinite = CMatrix::Identity(2, 2);
  indefinite(1, 1) = -1;
  CHECK_THROWS_AS(solve_hermitian_pd(indefinite, CVector::Ones(2)), SingularityError);
}

TEST_CASE("sample_covariance") {
  CVector e1 = CVector::Zero(2);
  e1(0) = 1;
  CVector e2 = CVector::Zero(2);
  e2(1) = 1;
  const std::vector<CVector> one{e1};
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(0, 0) = 1;
  CHECK((sample_covariance(one, 1.0) - expect).norm() == 0.0);
  const std::vector<CVector> two{e1, e2};
  CHECK((sample_covariance(two, 1.0) - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);

  CHECK_THROWS_AS(sample_covariance(std::vector<CVector>{}, 1.0), InputError);
  CHECK_THROWS_AS(sample_covariance(one, 0.0), InputError);

  SeededRng rng(9);
  std::vector<CVector> noise;
  for (int i = 0; i < 10000; ++i) noise.push_back(random_complex_matrix(3, 1, rng).col(0));
  const CMatrix r = sample_covariance(noise, 1.0);
  CHECK((r - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.05);
  CHECK(min_eigenvalue(r) >= 0.0);

  // Scaling samples by c multiplies the covariance by c^2 / noise_var.
  std::vector<CVector> scaled;
  for (const auto& v : noise) scaled.push_back(3.0 * v);
  CHECK((sample_covariance(scaled, 2.0) - 4.5 * r).norm() <= 1e-12 * r.norm());
}
