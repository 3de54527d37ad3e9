#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace iacr {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Tolerances used by the dense kernels. All are relative to a matrix norm.
struct LinalgTolerances {
  double hermitian = 1e-9;  // ||A - A^H||_F <= hermitian * max(1, ||A||_F)
  double rank = 1e-10;      // smallest eigenvalue of R^H R over largest
  double pd = 1e-10;        // smallest eigenvalue over largest for "positive definite"
  double null_space = 1e-8; // singular values below null_space * max(1, sigma_max)
};

inline constexpr LinalgTolerances kDefaultTolerances{};

/// Eigen-pairs of a Hermitian matrix, eigenvalues ascending. Column i of
/// `vectors` belongs to `values[i]`.
struct EigDecomposition {
  RVector values;
  CMatrix vectors;
};

bool is_hermitian(const CMatrix& a, double rel_tol = kDefaultTolerances.hermitian);

/// Throws ContractError when `a` is non-square or not Hermitian within tolerance.
EigDecomposition hermitian_eig(const CMatrix& a,
                               double herm_tol = kDefaultTolerances.hermitian);

/// Eigenvectors of the `count` smallest eigenvalues (the "E_1..E_count" columns).
CMatrix smallest_eigenvectors(const CMatrix& a, int count);

double min_eigenvalue(const CMatrix& a);
double max_eigenvalue(const CMatrix& a);

/// Orthonormal basis of null(A): eigenvectors of A^H A whose eigenvalue is at
/// most (tol * max(1, ||A||_2))^2. A 0-row A yields the identity basis.
CMatrix null_space_basis(const CMatrix& a, double tol = kDefaultTolerances.null_space);

/// Orthogonal projector R (R^H R)^{-1} R^H onto range(R). A 0-column R gives
/// the zero projector. Throws SingularityError naming `what` when R is
/// rank deficient.
CMatrix orthogonal_projector(const CMatrix& r, std::string_view what = "R",
                             double rank_tol = kDefaultTolerances.rank);

/// Solves B x = y for Hermitian positive definite B (Cholesky).
CVector solve_hermitian_pd(const CMatrix& b, const CVector& y,
                           double pd_tol = kDefaultTolerances.pd);

/// (1 / (L sigma^2)) sum_n y_n y_n^H over the L vectors in `samples`.
CMatrix sample_covariance(std::span<const CVector> samples, double noise_var);

/// Numerical rank: singular values above rel_tol * largest.
int numerical_rank(const CMatrix& a, double rel_tol = kDefaultTolerances.rank);

/// Deviation ||Q^H Q - I||_F of the columns of q from orthonormality.
double orthonormality_error(const CMatrix& q);

}  // namespace iacr
