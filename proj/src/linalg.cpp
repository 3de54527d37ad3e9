#include "iacr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iacr/errors.hpp"

namespace iacr {

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() <= rel_tol * scale;
}

EigDecomposition hermitian_eig(const CMatrix& a, double herm_tol) {
  if (a.rows() != a.cols()) {
    throw ContractError("hermitian_eig: matrix is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + ", expected square");
  }
  if (!is_hermitian(a, herm_tol)) {
    throw ContractError("hermitian_eig: matrix is not Hermitian within tolerance");
  }
  if (a.rows() == 0) return {RVector(0), CMatrix(0, 0)};
  // Only the lower triangle is read; symmetrize so round-off in the caller
  // does not leak into one half.
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SingularityError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix smallest_eigenvectors(const CMatrix& a, int count) {
  if (count < 0 || count > a.rows()) {
    throw InputError("smallest_eigenvectors: requested " + std::to_string(count) +
                     " vectors from a " + std::to_string(a.rows()) + "-dim matrix");
  }
  return hermitian_eig(a).vectors.leftCols(count);
}

double min_eigenvalue(const CMatrix& a) {
  const auto eig = hermitian_eig(a);
  if (eig.values.size() == 0) throw InputError("min_eigenvalue: empty matrix");
  return eig.values(0);
}

double max_eigenvalue(const CMatrix& a) {
  const auto eig = hermitian_eig(a);
  if (eig.values.size() == 0) throw InputError("max_eigenvalue: empty matrix");
  return eig.values(eig.values.size() - 1);
}

CMatrix null_space_basis(const CMatrix& a, double tol) {
  if (!(tol > 0.0)) throw InputError("null_space_basis: tol must be positive");
  const auto n = a.cols();
  if (a.rows() == 0) return CMatrix::Identity(n, n);
  if (n == 0) return CMatrix(0, 0);

  // Right singular vectors are the eigenvectors of A^H A; working on A keeps
  // the small singular values at full relative accuracy.
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);

  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s <= cutoff) cols.push_back(j);
  }
  // JacobiSVD sorts singular values descending, so the null directions sit at
  // the right. Reverse them so column 0 has the smallest singular value.
  CMatrix basis(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(cols[cols.size() - 1 - c]);
  }
  return basis;
}

CMatrix orthogonal_projector(const CMatrix& r, std::string_view what, double rank_tol) {
  const auto n = r.rows();
  if (r.cols() == 0) return CMatrix::Zero(n, n);
  if (r.cols() > n) {
    throw SingularityError("orthogonal_projector: " + std::string(what) + " has more columns (" +
                           std::to_string(r.cols()) + ") than rows (" + std::to_string(n) + ")");
  }
  const CMatrix gram = r.adjoint() * r;
  const auto eig = hermitian_eig(gram);
  const double top = eig.values(eig.values.size() - 1);
  if (!(top > 0.0) || eig.values(0) <= rank_tol * top) {
    throw SingularityError("orthogonal_projector: " + std::string(what) +
                           " is rank deficient (R^H R is singular)");
  }
  const CMatrix proj = r * gram.ldlt().solve(r.adjoint());
  return 0.5 * (proj + proj.adjoint());
}

CVector solve_hermitian_pd(const CMatrix& b, const CVector& y, double pd_tol) {
  if (b.rows() != b.cols() || b.rows() != y.size()) {
    throw InputError("solve_hermitian_pd: dimension mismatch");
  }
  const auto eig = hermitian_eig(b);
  const double top = eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
  if (!(top > 0.0) || eig.values(0) <= pd_tol * top) {
    throw SingularityError("solve_hermitian_pd: matrix is not positive definite");
  }
  Eigen::LLT<CMatrix> llt(0.5 * (b + b.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw SingularityError("solve_hermitian_pd: Cholesky factorization failed");
  }
  return llt.solve(y);
}

CMatrix sample_covariance(std::span<const CVector> samples, double noise_var) {
  if (samples.empty()) throw InputError("sample_covariance: empty sample set");
  if (!(noise_var > 0.0)) throw InputError("sample_covariance: noise variance must be positive");
  const auto dim = samples.front().size();
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (const auto& s : samples) {
    if (s.size() != dim) throw InputError("sample_covariance: samples differ in dimension");
    acc.noalias() += s * s.adjoint();
  }
  acc /= static_cast<double>(samples.size()) * noise_var;
  return acc;
}

int numerical_rank(const CMatrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

double orthonormality_error(const CMatrix& q) {
  return (q.adjoint() * q - CMatrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace iacr
