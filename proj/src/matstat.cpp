#include "giwvol/matstat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace giwvol {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "symmetric eigendecomposition did not converge");
  }
  return solver;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::kDimensionMismatch, std::string(what) + ": expected dimension " +
                                                   std::to_string(want) + ", got " +
                                                   std::to_string(got));
  }
}

SymPosDefMatrix SymPosDefMatrix::checked(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNotPositiveDefinite, "matrix has non-finite entries");
  }
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::kNotPositiveDefinite, "matrix is not symmetric");
  }
  Matrix s = symmetrize(m);
  const Vector ev = eig(s).eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    throw Error(ErrorKind::kNotPositiveDefinite, "matrix is not positive definite");
  }
  return SymPosDefMatrix(std::move(s));
}

SymPosDefMatrix SymPosDefMatrix::trusted(const Matrix& m) { return SymPosDefMatrix(symmetrize(m)); }

SymPosDefMatrix SymPosDefMatrix::identity(Eigen::Index p) {
  return SymPosDefMatrix(Matrix::Identity(p, p));
}

SymPosDefMatrix SymPosDefMatrix::scaled_identity(Eigen::Index p, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::kNotPositiveDefinite, "scale must be positive");
  return SymPosDefMatrix(c * Matrix::Identity(p, p));
}

UpperTriangular::UpperTriangular(Matrix u) : u_(std::move(u)) {
  for (Eigen::Index i = 0; i < u_.rows(); ++i) {
    if (!(u_(i, i) > 0.0)) {
      throw Error(ErrorKind::kNotPositiveDefinite, "triangular factor needs a positive diagonal");
    }
    for (Eigen::Index j = 0; j < i; ++j) u_(i, j) = 0.0;
  }
}

double UpperTriangular::log_abs_det() const {
  return u_.diagonal().array().log().sum();
}

Matrix spectral_map(const Matrix& m, const std::function<double(double)>& f) {
  const auto solver = eig(symmetrize(m));
  Vector mapped = solver.eigenvalues().unaryExpr(f);
  const Matrix& v = solver.eigenvectors();
  return symmetrize(v * mapped.asDiagonal() * v.transpose());
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> pd_eig(const SymPosDefMatrix& m) {
  auto solver = eig(m.matrix());
  if (!(solver.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::kNotPositiveDefinite, "square root of a matrix that is not PD");
  }
  return solver;
}

}  // namespace

SymPosDefMatrix sym_sqrt(const SymPosDefMatrix& m) {
  const auto solver = pd_eig(m);
  const Matrix& v = solver.eigenvectors();
  return SymPosDefMatrix::trusted(v * solver.eigenvalues().cwiseSqrt().asDiagonal() *
                                  v.transpose());
}

SymPosDefMatrix sym_inv_sqrt(const SymPosDefMatrix& m) {
  const auto solver = pd_eig(m);
  const Matrix& v = solver.eigenvectors();
  return SymPosDefMatrix::trusted(
      v * solver.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
}

Matrix psd_sqrt(const Matrix& m, double rel_tol) {
  const auto solver = eig(symmetrize(m));
  Vector ev = solver.eigenvalues();
  const double floor = -rel_tol * std::max(1.0, max_abs(ev));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor) {
      throw Error(ErrorKind::kNotPositiveDefinite, "matrix has a negative eigenvalue");
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  const Matrix& v = solver.eigenvectors();
  return symmetrize(v * ev.asDiagonal() * v.transpose());
}

UpperTriangular chol_upper(const SymPosDefMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "Cholesky factorization broke down");
  }
  return UpperTriangular(llt.matrixU());
}

std::vector<double> positive_eigenvalues(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return {};
  const Vector ev = eig(symmetrize(m)).eigenvalues();
  const double threshold = rel_tol * std::max(1.0, max_abs(ev));
  std::vector<double> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > threshold) out.push_back(ev(i));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double log_multigamma(int p, double a) {
  if (p < 1) throw Error(ErrorKind::kDomain, "multivariate gamma needs p >= 1");
  if (!(a > 0.5 * (p - 1))) {
    throw Error(ErrorKind::kDomain, "multivariate gamma needs a > (p-1)/2");
  }
  double out = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= p; ++j) out += std::lgamma(a + 0.5 * (1 - j));
  return out;
}

double log_det(const SymPosDefMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "log-determinant of a matrix that is not PD");
  }
  const Matrix& l = llt.matrixLLT();
  return 2.0 * l.diagonal().array().log().sum();
}

SymPosDefMatrix inverse(const SymPosDefMatrix& m) {
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "inverse of a matrix that is not PD");
  }
  return SymPosDefMatrix::trusted(llt.solve(Matrix::Identity(m.dim(), m.dim())));
}

}  // namespace giwvol
