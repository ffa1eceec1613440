#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

#include "giwvol/errors.hpp"

namespace giwvol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative tolerance for eigenvalue thresholds and PD checks.
inline constexpr double kDefaultRelTol = 1e-10;

/// Looser threshold used when counting the rank of sampled or plug-in
/// matrices whose near-zero eigenvalues carry accumulated round-off.
inline constexpr double kRankRelTol = 1e-8;

/**
 * Symmetric positive definite matrix.
 *
 * Construction through `checked()` validates symmetry (relative 1e-12) and
 * strict positivity of the spectrum; use it for anything that came from a
 * user. `trusted()` only symmetrizes and is meant for values produced by
 * the library's own closed-form updates.
 */
class SymPosDefMatrix {
 public:
  SymPosDefMatrix() = default;

  static SymPosDefMatrix checked(const Matrix& m);
  static SymPosDefMatrix trusted(const Matrix& m);
  static SymPosDefMatrix identity(Eigen::Index p);
  static SymPosDefMatrix scaled_identity(Eigen::Index p, double c);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  explicit SymPosDefMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Upper-triangular factor U with positive diagonal and M = U'U.
class UpperTriangular {
 public:
  UpperTriangular() = default;
  explicit UpperTriangular(Matrix u);

  const Matrix& matrix() const noexcept { return u_; }
  Eigen::Index dim() const noexcept { return u_.rows(); }
  double log_abs_det() const;

 private:
  Matrix u_;
};

/// Unique symmetric PD R with R*R = M, via the symmetric eigendecomposition.
SymPosDefMatrix sym_sqrt(const SymPosDefMatrix& m);

/// R^{-1} for the symmetric square root R of M.
SymPosDefMatrix sym_inv_sqrt(const SymPosDefMatrix& m);

/// Symmetric square root of a PSD-by-construction matrix. Eigenvalues in
/// [-rel_tol*scale, 0] are clamped to zero; anything more negative throws.
Matrix psd_sqrt(const Matrix& m, double rel_tol = kDefaultRelTol);

/// Apply a scalar function to the spectrum of a symmetric matrix.
Matrix spectral_map(const Matrix& m, const std::function<double(double)>& f);

/// Upper Cholesky factor: M = U'U.
UpperTriangular chol_upper(const SymPosDefMatrix& m);

/// Eigenvalues > rel_tol * max(1, max|eigenvalue|), sorted descending.
std::vector<double> positive_eigenvalues(const Matrix& m, double rel_tol = kDefaultRelTol);

/// log Gamma_p(a) = p(p-1)/4 log(pi) + sum_{j=1..p} log Gamma(a + (1-j)/2).
double log_multigamma(int p, double a);

double log_det(const SymPosDefMatrix& m);
SymPosDefMatrix inverse(const SymPosDefMatrix& m);

/// Throw kDimensionMismatch unless both operands are `p`-dimensional.
void require_dim(Eigen::Index got, Eigen::Index want, const char* what);

}  // namespace giwvol
