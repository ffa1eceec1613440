#pragma once

#include <random>
#include <utility>

#include "giwvol/matstat.hpp"

namespace giwvol {

/// Random source injected into every sampler. Each execution context owns one.
using Rng = std::mt19937_64;

/// X ~ GIW_p(n, A, S): the inverted-Wishart generalization with separate
/// left and right scale matrices. Requires n > 2p.
struct GIWParams {
  double n = 0.0;
  SymPosDefMatrix A;
  SymPosDefMatrix S;

  Eigen::Index dim() const { return A.dim(); }
  void validate() const;
};

/// Y = X^{-1} for X ~ GIW_p(nu + p + 1, A, S); written GW_p(nu, A^{-1}, S^{-1}).
/// `a_inv` and `s_inv` are the covariance-type parameters. Requires nu > p - 1.
struct GWParams {
  double nu = 0.0;
  SymPosDefMatrix a_inv;
  SymPosDefMatrix s_inv;

  Eigen::Index dim() const { return a_inv.dim(); }
  void validate() const;
};

/// Singular multivariate beta B_p(m/2, n/2). For n_int < p, I - B has rank n_int.
struct SingularBetaParams {
  double m = 0.0;
  int n_int = 1;
  int p = 1;

  void validate() const;
};

double giw_logpdf(const GIWParams& params, const SymPosDefMatrix& x);
double gw_logpdf(const GWParams& params, const SymPosDefMatrix& y);

/// Closed-form pair (E[X^{1/2} S^{-1} X^{1/2}], E[X^{-1/2} S X^{-1/2}])
/// = (A/(n-2p-2), (n-p-1) A^{-1}). Needs n > 2p + 2.
std::pair<SymPosDefMatrix, SymPosDefMatrix> giw_mean_quadforms(const GIWParams& params);

/// E|X|^ell for 0 < ell < (n-2p)/2, evaluated in log space.
double giw_logdet_moment(const GIWParams& params, double ell);

/**
 * Symmetric point estimator of X ~ GIW_p(n, A, S):
 *
 *   (S^{1/2} A S^{1/2} + A^{1/2} S A^{1/2}) / (2n - 4p - 4).
 *
 * Symmetric in (A, S); reduces to AS/(n-4) for p = 1 and to the IW mean
 * S/(n-2p-2) when A = I.
 */
SymPosDefMatrix giw_estimator(const SymPosDefMatrix& a, const SymPosDefMatrix& s, double n);

/// Same estimator with precomputed symmetric square roots of both arguments.
SymPosDefMatrix giw_estimator(const SymPosDefMatrix& a, const SymPosDefMatrix& a_sqrt,
                              const SymPosDefMatrix& s, const SymPosDefMatrix& s_sqrt, double n);

/// Log-density of B ~ B_p(m/2, n/2) with respect to the measure on matrices
/// whose complement I - B has rank n_int. Throws kRankMismatch otherwise.
double singular_beta_logpdf(const SingularBetaParams& params, const Matrix& b);

/**
 * Log-density of X = A B^{-1} A' for B ~ B_p(m/2, n/2) and nonsingular A.
 *
 * X lives on AA' + {PSD matrices of rank n}. The density is the pushforward
 * of the singular beta through inversion (Jacobian |B|^{-(p+1)}) and the
 * congruence V -> A V A' on rank-n matrices (Jacobian |A|^n times the ratio
 * of the nonzero eigenvalue products to the power (p-n+1)/2).
 */
double transformed_beta_logpdf(const SingularBetaParams& params, const Matrix& a,
                               const SymPosDefMatrix& x);

/// Bartlett draw from W_p(df, I_p); real df > p - 1 is allowed.
SymPosDefMatrix sample_wishart(Rng& rng, double df, int p);

/// B = U(C)'^{-1} A1 U(C)^{-1} with A1 ~ W_p(m, I), C = A1 + sum_j Y_j Y_j'.
Matrix sample_singular_beta(Rng& rng, const SingularBetaParams& params);

}  // namespace giwvol
