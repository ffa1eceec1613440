#pragma once

#include <vector>

#include "giwvol/model_config.hpp"

namespace giwvol {

struct StepRecord;

/// Closed-form log-likelihood of a volatility path, split by term group.
/// total = constant_c + quad_term + chol_logdet_term + lt_term + sigma_logdet_term.
struct LikelihoodBreakdown {
  double total = 0.0;
  double constant_c = 0.0;
  double quad_term = 0.0;
  double chol_logdet_term = 0.0;
  double lt_term = 0.0;
  double sigma_logdet_term = 0.0;
  std::vector<double> per_step;
};

struct PerfReport {
  Vector mse;
  Vector msse;
  Vector mad;
  Vector me;
  long n_obs = 0;
};

/// c = -Np log(pi) - (N/2) log|Q| - (Np/2) log k
///     + N log{Gamma_p(a1) / Gamma_p(a2)},
/// a1 = (delta(1-p)+p) / (2(1-delta)), a2 = (delta(2-p)+p-1) / (2(1-delta)).
double loglik_constant(const ModelConfig& config, const SymPosDefMatrix& q, long n_steps);

/// Per-step contributions of the four term groups.
struct StepTerms {
  double quad = 0.0;
  double chol_logdet = 0.0;
  double lt = 0.0;
  double sigma_logdet = 0.0;
};

/// L_t uses the positive eigenvalues (rel_tol 1e-8) of
/// I - k^{-1} U(Sigma_{t-1}^{-1})'^{-1} Sigma_t^{-1} U(Sigma_{t-1}^{-1})^{-1}.
/// When none passes the tolerance, the largest is used if it exceeds the
/// roundoff floor; otherwise the step throws kDomain.
StepTerms loglik_step_terms(const SymPosDefMatrix& sigma_prev, const SymPosDefMatrix& sigma,
                            const Vector& e, const ModelConfig& config, const SymPosDefMatrix& q);

/// `sigmas` holds Sigma_0..Sigma_N, `es` holds e_1..e_N.
LikelihoodBreakdown loglik_path(const std::vector<SymPosDefMatrix>& sigmas,
                                const std::vector<Vector>& es, const ModelConfig& config,
                                const SymPosDefMatrix& q);

/// Plug-in likelihood at the filtered estimates: Sigma_t = S_t*, with Sigma_0
/// the prior point estimate. Model-selection objective.
LikelihoodBreakdown loglik_at_filter_path(const Matrix& ys, const ModelConfig& config);

/// MSE, MSSE, MAD and ME over the records' e_t and u_t.
PerfReport perf_metrics(const std::vector<StepRecord>& records);

}  // namespace giwvol
