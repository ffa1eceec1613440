#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "giwvol/likelihood.hpp"
#include "giwvol/model_config.hpp"

namespace giwvol {

/// k = {delta(1-p) + p} / {delta(2-p) + p - 1}; k > 1 for 0 < delta < 1.
double discount_k(double delta, int p);

/// Singular-beta degrees of freedom m = delta/(1-delta) + p - 1.
double beta_dof_m(double delta, int p);

/// Posterior GIW degrees of freedom n = 1/(1-delta) + 2p.
double posterior_df(double delta, int p);

/**
 * Steady state of P_t = R_t (R_t + I)^{-1}, R_t = phi^2 P_{t-1} + Omega.
 *
 * P commutes with Omega, so each eigenvalue w of Omega maps to the positive
 * root of phi^2 x^2 + (w + 1 - phi^2) x - w = 0, evaluated in the
 * cancellation-free form 2w / (b + sqrt(b^2 + 4 phi^2 w)), b = w + 1 - phi^2.
 * At phi = 0 this is w / (w + 1).
 */
SymPosDefMatrix limit_P(double phi, const SymPosDefMatrix& omega);

/// One application of the P recursion.
SymPosDefMatrix next_P(double phi, const SymPosDefMatrix& omega, const SymPosDefMatrix& p_prev);

/// Iterates the P recursion from p0 * I until the max-abs change is below tol.
/// Test oracle for limit_P.
SymPosDefMatrix iterate_P_to_convergence(double phi, const SymPosDefMatrix& omega, double p0,
                                         int max_iter, double tol);

/// Q = P + Omega + I with P = limit_P(phi, Omega).
SymPosDefMatrix steady_Q(const ModelConfig& config);

struct FilterState {
  long t = 0;
  Vector m;
  SymPosDefMatrix P;
  SymPosDefMatrix S;
  /// Point estimate of Sigma_t given y^t (the GIW estimator at (Q^{-1}, S_t)).
  SymPosDefMatrix S_star;
};

/// Multivariate-t one-step predictive distribution, parameterized so that
/// covariance = scale / (dof - 2).
struct ForecastDist {
  double dof = 0.0;
  Vector location;
  SymPosDefMatrix scale;
  SymPosDefMatrix covariance;
};

struct StepRecord {
  long t = 0;
  ForecastDist forecast;
  Vector e;
  Vector u;
  SymPosDefMatrix S_star;
  /// Per-step share of the plug-in log-likelihood (term groups plus c/N).
  /// NaN until filter_run attaches the likelihood.
  double loglik = std::numeric_limits<double>::quiet_NaN();
};

/// Quantities fixed for the lifetime of one filter instance.
class FilterContext {
 public:
  explicit FilterContext(const ModelConfig& config);
  FilterContext(const ModelConfig& config, const SymPosDefMatrix& q);

  const ModelConfig& config() const noexcept { return config_; }
  const SymPosDefMatrix& Q() const noexcept { return q_; }
  const SymPosDefMatrix& Q_inv() const noexcept { return q_inv_; }
  const SymPosDefMatrix& Q_inv_sqrt() const noexcept { return q_inv_sqrt_; }
  double k() const noexcept { return k_; }
  double n() const noexcept { return n_; }

  /// S* = GIW estimator at (Q^{-1}, s).
  SymPosDefMatrix point_estimate(const SymPosDefMatrix& s) const;

 private:
  ModelConfig config_;
  SymPosDefMatrix q_;
  SymPosDefMatrix q_inv_;
  SymPosDefMatrix q_inv_sqrt_;
  double k_;
  double n_;
};

FilterState filter_init(const ModelConfig& config);
FilterState filter_init(const FilterContext& ctx);

struct StepOutput {
  FilterState state;
  StepRecord record;
};

StepOutput filter_step(const FilterState& state, const Vector& y, const ModelConfig& config,
                       const SymPosDefMatrix& q);
StepOutput filter_step(const FilterState& state, const Vector& y, const FilterContext& ctx);

struct FilterRun {
  std::vector<StepRecord> records;
  FilterState initial_state;
  FilterState final_state;
  SymPosDefMatrix Q;
  /// Empty when the likelihood is undefined on this path; see likelihood_failure.
  std::optional<LikelihoodBreakdown> likelihood;
  std::optional<Error> likelihood_failure;
};

/// Runs filter_step for t = 1..N over the rows of `ys` (N x p). Step
/// failures abort with the offending t. The plug-in likelihood is attached
/// when `with_likelihood` is set; a likelihood failure does not discard the
/// filtered path.
FilterRun filter_run(const Matrix& ys, const ModelConfig& config, bool with_likelihood = true);

}  // namespace giwvol
