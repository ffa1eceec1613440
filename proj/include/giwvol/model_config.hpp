#pragma once

#include "giwvol/matstat.hpp"

namespace giwvol {

/// Location of the one-step forecast: m_{t-1} as printed in the filter
/// recursions, or phi * m_{t-1} as the state transition implies.
enum class ForecastMeanMode { kPaperVerbatim, kPhiScaled };

/// Scale matrix used to whiten e_t: the forecast covariance built from
/// S_{t-1}, or the posterior S_t.
enum class StandardizationMode { kForecastCov, kPaperVerbatimSt };

/**
 * Fixed hyperparameters of one filter instance.
 *
 * The discount factor must satisfy 2/3 < delta < 1: below 2/3 the forecast
 * variance is infinite and the estimator denominator 2/(1-delta) - 4 turns
 * non-positive. Omega must be positive definite.
 */
struct ModelConfig {
  double delta = 0.7;
  double phi = 1.0;
  SymPosDefMatrix omega;
  Vector m0;
  double p0 = 1000.0;
  SymPosDefMatrix s0;
  double tol = kDefaultRelTol;
  ForecastMeanMode forecast_mean_mode = ForecastMeanMode::kPaperVerbatim;
  StandardizationMode standardization_mode = StandardizationMode::kForecastCov;

  Eigen::Index dim() const noexcept { return omega.dim(); }

  /// Config with Omega = omega and the default priors m0 = 0, p0 = 1000, S0 = I.
  static ModelConfig with_defaults(double delta, double phi, const SymPosDefMatrix& omega);

  /// Throws kValidation naming the first violated constraint.
  void validate() const;
};

}  // namespace giwvol
