#pragma once

#include <cstdint>
#include <vector>

#include "giwvol/gwishart.hpp"
#include "giwvol/model_config.hpp"

namespace giwvol {

/// Parameters of the generative model. Unlike ModelConfig, Omega may be
/// singular (Omega = 0 gives the pure volatility model y_t = theta + noise).
struct SimConfig {
  double delta = 0.7;
  double phi = 1.0;
  Matrix omega;

  static SimConfig from(const ModelConfig& config);
  Eigen::Index dim() const noexcept { return omega.rows(); }
  void validate() const;
};

/// Sigma_t from Sigma_{t-1} through
/// Sigma_t^{-1} = k U(Sigma_{t-1}^{-1})' B_t U(Sigma_{t-1}^{-1}), B_t ~ B_p(m/2, 1/2).
SymPosDefMatrix evolve_precision(Rng& rng, const SymPosDefMatrix& sigma_prev,
                                 const SimConfig& config);

/**
 * The same precision evolution carried through the Cholesky factor.
 *
 * U(Sigma_t^{-1}) = sqrt(k) U(B_t) U(Sigma_{t-1}^{-1}) is a product of upper
 * triangular factors, so the walk never refactorizes Sigma_t^{-1}. The
 * factor is stored as diag(exp(log_diag)) * W with W unit upper triangular.
 * The coordinates drift apart at different exponential rates, so Sigma_t
 * becomes extremely ill-conditioned; this form keeps it exactly PD.
 */
class PrecisionWalk {
 public:
  PrecisionWalk(const SymPosDefMatrix& sigma0, const SimConfig& config);

  /// Advance one step; returns the singular-beta draw B_t used.
  Matrix step(Rng& rng);

  /// log of the diagonal of U(Sigma_t^{-1}).
  const Vector& log_diag() const noexcept { return log_diag_; }
  /// Unit upper triangular part W of U(Sigma_t^{-1}).
  const Matrix& unit_factor() const noexcept { return unit_; }
  long t() const noexcept { return t_; }

  double log_det_sigma() const { return -2.0 * log_diag_.sum(); }
  /// F = U(Sigma_t^{-1})^{-1}, so Sigma_t = F F'.
  Matrix sigma_factor() const;
  /// Sigma_t materialized at full scale.
  SymPosDefMatrix sigma() const;
  /// Symmetric square root of Sigma_t from the SVD of the factor.
  Matrix sigma_sqrt() const;

 private:
  SimConfig config_;
  SingularBetaParams beta_;
  double half_log_k_;
  Vector log_diag_;
  Matrix unit_;
  long t_ = 0;
};

struct SimPath {
  Matrix ys;      // N x p
  Matrix thetas;  // N x p
  std::vector<SymPosDefMatrix> sigmas;  // Sigma_0 .. Sigma_N
  std::uint64_t seed = 0;
};

/// Forward simulation for t = 1..N. The state innovation is drawn as
/// Sigma_t^{1/2} Omega^{1/2} z_t, which has the same distribution as
/// Omega_t^{1/2} omega_t with Omega_t = Sigma_t^{1/2} Omega Sigma_t^{1/2}.
SimPath simulate_path(Rng& rng, const SimConfig& config, const SymPosDefMatrix& sigma0,
                      const Vector& theta0, long n_steps);

/// Seeds a fresh Rng; identical seeds give identical paths.
SimPath simulate_path(std::uint64_t seed, const SimConfig& config, const SymPosDefMatrix& sigma0,
                      const Vector& theta0, long n_steps);

}  // namespace giwvol
