#include "giwvol/simulator.hpp"

#include <cmath>
#include <string>

#include "giwvol/vol_filter.hpp"

namespace giwvol {

SimConfig SimConfig::from(const ModelConfig& config) {
  return SimConfig{config.delta, config.phi, config.omega.matrix()};
}

void SimConfig::validate() const {
  if (!(delta > 2.0 / 3.0 && delta < 1.0)) {
    throw Error(ErrorKind::kValidation, "delta must satisfy 2/3 < delta < 1");
  }
  if (omega.rows() == 0 || omega.rows() != omega.cols()) {
    throw Error(ErrorKind::kValidation, "Omega must be a non-empty square matrix");
  }
  if (!std::isfinite(phi)) throw Error(ErrorKind::kValidation, "phi must be finite");
  psd_sqrt(omega);  // throws on a negative eigenvalue
}

namespace {

SingularBetaParams evolution_beta(const SimConfig& config) {
  const int p = static_cast<int>(config.dim());
  return SingularBetaParams{beta_dof_m(config.delta, p), 1, p};
}

// k U(L)' B U(L)
Matrix evolve(const Matrix& precision, const Matrix& b, double k) {
  const Matrix u = chol_upper(SymPosDefMatrix::trusted(precision)).matrix();
  const Matrix next = k * u.transpose() * b * u;
  return 0.5 * (next + next.transpose());
}

}  // namespace

SymPosDefMatrix evolve_precision(Rng& rng, const SymPosDefMatrix& sigma_prev,
                                 const SimConfig& config) {
  config.validate();
  require_dim(sigma_prev.dim(), config.dim(), "Sigma_{t-1}");
  const int p = static_cast<int>(config.dim());
  const Matrix b = sample_singular_beta(rng, evolution_beta(config));
  const Matrix precision = evolve(inverse(sigma_prev).matrix(), b, discount_k(config.delta, p));
  return inverse(SymPosDefMatrix::trusted(precision));
}

PrecisionWalk::PrecisionWalk(const SymPosDefMatrix& sigma0, const SimConfig& config)
    : config_(config), beta_(evolution_beta(config)) {
  config_.validate();
  require_dim(sigma0.dim(), config.dim(), "Sigma_0");
  half_log_k_ = 0.5 * std::log(discount_k(config.delta, static_cast<int>(config.dim())));
  const Matrix u = chol_upper(inverse(sigma0)).matrix();
  const Vector d = u.diagonal();
  log_diag_ = d.array().log();
  unit_ = d.cwiseInverse().asDiagonal() * u;
}

Matrix PrecisionWalk::step(Rng& rng) {
  Matrix b = sample_singular_beta(rng, beta_);
  const Matrix ub = chol_upper(SymPosDefMatrix::trusted(b)).matrix();
  const Eigen::Index p = ub.rows();
  // U(B) diag(e^l) W = diag(e^l) T W with T_ij = U(B)_ij e^{l_j - l_i}
  Matrix t = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    t(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      t(i, j) = ub(i, j) / ub(i, i) * std::exp(log_diag_(j) - log_diag_(i));
    }
  }
  Matrix next = t.triangularView<Eigen::UnitUpper>() * unit_;
  if (!next.allFinite()) {
    throw Error(ErrorKind::kNumerical, "precision evolution left the double range", t_ + 1);
  }
  unit_ = next.triangularView<Eigen::UnitUpper>();
  log_diag_.array() += half_log_k_ + ub.diagonal().array().log();
  ++t_;
  return b;
}

Matrix PrecisionWalk::sigma_factor() const {
  const Matrix u = log_diag_.array().exp().matrix().asDiagonal() * unit_;
  Matrix f = Matrix::Identity(u.rows(), u.cols());
  u.triangularView<Eigen::Upper>().solveInPlace(f);
  return f;
}

SymPosDefMatrix PrecisionWalk::sigma() const {
  const Matrix f = sigma_factor();
  return SymPosDefMatrix::trusted(f * f.transpose());
}

Matrix PrecisionWalk::sigma_sqrt() const {
  // F = V S R' gives Sigma^{1/2} = V S V'. Jacobi SVD keeps the small
  // singular values of a column-graded factor accurate.
  Eigen::JacobiSVD<Matrix> svd(sigma_factor(), Eigen::ComputeFullU);
  const Matrix& v = svd.matrixU();
  const Matrix root = v * svd.singularValues().asDiagonal() * v.transpose();
  return 0.5 * (root + root.transpose());
}

SimPath simulate_path(Rng& rng, const SimConfig& config, const SymPosDefMatrix& sigma0,
                      const Vector& theta0, long n_steps) {
  config.validate();
  const Eigen::Index p = config.dim();
  require_dim(theta0.size(), p, "theta_0");
  if (n_steps < 1) throw Error(ErrorKind::kValidation, "simulation needs N >= 1");

  const Matrix omega_root = psd_sqrt(config.omega);
  std::normal_distribution<double> normal(0.0, 1.0);
  PrecisionWalk walk(sigma0, config);

  SimPath path;
  path.ys.resize(n_steps, p);
  path.thetas.resize(n_steps, p);
  path.sigmas.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.sigmas.push_back(sigma0);

  Vector theta = theta0;
  Vector z(p);
  Vector eps(p);
  for (long t = 0; t < n_steps; ++t) {
    walk.step(rng);
    SymPosDefMatrix sigma = walk.sigma();
    const Matrix sigma_root = walk.sigma_sqrt();
    for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(rng);
    for (Eigen::Index i = 0; i < p; ++i) eps(i) = normal(rng);
    theta = config.phi * theta + sigma_root * (omega_root * z);
    path.thetas.row(t) = theta.transpose();
    path.ys.row(t) = (theta + sigma_root * eps).transpose();
    if (!path.ys.row(t).allFinite()) {
      throw Error(ErrorKind::kNumerical, "simulated observation left the double range", t + 1);
    }
    path.sigmas.push_back(std::move(sigma));
  }
  return path;
}

SimPath simulate_path(std::uint64_t seed, const SimConfig& config, const SymPosDefMatrix& sigma0,
                      const Vector& theta0, long n_steps) {
  Rng rng(seed);
  SimPath path = simulate_path(rng, config, sigma0, theta0, n_steps);
  path.seed = seed;
  return path;
}

}  // namespace giwvol
