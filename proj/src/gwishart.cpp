#include "giwvol/gwishart.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace giwvol {

namespace {

const double kLogPi = std::log(std::numbers::pi);
const double kLog2 = std::log(2.0);

double trace_sandwich(const Matrix& left, const Matrix& middle_root, const Matrix& right) {
  // tr(left * R * right * R)
  return (left * middle_root * right * middle_root).trace();
}

double log_abs_det_general(const Matrix& a) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& f = lu.matrixLU();
  double out = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double d = std::abs(f(i, i));
    if (!(d > 0.0)) throw Error(ErrorKind::kDomain, "matrix is singular");
    out += std::log(d);
  }
  return out;
}

}  // namespace

void GIWParams::validate() const {
  if (A.dim() == 0) throw Error(ErrorKind::kDimensionMismatch, "GIW parameters are empty");
  require_dim(S.dim(), A.dim(), "GIW scale S");
  if (!(n > 2.0 * static_cast<double>(A.dim()))) {
    throw Error(ErrorKind::kDomain, "GIW degrees of freedom must satisfy n > 2p");
  }
}

void GWParams::validate() const {
  if (a_inv.dim() == 0) throw Error(ErrorKind::kDimensionMismatch, "GW parameters are empty");
  require_dim(s_inv.dim(), a_inv.dim(), "GW scale");
  if (!(nu > static_cast<double>(a_inv.dim()) - 1.0)) {
    throw Error(ErrorKind::kDomain, "GW degrees of freedom must satisfy nu > p - 1");
  }
}

void SingularBetaParams::validate() const {
  if (p < 1) throw Error(ErrorKind::kDomain, "singular beta needs p >= 1");
  if (n_int < 1 || n_int > p) {
    throw Error(ErrorKind::kDomain, "singular beta needs 1 <= n <= p");
  }
  if (!(m > p - 1)) throw Error(ErrorKind::kDomain, "singular beta needs m > p - 1");
}

double giw_logpdf(const GIWParams& params, const SymPosDefMatrix& x) {
  params.validate();
  require_dim(x.dim(), params.dim(), "GIW argument");
  const double p = static_cast<double>(params.dim());
  const double n = params.n;
  const double half_df = 0.5 * (n - p - 1.0);
  const Matrix x_inv_root = sym_inv_sqrt(x).matrix();
  return half_df * (log_det(params.A) + log_det(params.S)) - p * half_df * kLog2 -
         log_multigamma(static_cast<int>(params.dim()), half_df) - 0.5 * n * log_det(x) -
         0.5 * trace_sandwich(params.A.matrix(), x_inv_root, params.S.matrix());
}

double gw_logpdf(const GWParams& params, const SymPosDefMatrix& y) {
  params.validate();
  require_dim(y.dim(), params.dim(), "GW argument");
  const double p = static_cast<double>(params.dim());
  const double nu = params.nu;
  const Matrix a = inverse(params.a_inv).matrix();
  const Matrix s = inverse(params.s_inv).matrix();
  const Matrix y_root = sym_sqrt(y).matrix();
  return -0.5 * nu * (log_det(params.a_inv) + log_det(params.s_inv)) - p * 0.5 * nu * kLog2 -
         log_multigamma(static_cast<int>(params.dim()), 0.5 * nu) +
         0.5 * (nu - p - 1.0) * log_det(y) - 0.5 * trace_sandwich(a, y_root, s);
}

std::pair<SymPosDefMatrix, SymPosDefMatrix> giw_mean_quadforms(const GIWParams& params) {
  params.validate();
  const double p = static_cast<double>(params.dim());
  if (!(params.n > 2.0 * p + 2.0)) {
    throw Error(ErrorKind::kDomain, "first GIW moment needs n > 2p + 2");
  }
  return {SymPosDefMatrix::trusted(params.A.matrix() / (params.n - 2.0 * p - 2.0)),
          SymPosDefMatrix::trusted((params.n - p - 1.0) * inverse(params.A).matrix())};
}

double giw_logdet_moment(const GIWParams& params, double ell) {
  params.validate();
  const int pi = static_cast<int>(params.dim());
  const double p = static_cast<double>(pi);
  if (!(ell > 0.0 && ell < 0.5 * (params.n - 2.0 * p))) {
    throw Error(ErrorKind::kDomain, "log-determinant moment needs 0 < ell < (n-2p)/2");
  }
  const double log_value = -p * ell * kLog2 +
                           log_multigamma(pi, 0.5 * (params.n - 2.0 * ell - p - 1.0)) -
                           log_multigamma(pi, 0.5 * (params.n - p - 1.0)) +
                           ell * (log_det(params.A) + log_det(params.S));
  return std::exp(log_value);
}

SymPosDefMatrix giw_estimator(const SymPosDefMatrix& a, const SymPosDefMatrix& s, double n) {
  return giw_estimator(a, sym_sqrt(a), s, sym_sqrt(s), n);
}

SymPosDefMatrix giw_estimator(const SymPosDefMatrix& a, const SymPosDefMatrix& a_sqrt,
                              const SymPosDefMatrix& s, const SymPosDefMatrix& s_sqrt, double n) {
  require_dim(s.dim(), a.dim(), "estimator scale");
  const double p = static_cast<double>(a.dim());
  if (!(n > 2.0 * p + 2.0)) throw Error(ErrorKind::kDomain, "estimator needs n > 2p + 2");
  const Matrix& ar = a_sqrt.matrix();
  const Matrix& sr = s_sqrt.matrix();
  const Matrix sum = sr * a.matrix() * sr + ar * s.matrix() * ar;
  return SymPosDefMatrix::trusted(sum / (2.0 * n - 4.0 * p - 4.0));
}

double singular_beta_logpdf(const SingularBetaParams& params, const Matrix& b) {
  params.validate();
  require_dim(b.rows(), params.p, "singular beta argument");
  require_dim(b.cols(), params.p, "singular beta argument");
  const Matrix complement = Matrix::Identity(params.p, params.p) - b;
  const std::vector<double> k = positive_eigenvalues(complement, kRankRelTol);
  if (static_cast<int>(k.size()) != params.n_int) {
    throw Error(ErrorKind::kRankMismatch, "rank(I - B) is " + std::to_string(k.size()) +
                                              ", expected " + std::to_string(params.n_int));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw Error(ErrorKind::kDomain, "B must be nonsingular");
  if (ev.maxCoeff() > 1.0 + kRankRelTol) {
    throw Error(ErrorKind::kDomain, "spectrum of B must lie in [0, 1]");
  }
  const double p = params.p;
  const double n = params.n_int;
  const double m = params.m;
  double log_k = 0.0;
  for (double v : k) log_k += std::log(v);
  const double log_b = ev.array().log().sum();
  return 0.5 * (n * n - p * n) * kLogPi + log_multigamma(params.p, 0.5 * (m + n)) -
         log_multigamma(params.n_int, 0.5 * n) - log_multigamma(params.p, 0.5 * m) +
         0.5 * (n - p - 1.0) * log_k + 0.5 * (m - p - 1.0) * log_b;
}

double transformed_beta_logpdf(const SingularBetaParams& params, const Matrix& a,
                               const SymPosDefMatrix& x) {
  params.validate();
  require_dim(x.dim(), params.p, "transformed beta argument");
  require_dim(a.rows(), params.p, "transformed beta A");
  require_dim(a.cols(), params.p, "transformed beta A");
  const Matrix b = a.transpose() * inverse(x).matrix() * a;
  const Matrix complement = Matrix::Identity(params.p, params.p) - 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(complement);
  const Vector& ev = solver.eigenvalues();
  const double threshold = kRankRelTol * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> positive;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > threshold) positive.push_back(i);
  }
  if (positive.empty()) {
    throw Error(ErrorKind::kDomain, "I - A'X^{-1}A has no positive eigenvalues");
  }
  const double log_density_b = singular_beta_logpdf(params, b);

  const double p = params.p;
  const double n = params.n_int;
  const double log_abs_det_a = log_abs_det_general(a);
  const double log_det_b = 2.0 * log_abs_det_a - log_det(x);

  // Nonzero spectrum of X - AA' = A H diag(k/(1-k)) H' A' relative to that of
  // H diag(k/(1-k)) H' is det(H'A'AH).
  Matrix h(params.p, static_cast<Eigen::Index>(positive.size()));
  for (std::size_t j = 0; j < positive.size(); ++j) {
    h.col(static_cast<Eigen::Index>(j)) = solver.eigenvectors().col(positive[j]);
  }
  const Matrix ah = a * h;
  const double log_ratio = log_det(SymPosDefMatrix::trusted(ah.transpose() * ah));

  return log_density_b + (p + 1.0) * log_det_b - n * log_abs_det_a -
         0.5 * (p - n + 1.0) * log_ratio;
}

SymPosDefMatrix sample_wishart(Rng& rng, double df, int p) {
  if (p < 1) throw Error(ErrorKind::kDomain, "Wishart dimension must be positive");
  if (!(df > p - 1)) throw Error(ErrorKind::kDomain, "Wishart needs df > p - 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix l = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    std::chi_squared_distribution<double> chi2(df - i);
    l(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) l(i, j) = normal(rng);
  }
  return SymPosDefMatrix::trusted(l * l.transpose());
}

Matrix sample_singular_beta(Rng& rng, const SingularBetaParams& params) {
  params.validate();
  const SymPosDefMatrix a1 = sample_wishart(rng, params.m, params.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix c = a1.matrix();
  for (int j = 0; j < params.n_int; ++j) {
    Vector y(params.p);
    for (int i = 0; i < params.p; ++i) y(i) = normal(rng);
    c.noalias() += y * y.transpose();
  }
  const Matrix u = chol_upper(SymPosDefMatrix::trusted(c)).matrix();
  const auto ut = u.transpose().triangularView<Eigen::Lower>();
  const Matrix left = ut.solve(a1.matrix());                   // U'^{-1} A1
  const Matrix b = ut.solve(left.transpose()).transpose();     // (U'^{-1} A1) U^{-1}
  return 0.5 * (b + b.transpose());
}

}  // namespace giwvol
