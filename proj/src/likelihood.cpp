#include "giwvol/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "giwvol/vol_filter.hpp"

namespace giwvol {

double loglik_constant(const ModelConfig& config, const SymPosDefMatrix& q, long n_steps) {
  const int pi = static_cast<int>(config.dim());
  const double p = pi;
  const double delta = config.delta;
  const double k = discount_k(delta, pi);
  const double n = static_cast<double>(n_steps);
  const double a1 = (delta * (1.0 - p) + p) / (2.0 * (1.0 - delta));
  const double a2 = (delta * (2.0 - p) + p - 1.0) / (2.0 * (1.0 - delta));
  return -n * p * std::log(std::numbers::pi) - 0.5 * n * log_det(q) - 0.5 * n * p * std::log(k) +
         n * (log_multigamma(pi, a1) - log_multigamma(pi, a2));
}

StepTerms loglik_step_terms(const SymPosDefMatrix& sigma_prev, const SymPosDefMatrix& sigma,
                            const Vector& e, const ModelConfig& config, const SymPosDefMatrix& q) {
  const Eigen::Index p = config.dim();
  require_dim(sigma_prev.dim(), p, "Sigma_{t-1}");
  require_dim(sigma.dim(), p, "Sigma_t");
  require_dim(e.size(), p, "e_t");
  const double delta = config.delta;
  const double k = discount_k(delta, static_cast<int>(p));

  StepTerms terms;
  const Vector w = sym_inv_sqrt(sigma).matrix() * e;
  terms.quad = -0.5 * w.dot(q.matrix() * w);

  const UpperTriangular u = chol_upper(inverse(sigma_prev));
  terms.chol_logdet = -(2.0 * delta - 1.0) / (1.0 - delta) * u.log_abs_det();

  // U'^{-1} Sigma_t^{-1} U^{-1} = (U Sigma_t U')^{-1}
  const Matrix& um = u.matrix();
  const Matrix congruent = um * sigma.matrix() * um.transpose();
  const Matrix l_matrix =
      Matrix::Identity(p, p) - inverse(SymPosDefMatrix::trusted(congruent)).matrix() / k;
  std::vector<double> l = positive_eigenvalues(l_matrix, kRankRelTol);
  if (l.empty()) {
    // The evolution gives L_t rank >= 1, so a lone eigenvalue below the rank
    // tolerance but above roundoff is kept.
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (l_matrix + l_matrix.transpose()),
                                                            Eigen::EigenvaluesOnly)
                          .eigenvalues();
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (!(ev.maxCoeff() > floor)) {
      throw Error(ErrorKind::kDomain, "L_t has no positive eigenvalues");
    }
    l.push_back(ev.maxCoeff());
  }
  double log_l = 0.0;
  for (double v : l) log_l += std::log(v);
  terms.lt = -0.5 * static_cast<double>(p) * log_l;

  terms.sigma_logdet = -(3.0 * delta - 2.0) / (2.0 * (1.0 - delta)) * log_det(sigma);
  return terms;
}

LikelihoodBreakdown loglik_path(const std::vector<SymPosDefMatrix>& sigmas,
                                const std::vector<Vector>& es, const ModelConfig& config,
                                const SymPosDefMatrix& q) {
  if (sigmas.size() != es.size() + 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "likelihood needs Sigma_0..Sigma_N: got " + std::to_string(sigmas.size()) +
                    " matrices for " + std::to_string(es.size()) + " errors");
  }
  const long n_steps = static_cast<long>(es.size());
  LikelihoodBreakdown out;
  out.constant_c = loglik_constant(config, q, n_steps);
  const double c_share = n_steps > 0 ? out.constant_c / static_cast<double>(n_steps) : 0.0;
  out.per_step.reserve(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    StepTerms terms;
    try {
      terms = loglik_step_terms(sigmas[i], sigmas[i + 1], es[i], config, q);
    } catch (const Error& e) {
      rethrow_at_step(e, static_cast<long>(i + 1));
    }
    out.quad_term += terms.quad;
    out.chol_logdet_term += terms.chol_logdet;
    out.lt_term += terms.lt;
    out.sigma_logdet_term += terms.sigma_logdet;
    out.per_step.push_back(c_share + terms.quad + terms.chol_logdet + terms.lt +
                           terms.sigma_logdet);
  }
  out.total = out.constant_c + out.quad_term + out.chol_logdet_term + out.lt_term +
              out.sigma_logdet_term;
  return out;
}

LikelihoodBreakdown loglik_at_filter_path(const Matrix& ys, const ModelConfig& config) {
  FilterRun run = filter_run(ys, config, true);
  if (!run.likelihood) throw *run.likelihood_failure;
  return std::move(*run.likelihood);
}

PerfReport perf_metrics(const std::vector<StepRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::kEmptyInput, "no records to summarize");
  const Eigen::Index p = records.front().e.size();
  PerfReport r;
  r.mse = Vector::Zero(p);
  r.msse = Vector::Zero(p);
  r.mad = Vector::Zero(p);
  r.me = Vector::Zero(p);
  for (const StepRecord& rec : records) {
    require_dim(rec.e.size(), p, "e_t");
    r.mse += rec.e.cwiseAbs2();
    r.msse += rec.u.cwiseAbs2();
    r.mad += rec.e.cwiseAbs();
    r.me += rec.e;
  }
  const double n = static_cast<double>(records.size());
  r.mse /= n;
  r.msse /= n;
  r.mad /= n;
  r.me /= n;
  r.n_obs = static_cast<long>(records.size());
  return r;
}

}  // namespace giwvol
