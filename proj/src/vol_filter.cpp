#include "giwvol/vol_filter.hpp"

#include <cmath>
#include <string>

#include "giwvol/gwishart.hpp"

namespace giwvol {

double discount_k(double delta, int p) {
  if (!(delta > 2.0 / 3.0 && delta < 1.0)) {
    throw Error(ErrorKind::kDomain, "discount factor must satisfy 2/3 < delta < 1");
  }
  if (p < 1) throw Error(ErrorKind::kDomain, "dimension must be positive");
  return (delta * (1.0 - p) + p) / (delta * (2.0 - p) + p - 1.0);
}

double beta_dof_m(double delta, int p) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::kDomain, "discount factor must satisfy 0 < delta < 1");
  }
  if (p < 1) throw Error(ErrorKind::kDomain, "dimension must be positive");
  return delta / (1.0 - delta) + p - 1.0;
}

double posterior_df(double delta, int p) { return 1.0 / (1.0 - delta) + 2.0 * p; }

SymPosDefMatrix limit_P(double phi, const SymPosDefMatrix& omega) {
  const double phi2 = phi * phi;
  const Matrix p = spectral_map(omega.matrix(), [phi2](double w) {
    if (!(w > 0.0)) {
      throw Error(ErrorKind::kNotPositiveDefinite, "Omega must be positive definite");
    }
    const double b = w + 1.0 - phi2;
    return 2.0 * w / (b + std::sqrt(b * b + 4.0 * phi2 * w));
  });
  return SymPosDefMatrix::trusted(p);
}

SymPosDefMatrix next_P(double phi, const SymPosDefMatrix& omega, const SymPosDefMatrix& p_prev) {
  const Eigen::Index p = omega.dim();
  const Matrix r_plus_i =
      phi * phi * p_prev.matrix() + omega.matrix() + Matrix::Identity(p, p);
  // R (R + I)^{-1} = I - (R + I)^{-1}
  const Matrix inv = inverse(SymPosDefMatrix::trusted(r_plus_i)).matrix();
  return SymPosDefMatrix::trusted(Matrix::Identity(p, p) - inv);
}

SymPosDefMatrix iterate_P_to_convergence(double phi, const SymPosDefMatrix& omega, double p0,
                                         int max_iter, double tol) {
  if (!(p0 > 0.0)) throw Error(ErrorKind::kDomain, "p0 must be positive");
  SymPosDefMatrix p = SymPosDefMatrix::scaled_identity(omega.dim(), p0);
  for (int i = 0; i < max_iter; ++i) {
    SymPosDefMatrix next = next_P(phi, omega, p);
    const double change = (next.matrix() - p.matrix()).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (change < tol) return p;
  }
  throw Error(ErrorKind::kNumerical, "P recursion did not converge in " +
                                         std::to_string(max_iter) + " iterations");
}

SymPosDefMatrix steady_Q(const ModelConfig& config) {
  const Eigen::Index p = config.dim();
  return SymPosDefMatrix::trusted(limit_P(config.phi, config.omega).matrix() +
                                  config.omega.matrix() + Matrix::Identity(p, p));
}

FilterContext::FilterContext(const ModelConfig& config)
    : FilterContext(config, (config.validate(), steady_Q(config))) {}

FilterContext::FilterContext(const ModelConfig& config, const SymPosDefMatrix& q)
    : config_(config), q_(q) {
  config_.validate();
  require_dim(q.dim(), config.dim(), "Q");
  const int p = static_cast<int>(config.dim());
  q_inv_ = inverse(q_);
  q_inv_sqrt_ = sym_sqrt(q_inv_);
  k_ = discount_k(config.delta, p);
  n_ = posterior_df(config.delta, p);
}

SymPosDefMatrix FilterContext::point_estimate(const SymPosDefMatrix& s) const {
  return giw_estimator(q_inv_, q_inv_sqrt_, s, sym_sqrt(s), n_);
}

FilterState filter_init(const ModelConfig& config) { return filter_init(FilterContext(config)); }

FilterState filter_init(const FilterContext& ctx) {
  const ModelConfig& c = ctx.config();
  FilterState state;
  state.t = 0;
  state.m = c.m0;
  state.P = SymPosDefMatrix::scaled_identity(c.dim(), c.p0);
  state.S = c.s0;
  state.S_star = ctx.point_estimate(c.s0);
  return state;
}

StepOutput filter_step(const FilterState& state, const Vector& y, const ModelConfig& config,
                       const SymPosDefMatrix& q) {
  return filter_step(state, y, FilterContext(config, q));
}

StepOutput filter_step(const FilterState& state, const Vector& y, const FilterContext& ctx) {
  const ModelConfig& c = ctx.config();
  const Eigen::Index p = c.dim();
  require_dim(y.size(), p, "observation");
  require_dim(state.m.size(), p, "state mean");
  if (!y.allFinite()) throw Error(ErrorKind::kDomain, "observation is not finite");

  const double delta = c.delta;
  const double k = ctx.k();

  const Vector f = c.forecast_mean_mode == ForecastMeanMode::kPhiScaled ? Vector(c.phi * state.m)
                                                                         : state.m;
  const Vector e = y - f;
  const SymPosDefMatrix s_new =
      SymPosDefMatrix::trusted(state.S.matrix() / k + e * e.transpose());
  const SymPosDefMatrix p_new = next_P(c.phi, c.omega, state.P);
  const SymPosDefMatrix s_star = ctx.point_estimate(s_new);

  Eigen::SelfAdjointEigenSolver<Matrix> star_eig(s_star.matrix());
  if (star_eig.info() != Eigen::Success || !(star_eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::kNotPositiveDefinite, "volatility estimate S* is not PD");
  }
  const Matrix& v = star_eig.eigenvectors();
  const Vector root = star_eig.eigenvalues().cwiseSqrt();
  const Matrix star_root = v * root.asDiagonal() * v.transpose();
  const Matrix star_inv_root = v * root.cwiseInverse().asDiagonal() * v.transpose();
  const Matrix gain = star_root * p_new.matrix() * star_inv_root;

  const double cov_factor = (1.0 - delta) / ((3.0 * delta - 2.0) * k);
  const SymPosDefMatrix& s_for_u =
      c.standardization_mode == StandardizationMode::kForecastCov ? state.S : s_new;
  const Matrix whitener =
      sym_inv_sqrt(SymPosDefMatrix::trusted(cov_factor * s_for_u.matrix())).matrix();

  StepOutput out;
  out.state.t = state.t + 1;
  out.state.m = f + gain * e;
  out.state.P = p_new;
  out.state.S = s_new;
  out.state.S_star = s_star;

  StepRecord& r = out.record;
  r.t = out.state.t;
  r.forecast.dof = delta / (1.0 - delta);
  r.forecast.location = f;
  r.forecast.scale = SymPosDefMatrix::trusted(state.S.matrix() / k);
  r.forecast.covariance = SymPosDefMatrix::trusted(cov_factor * state.S.matrix());
  r.e = e;
  r.u = whitener * e;
  r.S_star = s_star;
  return out;
}

FilterRun filter_run(const Matrix& ys, const ModelConfig& config, bool with_likelihood) {
  const FilterContext ctx(config);
  require_dim(ys.cols(), config.dim(), "observation columns");
  FilterRun run;
  run.Q = ctx.Q();
  run.initial_state = filter_init(ctx);
  run.records.reserve(static_cast<std::size_t>(ys.rows()));

  FilterState state = run.initial_state;
  for (Eigen::Index t = 0; t < ys.rows(); ++t) {
    try {
      StepOutput step = filter_step(state, ys.row(t).transpose(), ctx);
      state = std::move(step.state);
      run.records.push_back(std::move(step.record));
    } catch (const Error& e) {
      rethrow_at_step(e, static_cast<long>(t + 1));
    }
  }
  run.final_state = state;

  if (with_likelihood) {
    std::vector<SymPosDefMatrix> sigmas;
    std::vector<Vector> es;
    sigmas.reserve(run.records.size() + 1);
    es.reserve(run.records.size());
    sigmas.push_back(run.initial_state.S_star);
    for (const StepRecord& r : run.records) {
      sigmas.push_back(r.S_star);
      es.push_back(r.e);
    }
    try {
      run.likelihood = loglik_path(sigmas, es, config, ctx.Q());
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        run.records[i].loglik = run.likelihood->per_step[i];
      }
    } catch (const Error& e) {
      run.likelihood_failure = e;
    }
  }
  return run;
}

}  // namespace giwvol
