#include "giwvol/giwvol.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "giwvol/cli_io.hpp"
#include "giwvol/commands.hpp"
#include "giwvol/likelihood.hpp"
#include "giwvol/model_search.hpp"
#include "giwvol/simulator.hpp"
#include "giwvol/vol_filter.hpp"

struct giwvol_config {
  giwvol::ModelConfig model;
  std::uint64_t seed = 0;
};

struct giwvol_series {
  giwvol::Matrix values;
};

struct giwvol_filter_result {
  giwvol::FilterRun run;
  giwvol::PerfReport perf;
};

struct giwvol_search_result {
  giwvol::SearchResult result;
};

namespace {

using giwvol::Error;
using giwvol::ErrorKind;
using giwvol::Matrix;
using giwvol::Vector;

struct LastError {
  std::string message;
  giwvol_error_kind kind = GIWVOL_KIND_NONE;
  long step = -1;
};

thread_local LastError g_last;

giwvol_error_kind to_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::kNotPositiveDefinite: return GIWVOL_KIND_NOT_POSITIVE_DEFINITE;
    case ErrorKind::kDomain: return GIWVOL_KIND_DOMAIN;
    case ErrorKind::kDimensionMismatch: return GIWVOL_KIND_DIMENSION_MISMATCH;
    case ErrorKind::kRankMismatch: return GIWVOL_KIND_RANK_MISMATCH;
    case ErrorKind::kParse: return GIWVOL_KIND_PARSE;
    case ErrorKind::kNonPositivePrice: return GIWVOL_KIND_NON_POSITIVE_PRICE;
    case ErrorKind::kEmptyInput: return GIWVOL_KIND_EMPTY_INPUT;
    case ErrorKind::kValidation: return GIWVOL_KIND_VALIDATION;
    case ErrorKind::kNumerical: return GIWVOL_KIND_NUMERICAL;
    case ErrorKind::kIo: return GIWVOL_KIND_IO;
  }
  return GIWVOL_KIND_INTERNAL;
}

giwvol_status fail(const Error& e) {
  g_last.message = e.what();
  g_last.kind = to_kind(e.kind());
  g_last.step = e.step().value_or(-1);
  return static_cast<giwvol_status>(giwvol::exit_code_for(e.kind()));
}

giwvol_status fail_internal(const char* what) {
  g_last.message = what;
  g_last.kind = GIWVOL_KIND_INTERNAL;
  g_last.step = -1;
  return GIWVOL_ERR_INTERNAL;
}

template <typename F>
giwvol_status guarded(F&& f) {
  try {
    f();
    g_last = LastError{};
    return GIWVOL_OK;
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::bad_alloc&) {
    return fail_internal("out of memory");
  } catch (const std::exception& e) {
    return fail_internal(e.what());
  } catch (...) {
    return fail_internal("unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::kValidation, what);
}

Matrix square_from(const double* data, Eigen::Index p) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data, p, p);
}

giwvol::SymPosDefMatrix pd_argument(const Matrix& m, const char* name) {
  try {
    return giwvol::SymPosDefMatrix::checked(m);
  } catch (const Error&) {
    throw Error(ErrorKind::kValidation, std::string(name) + " must be symmetric positive definite");
  }
}

void copy_out(const Vector& v, double* out) {
  Eigen::Map<Vector>(out, v.size()) = v;
}

const giwvol::StepRecord& record_at(const giwvol_filter_result* r, size_t t) {
  require(r != nullptr, "result handle is null");
  require(t >= 1 && t <= r->run.records.size(), "time index out of range");
  return r->run.records[t - 1];
}

// Applies `edit` to a copy of the model and commits it only if it validates.
template <typename F>
giwvol_status edit_config(giwvol_config* cfg, F&& edit) {
  return guarded([&] {
    require(cfg != nullptr, "config handle is null");
    giwvol::ModelConfig next = cfg->model;
    edit(next);
    next.validate();
    cfg->model = std::move(next);
  });
}

}  // namespace

extern "C" {

const char* giwvol_version(void) { return GIWVOL_VERSION_STRING; }

const char* giwvol_last_error(void) { return g_last.message.c_str(); }

giwvol_error_kind giwvol_last_error_kind(void) { return g_last.kind; }

long giwvol_last_error_step(void) { return g_last.step; }

giwvol_status giwvol_config_create(size_t p, double delta, double phi, const double* omega_diag,
                                   giwvol_config** out) {
  return guarded([&] {
    require(out != nullptr && omega_diag != nullptr, "null argument");
    require(p >= 1, "dimension must be positive");
    const Vector w = Eigen::Map<const Vector>(omega_diag, static_cast<Eigen::Index>(p));
    require(w.allFinite() && (w.array() > 0.0).all(), "omega_diag entries must be positive");
    auto cfg = std::make_unique<giwvol_config>();
    cfg->model = giwvol::ModelConfig::with_defaults(
        delta, phi, giwvol::SymPosDefMatrix::trusted(w.asDiagonal()));
    cfg->model.validate();
    *out = cfg.release();
  });
}

giwvol_status giwvol_config_load(const char* json_path, giwvol_config** out) {
  return guarded([&] {
    require(out != nullptr && json_path != nullptr, "null argument");
    const giwvol::RunConfig run = giwvol::load_run_config(json_path);
    auto cfg = std::make_unique<giwvol_config>();
    cfg->model = run.model();
    cfg->seed = run.seed;
    *out = cfg.release();
  });
}

giwvol_status giwvol_config_set_omega(giwvol_config* cfg, const double* omega) {
  return edit_config(cfg, [&](giwvol::ModelConfig& m) {
    require(omega != nullptr, "null argument");
    m.omega = pd_argument(square_from(omega, m.dim()), "omega");
  });
}

giwvol_status giwvol_config_set_m0(giwvol_config* cfg, const double* m0) {
  return edit_config(cfg, [&](giwvol::ModelConfig& m) {
    require(m0 != nullptr, "null argument");
    m.m0 = Eigen::Map<const Vector>(m0, m.dim());
  });
}

giwvol_status giwvol_config_set_p0(giwvol_config* cfg, double p0) {
  return edit_config(cfg, [&](giwvol::ModelConfig& m) { m.p0 = p0; });
}

giwvol_status giwvol_config_set_s0(giwvol_config* cfg, const double* s0) {
  return edit_config(cfg, [&](giwvol::ModelConfig& m) {
    require(s0 != nullptr, "null argument");
    m.s0 = pd_argument(square_from(s0, m.dim()), "s0");
  });
}

giwvol_status giwvol_config_set_modes(giwvol_config* cfg, int phi_scaled_mean,
                                      int posterior_standardization) {
  return edit_config(cfg, [&](giwvol::ModelConfig& m) {
    m.forecast_mean_mode = phi_scaled_mean ? giwvol::ForecastMeanMode::kPhiScaled
                                           : giwvol::ForecastMeanMode::kPaperVerbatim;
    m.standardization_mode = posterior_standardization
                                 ? giwvol::StandardizationMode::kPaperVerbatimSt
                                 : giwvol::StandardizationMode::kForecastCov;
  });
}

size_t giwvol_config_dim(const giwvol_config* cfg) {
  return cfg ? static_cast<size_t>(cfg->model.dim()) : 0;
}

uint64_t giwvol_config_seed(const giwvol_config* cfg) { return cfg ? cfg->seed : 0; }

void giwvol_config_free(giwvol_config* cfg) { delete cfg; }

giwvol_status giwvol_series_create(size_t n, size_t p, const double* values,
                                   giwvol_series** out) {
  return guarded([&] {
    require(out != nullptr && values != nullptr, "null argument");
    require(n >= 1 && p >= 1, "series must be non-empty");
    auto s = std::make_unique<giwvol_series>();
    s->values =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            values, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    *out = s.release();
  });
}

giwvol_status giwvol_series_load_csv(const char* path, int levels, double scale,
                                     giwvol_series** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "null argument");
    auto s = std::make_unique<giwvol_series>();
    s->values = giwvol::load_prices_csv(path, giwvol::LoadOptions{levels != 0, scale}).values;
    *out = s.release();
  });
}

size_t giwvol_series_rows(const giwvol_series* s) {
  return s ? static_cast<size_t>(s->values.rows()) : 0;
}

size_t giwvol_series_cols(const giwvol_series* s) {
  return s ? static_cast<size_t>(s->values.cols()) : 0;
}

giwvol_status giwvol_series_values(const giwvol_series* s, double* out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out, s->values.rows(), s->values.cols()) = s->values;
  });
}

void giwvol_series_free(giwvol_series* s) { delete s; }

giwvol_status giwvol_simulate(const giwvol_config* cfg, uint64_t seed, size_t n,
                              giwvol_series** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    require(n >= 1, "simulation length must be positive");
    const giwvol::SimPath path =
        giwvol::simulate_path(seed, giwvol::SimConfig::from(cfg->model), cfg->model.s0,
                              cfg->model.m0, static_cast<long>(n));
    auto s = std::make_unique<giwvol_series>();
    s->values = path.ys;
    *out = s.release();
  });
}

giwvol_status giwvol_filter_run(const giwvol_config* cfg, const giwvol_series* ys,
                                int with_likelihood, giwvol_filter_result** out) {
  return guarded([&] {
    require(cfg != nullptr && ys != nullptr && out != nullptr, "null argument");
    auto r = std::make_unique<giwvol_filter_result>();
    r->run = giwvol::filter_run(ys->values, cfg->model, with_likelihood != 0);
    r->perf = giwvol::perf_metrics(r->run.records);
    *out = r.release();
  });
}

size_t giwvol_filter_steps(const giwvol_filter_result* r) {
  return r ? r->run.records.size() : 0;
}

giwvol_status giwvol_filter_volatility(const giwvol_filter_result* r, size_t t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const Matrix& s = record_at(r, t).S_star.matrix();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out, s.rows(), s.cols()) = s;
  });
}

giwvol_status giwvol_filter_forecast_mean(const giwvol_filter_result* r, size_t t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    copy_out(record_at(r, t).forecast.location, out);
  });
}

giwvol_status giwvol_filter_error(const giwvol_filter_result* r, size_t t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    copy_out(record_at(r, t).e, out);
  });
}

giwvol_status giwvol_filter_standardized_error(const giwvol_filter_result* r, size_t t,
                                               double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    copy_out(record_at(r, t).u, out);
  });
}

giwvol_status giwvol_filter_loglik(const giwvol_filter_result* r, double* out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null argument");
    if (r->run.likelihood_failure) throw *r->run.likelihood_failure;
    require(r->run.likelihood.has_value(), "likelihood was not requested for this run");
    *out = r->run.likelihood->total;
  });
}

giwvol_status giwvol_filter_metrics(const giwvol_filter_result* r, double* mse, double* msse,
                                    double* mad, double* me) {
  return guarded([&] {
    require(r != nullptr, "null argument");
    if (mse) copy_out(r->perf.mse, mse);
    if (msse) copy_out(r->perf.msse, msse);
    if (mad) copy_out(r->perf.mad, mad);
    if (me) copy_out(r->perf.me, me);
  });
}

void giwvol_filter_free(giwvol_filter_result* r) { delete r; }

giwvol_status giwvol_search_run(const giwvol_config* base, const giwvol_series* ys, int q,
                                const double* delta_candidates, size_t n_candidates, int jobs,
                                giwvol_search_result** out) {
  return guarded([&] {
    require(base != nullptr && ys != nullptr && out != nullptr, "null argument");
    giwvol::SearchSpec spec;
    spec.q = q;
    spec.jobs = jobs;
    if (n_candidates > 0) {
      require(delta_candidates != nullptr, "null argument");
      spec.delta_candidates.assign(delta_candidates, delta_candidates + n_candidates);
    }
    auto r = std::make_unique<giwvol_search_result>();
    r->result = giwvol::coordinate_search(ys->values, base->model, spec);
    *out = r.release();
  });
}

giwvol_status giwvol_search_best(const giwvol_search_result* r, double* z, double* delta,
                                 double* objective) {
  return guarded([&] {
    require(r != nullptr, "null argument");
    if (z) copy_out(r->result.z, z);
    if (delta) *delta = r->result.delta;
    if (objective) *objective = r->result.objective;
  });
}

void giwvol_search_free(giwvol_search_result* r) { delete r; }

void giwvol_command_options_init(giwvol_command_options* options) {
  if (!options) return;
  *options = giwvol_command_options{};
  options->jobs = 1;
  options->levels = 1;
  options->scale = 1.0;
  options->steps = 500;
}

giwvol_status giwvol_run_command(giwvol_command command, const giwvol_command_options* options) {
  return guarded([&] {
    require(options != nullptr, "null argument");
    giwvol::CommandOptions o;
    if (options->config_path) o.config = options->config_path;
    if (options->input_path) o.input = options->input_path;
    if (options->out_dir) o.out = options->out_dir;
    if (options->has_seed) o.seed = options->seed;
    o.jobs = options->jobs;
    o.levels = options->levels != 0;
    o.scale = options->scale;
    o.steps = options->steps;
    o.timing = options->timing != 0;
    switch (command) {
      case GIWVOL_CMD_FILTER: giwvol::run_filter_cmd(o); return;
      case GIWVOL_CMD_SIMULATE: giwvol::run_simulate_cmd(o); return;
      case GIWVOL_CMD_LOGLIK: giwvol::run_loglik_cmd(o); return;
      case GIWVOL_CMD_SEARCH: giwvol::run_search_cmd(o); return;
      case GIWVOL_CMD_METRICS: giwvol::run_metrics_cmd(o); return;
    }
    throw Error(ErrorKind::kValidation, "unknown command");
  });
}

}  // extern "C"
