#include "giwvol/commands.hpp"

#include <chrono>

#include "giwvol/cli_io.hpp"
#include "giwvol/likelihood.hpp"
#include "giwvol/model_search.hpp"
#include "giwvol/simulator.hpp"
#include "giwvol/vol_filter.hpp"

namespace giwvol {

namespace {

using Clock = std::chrono::steady_clock;

struct Inputs {
  RunConfig run;
  ModelConfig model;
  ReturnsTable data;
  std::string digest;
};

RunConfig read_config(const CommandOptions& o) {
  if (o.config.empty()) throw Error(ErrorKind::kValidation, "--config is required");
  RunConfig c = load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

ReturnsTable read_data(const CommandOptions& o, std::string& digest) {
  if (o.input.empty()) throw Error(ErrorKind::kValidation, "--input is required");
  const std::string text = read_file(o.input);
  digest = sha256_hex(text);
  return parse_prices_csv(text, LoadOptions{o.levels, o.scale});
}

Inputs read_inputs(const CommandOptions& o) {
  Inputs in;
  in.run = read_config(o);
  in.data = read_data(o, in.digest);
  in.model = in.run.model();
  if (in.data.cols() != in.model.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "input has " + std::to_string(in.data.cols()) + " series but the config has p = " +
                    std::to_string(in.model.dim()));
  }
  return in;
}

void prepare_out(const CommandOptions& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + o.out.string() + "': " + ec.message());
}

void write_manifest(JsonWriter& w, const CommandOptions& o, const RunConfig& run,
                    const std::string& digest, Clock::time_point start) {
  w.key("manifest").begin_object();
  w.key("config").raw(config_echo_json(run));
  w.key("input_sha256");
  if (digest.empty()) {
    w.null();
  } else {
    w.value(digest);
  }
  w.key("levels").value(o.levels);
  w.key("scale").value(o.scale);
  w.key("seed").value(run.seed);
  w.key("version").value(GIWVOL_VERSION_STRING);
  if (o.timing) {
    w.key("elapsed_seconds")
        .value(std::chrono::duration<double>(Clock::now() - start).count());
  }
  w.end_object();
}

void write_performance(JsonWriter& w, const PerfReport& r) {
  w.key("performance").begin_object();
  w.key("mse").vector(r.mse);
  w.key("msse").vector(r.msse);
  w.key("mad").vector(r.mad);
  w.key("me").vector(r.me);
  w.key("n_obs").value(r.n_obs);
  w.end_object();
}

void write_likelihood(JsonWriter& w, const LikelihoodBreakdown& b) {
  w.key("likelihood").begin_object();
  w.key("total").value(b.total);
  w.key("constant_c").value(b.constant_c);
  w.key("quad_term").value(b.quad_term);
  w.key("chol_logdet_term").value(b.chol_logdet_term);
  w.key("lt_term").value(b.lt_term);
  w.key("sigma_logdet_term").value(b.sigma_logdet_term);
  w.end_object();
}

void write_header(JsonWriter& w, const char* command, const Inputs& in) {
  w.key("command").value(command);
  w.key("dim").value(static_cast<long>(in.data.cols()));
  w.key("n_obs").value(static_cast<long>(in.data.rows()));
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotPositiveDefinite:
    case ErrorKind::kDomain:
    case ErrorKind::kRankMismatch:
    case ErrorKind::kNumerical:
      return 3;
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kParse:
    case ErrorKind::kNonPositivePrice:
    case ErrorKind::kEmptyInput:
    case ErrorKind::kValidation:
    case ErrorKind::kIo:
      return 2;
  }
  return 3;
}

void run_filter_cmd(const CommandOptions& o) {
  const auto start = Clock::now();
  const Inputs in = read_inputs(o);
  prepare_out(o);
  const FilterRun run = filter_run(in.data.values, in.model, true);
  const PerfReport perf = perf_metrics(run.records);

  JsonWriter w;
  w.begin_object();
  write_header(w, "filter", in);
  write_performance(w, perf);
  if (run.likelihood) {
    write_likelihood(w, *run.likelihood);
  } else {
    w.key("likelihood").null();
    w.key("likelihood_error").value(run.likelihood_failure->what());
  }
  w.key("Q").matrix(run.Q.matrix());
  write_manifest(w, o, in.run, in.digest, start);
  w.end_object();

  write_file(o.out / "volatility.csv", volatility_csv(run.records, in.data.times));
  write_file(o.out / "forecast.csv", forecast_csv(run.records, in.data.times));
  write_file(o.out / "report.json", w.str());
}

void run_loglik_cmd(const CommandOptions& o) {
  const auto start = Clock::now();
  const Inputs in = read_inputs(o);
  prepare_out(o);
  const LikelihoodBreakdown b = loglik_at_filter_path(in.data.values, in.model);

  JsonWriter w;
  w.begin_object();
  write_header(w, "loglik", in);
  write_likelihood(w, b);
  write_manifest(w, o, in.run, in.digest, start);
  w.end_object();
  write_file(o.out / "report.json", w.str());
}

void run_metrics_cmd(const CommandOptions& o) {
  const auto start = Clock::now();
  const Inputs in = read_inputs(o);
  prepare_out(o);
  const FilterRun run = filter_run(in.data.values, in.model, false);

  JsonWriter w;
  w.begin_object();
  write_header(w, "metrics", in);
  write_performance(w, perf_metrics(run.records));
  write_manifest(w, o, in.run, in.digest, start);
  w.end_object();
  write_file(o.out / "report.json", w.str());
}

void run_search_cmd(const CommandOptions& o) {
  const auto start = Clock::now();
  Inputs in;
  in.run = read_config(o);
  in.data = read_data(o, in.digest);
  const SearchSpec spec = in.run.search_spec(o.jobs);
  RunConfig base = in.run;
  if (!base.omega_diag && !base.omega_matrix) {
    // Omega only fixes the dimension here; the search replaces it.
    base.omega_diag = Vector::Ones(in.data.cols());
  }
  in.model = base.model();
  if (in.data.cols() != in.model.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "input has " + std::to_string(in.data.cols()) + " series but the config has p = " +
                    std::to_string(in.model.dim()));
  }
  prepare_out(o);
  const SearchResult r = coordinate_search(in.data.values, in.model, spec);

  JsonWriter w;
  w.begin_object();
  write_header(w, "search", in);
  w.key("best").begin_object();
  w.key("delta").value(r.delta);
  w.key("z").vector(r.z);
  w.key("omega_diag").vector(z_to_omega(r.z).matrix().diagonal());
  w.key("objective").value(r.objective);
  w.end_object();
  w.key("accepted_path").begin_array();
  for (const auto& path : r.accepted_path) {
    w.begin_array();
    for (double v : path) w.value(v);
    w.end_array();
  }
  w.end_array();
  write_manifest(w, o, in.run, in.digest, start);
  w.end_object();

  write_file(o.out / "search_trace.csv", search_trace_csv(r.trace, in.data.cols()));
  write_file(o.out / "report.json", w.str());
}

void run_simulate_cmd(const CommandOptions& o) {
  const auto start = Clock::now();
  const RunConfig run = read_config(o);
  const ModelConfig model = run.model();
  if (o.steps < 1) throw Error(ErrorKind::kValidation, "--steps must be positive");
  prepare_out(o);
  const SimPath path =
      simulate_path(run.seed, SimConfig::from(model), model.s0, model.m0, o.steps);

  const Eigen::Index p = model.dim();
  std::vector<std::string> columns;
  for (Eigen::Index j = 1; j <= p; ++j) columns.push_back("y_" + std::to_string(j));

  std::string states = "t";
  for (Eigen::Index j = 1; j <= p; ++j) states += ",theta_" + std::to_string(j);
  for (Eigen::Index i = 1; i <= p; ++i) {
    for (Eigen::Index j = 1; j <= i; ++j) {
      states += ",sigma_" + std::to_string(i) + '_' + std::to_string(j);
    }
  }
  states += '\n';
  for (Eigen::Index t = 0; t < path.ys.rows(); ++t) {
    states += std::to_string(t + 1);
    for (Eigen::Index j = 0; j < p; ++j) states += ',' + format_double(path.thetas(t, j));
    for (double v : vech_lower(path.sigmas[static_cast<std::size_t>(t + 1)].matrix())) {
      states += ',' + format_double(v);
    }
    states += '\n';
  }

  JsonWriter w;
  w.begin_object();
  w.key("command").value("simulate");
  w.key("dim").value(static_cast<long>(p));
  w.key("n_obs").value(static_cast<long>(path.ys.rows()));
  write_manifest(w, o, run, "", start);
  w.end_object();

  write_file(o.out / "simulated.csv", returns_csv(path.ys, columns));
  write_file(o.out / "states.csv", states);
  write_file(o.out / "report.json", w.str());
}

}  // namespace giwvol
