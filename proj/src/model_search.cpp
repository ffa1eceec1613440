#include "giwvol/model_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "giwvol/likelihood.hpp"
#include "giwvol/vol_filter.hpp"

namespace giwvol {

namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

struct Evaluation {
  double value = kFailed;
  bool failed = true;
};

std::vector<Evaluation> evaluate_all(const Matrix& ys, const ModelConfig& base, double delta,
                                     const std::vector<Vector>& candidates,
                                     SearchObjective objective, int jobs) {
  std::vector<Evaluation> out(candidates.size());
  auto run_one = [&](std::size_t i) {
    try {
      ModelConfig c = base;
      c.delta = delta;
      c.omega = z_to_omega(candidates[i]);
      out[i].value = search_objective(ys, c, objective);
      out[i].failed = !std::isfinite(out[i].value);
      if (out[i].failed) out[i].value = kFailed;
    } catch (const Error&) {
      out[i] = Evaluation{};
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), candidates.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < candidates.size(); i = next++) run_one(i);
    });
  }
  pool.clear();
  return out;
}

}  // namespace

void SearchSpec::validate() const {
  if (q < 1 || q > 6) throw Error(ErrorKind::kValidation, "grid resolution q must be in 1..6");
  if (delta_candidates.empty()) {
    throw Error(ErrorKind::kValidation, "delta_candidates must not be empty");
  }
  for (double d : delta_candidates) {
    if (!(d > 2.0 / 3.0 && d < 1.0)) {
      throw Error(ErrorKind::kValidation,
                  "every delta candidate must satisfy 2/3 < delta < 1, got " + std::to_string(d));
    }
  }
  if (max_sweeps < 1) throw Error(ErrorKind::kValidation, "max_sweeps must be positive");
  if (jobs < 1) throw Error(ErrorKind::kValidation, "jobs must be positive");
}

std::vector<double> z_grid(int q) {
  if (q < 1) throw Error(ErrorKind::kDomain, "grid resolution q must be positive");
  const long denom = static_cast<long>(std::llround(std::pow(10.0, q)));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(denom - 1));
  for (long i = 1; i < denom; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(denom));
  return grid;
}

SymPosDefMatrix z_to_omega(const Vector& z) {
  if (z.size() == 0) throw Error(ErrorKind::kDomain, "z must not be empty");
  Vector w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(z(i) > 0.0 && z(i) < 1.0)) {
      throw Error(ErrorKind::kDomain, "z entries must lie in (0, 1)");
    }
    w(i) = z(i) / (1.0 - z(i));
  }
  return SymPosDefMatrix::trusted(w.asDiagonal());
}

Vector omega_to_z(const SymPosDefMatrix& omega) {
  const Vector w = omega.matrix().diagonal();
  return w.array() / (1.0 + w.array());
}

double search_objective(const Matrix& ys, const ModelConfig& config, SearchObjective objective) {
  if (objective == SearchObjective::kLoglik) return loglik_at_filter_path(ys, config).total;
  const FilterRun run = filter_run(ys, config, false);
  const PerfReport report = perf_metrics(run.records);
  return -(report.msse.array() - 1.0).square().sum();
}

SearchResult coordinate_search(const Matrix& ys, const ModelConfig& base_config,
                               const SearchSpec& spec) {
  spec.validate();
  const Eigen::Index p = ys.cols();
  if (p < 1) throw Error(ErrorKind::kValidation, "search needs at least one series");
  if (ys.rows() < 10 * p) {
    throw Error(ErrorKind::kValidation, "search needs N >= 10 p observations, got " +
                                            std::to_string(ys.rows()));
  }
  if (spec.exhaustive && p > 2) {
    throw Error(ErrorKind::kValidation, "exhaustive search is limited to p <= 2");
  }
  const std::vector<double> grid = z_grid(spec.q);
  std::vector<double> deltas = spec.delta_candidates;
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

  SearchResult result;
  result.objective = kFailed;
  bool any_success = false;

  for (double delta : deltas) {
    std::vector<double> accepted;
    Vector z = Vector::Constant(p, 0.5);
    double current = kFailed;

    if (spec.exhaustive) {
      std::vector<Vector> candidates;
      std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
      for (;;) {
        Vector c(p);
        for (Eigen::Index i = 0; i < p; ++i) c(i) = grid[idx[static_cast<std::size_t>(i)]];
        candidates.push_back(c);
        Eigen::Index i = p - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == grid.size()) {
          idx[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
      const auto evals = evaluate_all(ys, base_config, delta, candidates, spec.objective, spec.jobs);
      std::size_t best = candidates.size();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        result.trace.push_back({delta, 1, -1, candidates[i], evals[i].value, evals[i].failed, false});
        if (!evals[i].failed && (best == candidates.size() || evals[i].value > evals[best].value)) {
          best = i;
        }
      }
      if (best != candidates.size()) {
        z = candidates[best];
        current = evals[best].value;
        accepted.push_back(current);
        result.trace[result.trace.size() - candidates.size() + best].accepted = true;
      }
    } else {
      const auto start = evaluate_all(ys, base_config, delta, {z}, spec.objective, 1);
      current = start[0].value;
      result.trace.push_back({delta, 0, -1, z, current, start[0].failed, !start[0].failed});
      if (!start[0].failed) accepted.push_back(current);

      for (int sweep = 1; sweep <= spec.max_sweeps; ++sweep) {
        bool changed = false;
        for (Eigen::Index i = 0; i < p; ++i) {
          std::vector<Vector> candidates;
          candidates.reserve(grid.size());
          for (double g : grid) {
            Vector c = z;
            c(i) = g;
            candidates.push_back(std::move(c));
          }
          const auto evals =
              evaluate_all(ys, base_config, delta, candidates, spec.objective, spec.jobs);
          std::size_t best = candidates.size();
          for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (!evals[j].failed && (best == candidates.size() || evals[j].value > evals[best].value)) {
              best = j;
            }
          }
          const std::size_t first = result.trace.size();
          for (std::size_t j = 0; j < candidates.size(); ++j) {
            result.trace.push_back({delta, sweep, static_cast<int>(i), candidates[j],
                                    evals[j].value, evals[j].failed, false});
          }
          if (best != candidates.size() && evals[best].value > current) {
            z = candidates[best];
            current = evals[best].value;
            accepted.push_back(current);
            result.trace[first + best].accepted = true;
            changed = true;
          }
        }
        if (!changed) break;
      }
    }

    result.accepted_path.push_back(accepted);
    if (current != kFailed) {
      any_success = true;
      if (current > result.objective) {
        result.objective = current;
        result.z = z;
        result.delta = delta;
      }
    }
  }
  if (!any_success) {
    throw Error(ErrorKind::kNumerical, "every search candidate failed");
  }
  return result;
}

}  // namespace giwvol
