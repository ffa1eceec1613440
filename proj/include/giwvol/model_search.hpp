#pragma once

#include <vector>

#include "giwvol/model_config.hpp"

namespace giwvol {

enum class SearchObjective {
  kLoglik,        // plug-in log-likelihood (maximized)
  kMsseDistance,  // -sum_j (MSSE_j - 1)^2 (maximized)
};

struct SearchSpec {
  int q = 2;
  std::vector<double> delta_candidates{0.70, 0.75, 0.80, 0.85};
  int max_sweeps = 20;
  SearchObjective objective = SearchObjective::kLoglik;
  /// Full product grid instead of coordinate ascent; only for p <= 2.
  bool exhaustive = false;
  /// Worker threads for the evaluations of one coordinate's grid.
  int jobs = 1;

  void validate() const;
};

/// Grid z_i = 1/10^q, ..., (10^q - 1)/10^q, ascending.
std::vector<double> z_grid(int q);

/// Diagonal Omega with w_i = z_i / (1 - z_i); needs 0 < z_i < 1.
SymPosDefMatrix z_to_omega(const Vector& z);

/// w_i / (1 + w_i) of the diagonal of Omega.
Vector omega_to_z(const SymPosDefMatrix& omega);

struct TraceEntry {
  double delta = 0.0;
  int sweep = 0;       // 0 for the starting point
  int coordinate = -1;  // -1 for the starting point / exhaustive mode
  Vector z;
  double objective = 0.0;
  bool failed = false;
  bool accepted = false;
};

struct SearchResult {
  Vector z;
  double delta = 0.0;
  double objective = 0.0;
  /// Objective after each accepted move, per delta candidate in sorted order.
  std::vector<std::vector<double>> accepted_path;
  std::vector<TraceEntry> trace;
};

/// Objective value of one candidate (throws what the filter throws).
double search_objective(const Matrix& ys, const ModelConfig& config, SearchObjective objective);

/**
 * Coordinate ascent over the z-grid for each delta candidate, starting at
 * z = 0.5 (Omega = I).
 *
 * Each coordinate is scanned over the full grid with the others held; the
 * argmax (ties to the smaller z) replaces the current value when it strictly
 * improves the objective. Sweeps repeat until none changes or max_sweeps.
 * The best (delta, z) over all candidates wins; equal objectives prefer the
 * smaller delta. Failed candidates are recorded in the trace and skipped.
 */
SearchResult coordinate_search(const Matrix& ys, const ModelConfig& base_config,
                               const SearchSpec& spec);

}  // namespace giwvol
