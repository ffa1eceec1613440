#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "giwvol/errors.hpp"

namespace giwvol {

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path input;
  std::filesystem::path out = ".";
  /// Overrides the config seed when set.
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool levels = true;
  double scale = 1.0;
  /// Length of a simulated path.
  long steps = 500;
  /// Adds wall-clock timing to the manifest (breaks byte-identical reruns).
  bool timing = false;
};

/// 0 success, 2 validation / input problems, 3 numerical failure.
int exit_code_for(ErrorKind kind);

// Each command writes its files into options.out (created if missing) and
// throws Error on failure.
void run_filter_cmd(const CommandOptions& options);
void run_simulate_cmd(const CommandOptions& options);
void run_loglik_cmd(const CommandOptions& options);
void run_search_cmd(const CommandOptions& options);
void run_metrics_cmd(const CommandOptions& options);

}  // namespace giwvol
