#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "giwvol/likelihood.hpp"
#include "giwvol/model_config.hpp"
#include "giwvol/model_search.hpp"
#include "giwvol/vol_filter.hpp"

namespace giwvol {

struct LoadOptions {
  /// Prices (log-differenced on load) when true, returns taken as-is otherwise.
  bool levels = true;
  double scale = 1.0;
};

struct ReturnsTable {
  std::vector<std::string> columns;
  /// Empty when the file has no leading date column.
  std::vector<std::string> times;
  Matrix values;  // N x p

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Parses CSV text with a header row. A leading column whose first data
/// cell is not numeric is taken as the date column. Errors carry the
/// 1-based line number of the offending row.
ReturnsTable parse_prices_csv(std::string_view text, const LoadOptions& options);
ReturnsTable load_prices_csv(const std::filesystem::path& path, const LoadOptions& options);

/// Everything read from a config file. Model fields that depend on p (m0,
/// S0) default to zero and the identity in `model`.
struct RunConfig {
  double delta = 0.7;
  double phi = 1.0;
  std::optional<Vector> omega_diag;
  std::optional<Matrix> omega_matrix;
  std::optional<Vector> m0;
  double p0 = 1000.0;
  std::optional<Matrix> s0;
  int q = 2;
  std::vector<double> delta_candidates{0.70, 0.75, 0.80, 0.85};
  std::uint64_t seed = 0;
  ForecastMeanMode forecast_mean_mode = ForecastMeanMode::kPaperVerbatim;
  StandardizationMode standardization_mode = StandardizationMode::kForecastCov;

  Eigen::Index dim() const;
  /// Validated ModelConfig; throws kValidation on any inconsistency.
  ModelConfig model() const;
  SearchSpec search_spec(int jobs) const;
};

/// Accepted keys: delta, phi, omega_diag | omega_matrix, m0, p0, s0, q,
/// delta_candidates, seed, modes. Anything else is rejected.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON of the parsed config (used in the run manifest).
std::string config_echo_json(const RunConfig& config);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double x);

/// Row-major lower triangle: (1,1), (2,1), (2,2), (3,1), ...
std::vector<double> vech_lower(const Matrix& m);
/// Correlation matrix with exact unit diagonal and entries clamped to [-1, 1].
Matrix correlation(const Matrix& cov);

std::string volatility_csv(const std::vector<StepRecord>& records,
                           const std::vector<std::string>& times);
std::string forecast_csv(const std::vector<StepRecord>& records,
                         const std::vector<std::string>& times);
std::string returns_csv(const Matrix& ys, const std::vector<std::string>& columns);
std::string search_trace_csv(const std::vector<TraceEntry>& trace, Eigen::Index p);

/// Minimal deterministic JSON emitter; numbers use format_double (non-finite
/// numbers become null).
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double x);
  JsonWriter& value(long x);
  JsonWriter& value(std::uint64_t x);
  JsonWriter& value(int x) { return value(static_cast<long>(x)); }
  JsonWriter& value(bool b);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& null();
  JsonWriter& vector(const Vector& v);
  JsonWriter& matrix(const Matrix& m);
  /// Splices pre-rendered JSON as one value.
  JsonWriter& raw(std::string_view json);

  std::string str() const { return out_ + "\n"; }

 private:
  void before_value();
  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

}  // namespace giwvol
