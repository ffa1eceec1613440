#include "giwvol/cli_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace giwvol {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                           : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

Error parse_error(long line, const std::string& what) {
  return Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

Error config_error(const std::string& what) {
  return Error(ErrorKind::kValidation, "config: " + what);
}

double get_number(const json& j, const char* key) {
  if (!j.is_number()) throw config_error(std::string(key) + " must be a number");
  return j.get<double>();
}

Vector get_vector(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw config_error(std::string(key) + " must be a non-empty array of numbers");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = get_number(j[i], key);
  }
  return v;
}

Matrix get_matrix(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw config_error(std::string(key) + " must be a non-empty array of rows");
  }
  const auto p = static_cast<Eigen::Index>(j.size());
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Vector row = get_vector(j[static_cast<std::size_t>(i)], key);
    if (row.size() != p) throw config_error(std::string(key) + " must be square");
    m.row(i) = row.transpose();
  }
  return m;
}

SymPosDefMatrix pd_or_throw(const Matrix& m, const char* key) {
  try {
    return SymPosDefMatrix::checked(m);
  } catch (const Error&) {
    throw config_error(std::string(key) + " must be symmetric positive definite");
  }
}

const char* mode_name(ForecastMeanMode m) {
  return m == ForecastMeanMode::kPhiScaled ? "phi_scaled" : "paper_verbatim";
}

const char* mode_name(StandardizationMode m) {
  return m == StandardizationMode::kPaperVerbatimSt ? "paper_verbatim_st" : "forecast_cov";
}

void append_row(std::string& out, long t, const std::vector<std::string>& times,
                const std::vector<double>& values) {
  out += std::to_string(t);
  if (!times.empty()) {
    out += ',';
    out += times[static_cast<std::size_t>(t - 1)];
  }
  for (double v : values) {
    out += ',';
    out += format_double(v);
  }
  out += '\n';
}

}  // namespace

ReturnsTable parse_prices_csv(std::string_view text, const LoadOptions& options) {
  if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
    throw Error(ErrorKind::kValidation, "scale must be a positive finite number");
  }
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    const std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl == text.npos ? text.npos : nl - start));
    if (nl == text.npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::kEmptyInput, "input has no header row");

  const std::vector<std::string_view> header = split_fields(lines[0]);
  if (lines.size() < 2) throw Error(ErrorKind::kEmptyInput, "input has no data rows");

  const bool has_dates = !parse_number(split_fields(lines[1]).front()).has_value();
  const std::size_t first_value = has_dates ? 1 : 0;
  if (header.size() <= first_value) throw parse_error(1, "header names no data columns");
  const std::size_t p = header.size() - first_value;

  ReturnsTable table;
  for (std::size_t j = first_value; j < header.size(); ++j) {
    if (header[j].empty()) throw parse_error(1, "empty column name");
    table.columns.emplace_back(header[j]);
  }

  std::vector<std::string> times;
  std::vector<double> raw;
  raw.reserve((lines.size() - 1) * p);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li + 1);
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      throw parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
    }
    if (has_dates) {
      if (fields[0].empty()) throw parse_error(line_no, "missing date");
      times.emplace_back(fields[0]);
    }
    for (std::size_t j = first_value; j < fields.size(); ++j) {
      if (fields[j].empty()) {
        throw parse_error(line_no, "missing value in column '" + std::string(header[j]) + "'");
      }
      const auto v = parse_number(fields[j]);
      if (!v || !std::isfinite(*v)) {
        throw parse_error(line_no, "not a finite number: '" + std::string(fields[j]) + "'");
      }
      if (options.levels && !(*v > 0.0)) {
        throw Error(ErrorKind::kNonPositivePrice,
                    "line " + std::to_string(line_no) + ": price must be positive, got " +
                        std::string(fields[j]));
      }
      raw.push_back(*v);
    }
  }

  const auto n_rows = static_cast<Eigen::Index>(raw.size() / p);
  const auto cols = static_cast<Eigen::Index>(p);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      x(raw.data(), n_rows, cols);
  if (options.levels) {
    if (n_rows < 2) throw Error(ErrorKind::kEmptyInput, "need at least two price rows");
    table.values = (x.bottomRows(n_rows - 1).array().log() - x.topRows(n_rows - 1).array().log())
                       .matrix() *
                   options.scale;
    if (has_dates) table.times.assign(times.begin() + 1, times.end());
  } else {
    table.values = x * options.scale;
    table.times = std::move(times);
  }
  return table;
}

ReturnsTable load_prices_csv(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_prices_csv(read_file(path), options);
}

Eigen::Index RunConfig::dim() const {
  if (omega_diag) return omega_diag->size();
  if (omega_matrix) return omega_matrix->rows();
  throw config_error("one of omega_diag or omega_matrix is required");
}

ModelConfig RunConfig::model() const {
  const Eigen::Index p = dim();
  SymPosDefMatrix omega;
  if (omega_diag) {
    if (!(omega_diag->array() > 0.0).all() || !omega_diag->allFinite()) {
      throw config_error("omega_diag entries must be positive");
    }
    omega = SymPosDefMatrix::trusted(omega_diag->asDiagonal());
  } else {
    omega = pd_or_throw(*omega_matrix, "omega_matrix");
  }
  ModelConfig c = ModelConfig::with_defaults(delta, phi, omega);
  if (m0) {
    if (m0->size() != p) throw config_error("m0 length must match the dimension of omega");
    c.m0 = *m0;
  }
  c.p0 = p0;
  if (s0) {
    if (s0->rows() != p) throw config_error("s0 dimension must match the dimension of omega");
    c.s0 = pd_or_throw(*s0, "s0");
  }
  c.forecast_mean_mode = forecast_mean_mode;
  c.standardization_mode = standardization_mode;
  c.validate();
  return c;
}

SearchSpec RunConfig::search_spec(int jobs) const {
  SearchSpec spec;
  spec.q = q;
  spec.delta_candidates = delta_candidates;
  spec.jobs = jobs;
  spec.validate();
  return spec;
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("top level must be an object");

  static const std::vector<std::string> kKeys{"delta", "phi", "omega_diag", "omega_matrix",
                                              "m0",    "p0",  "s0",         "q",
                                              "delta_candidates", "seed", "modes"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw config_error("unknown key '" + key + "'");
    }
  }

  RunConfig c;
  if (!j.contains("delta")) throw config_error("delta is required");
  c.delta = get_number(j["delta"], "delta");
  if (j.contains("phi")) c.phi = get_number(j["phi"], "phi");
  const bool has_diag = j.contains("omega_diag");
  const bool has_matrix = j.contains("omega_matrix");
  if (has_diag && has_matrix) throw config_error("give only one of omega_diag or omega_matrix");
  if (has_diag) c.omega_diag = get_vector(j["omega_diag"], "omega_diag");
  if (has_matrix) c.omega_matrix = get_matrix(j["omega_matrix"], "omega_matrix");
  if (j.contains("m0")) c.m0 = get_vector(j["m0"], "m0");
  if (j.contains("p0")) c.p0 = get_number(j["p0"], "p0");
  if (j.contains("s0")) c.s0 = get_matrix(j["s0"], "s0");
  if (j.contains("q")) {
    if (!j["q"].is_number_integer()) throw config_error("q must be an integer");
    c.q = j["q"].get<int>();
  }
  if (j.contains("delta_candidates")) {
    const Vector d = get_vector(j["delta_candidates"], "delta_candidates");
    c.delta_candidates.assign(d.data(), d.data() + d.size());
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw config_error("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("modes")) {
    const json& m = j["modes"];
    if (!m.is_object()) throw config_error("modes must be an object");
    for (const auto& [key, value] : m.items()) {
      if (!value.is_string()) throw config_error("modes." + key + " must be a string");
      const std::string v = value.get<std::string>();
      if (key == "forecast_mean") {
        if (v == "paper_verbatim") {
          c.forecast_mean_mode = ForecastMeanMode::kPaperVerbatim;
        } else if (v == "phi_scaled") {
          c.forecast_mean_mode = ForecastMeanMode::kPhiScaled;
        } else {
          throw config_error("modes.forecast_mean must be paper_verbatim or phi_scaled");
        }
      } else if (key == "standardization") {
        if (v == "forecast_cov") {
          c.standardization_mode = StandardizationMode::kForecastCov;
        } else if (v == "paper_verbatim_st") {
          c.standardization_mode = StandardizationMode::kPaperVerbatimSt;
        } else {
          throw config_error("modes.standardization must be forecast_cov or paper_verbatim_st");
        }
      } else {
        throw config_error("unknown key 'modes." + key + "'");
      }
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path));
}

std::string config_echo_json(const RunConfig& c) {
  JsonWriter w;
  w.begin_object();
  w.key("delta").value(c.delta);
  w.key("phi").value(c.phi);
  if (c.omega_diag) w.key("omega_diag").vector(*c.omega_diag);
  if (c.omega_matrix) w.key("omega_matrix").matrix(*c.omega_matrix);
  if (c.m0) w.key("m0").vector(*c.m0);
  w.key("p0").value(c.p0);
  if (c.s0) w.key("s0").matrix(*c.s0);
  w.key("q").value(c.q);
  w.key("delta_candidates").begin_array();
  for (double d : c.delta_candidates) w.value(d);
  w.end_array();
  w.key("seed").value(c.seed);
  w.key("modes").begin_object();
  w.key("forecast_mean").value(mode_name(c.forecast_mean_mode));
  w.key("standardization").value(mode_name(c.standardization_mode));
  w.end_object();
  w.end_object();
  std::string s = w.str();
  s.pop_back();
  return s;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> vech_lower(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows() * (m.rows() + 1) / 2));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out.push_back(m(i, j));
  }
  return out;
}

Matrix correlation(const Matrix& cov) {
  const Eigen::Index p = cov.rows();
  Matrix r(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

std::string volatility_csv(const std::vector<StepRecord>& records,
                           const std::vector<std::string>& times) {
  std::string out =
      "# S_t* as row-major lower triangle: s_i_j lists (1,1),(2,1),(2,2),(3,1),...; "
      "rho_i_j lists the correlation matrix in the same order\n";
  const Eigen::Index p = records.empty() ? 0 : records.front().S_star.dim();
  out += "t";
  if (!times.empty()) out += ",time";
  for (const char* prefix : {"s", "rho"}) {
    for (Eigen::Index i = 1; i <= p; ++i) {
      for (Eigen::Index j = 1; j <= i; ++j) {
        out += ',' + std::string(prefix) + '_' + std::to_string(i) + '_' + std::to_string(j);
      }
    }
  }
  out += '\n';
  for (const StepRecord& r : records) {
    std::vector<double> row = vech_lower(r.S_star.matrix());
    const std::vector<double> rho = vech_lower(correlation(r.S_star.matrix()));
    row.insert(row.end(), rho.begin(), rho.end());
    append_row(out, r.t, times, row);
  }
  return out;
}

std::string forecast_csv(const std::vector<StepRecord>& records,
                         const std::vector<std::string>& times) {
  const Eigen::Index p = records.empty() ? 0 : records.front().e.size();
  std::string out = "t";
  if (!times.empty()) out += ",time";
  for (const char* prefix : {"f", "e", "u"}) {
    for (Eigen::Index i = 1; i <= p; ++i) out += ',' + std::string(prefix) + '_' + std::to_string(i);
  }
  out += '\n';
  for (const StepRecord& r : records) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(3 * p));
    for (const Vector* v : {&r.forecast.location, &r.e, &r.u}) {
      row.insert(row.end(), v->data(), v->data() + v->size());
    }
    append_row(out, r.t, times, row);
  }
  return out;
}

std::string returns_csv(const Matrix& ys, const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j];
  }
  out += '\n';
  for (Eigen::Index t = 0; t < ys.rows(); ++t) {
    for (Eigen::Index j = 0; j < ys.cols(); ++j) {
      if (j) out += ',';
      out += format_double(ys(t, j));
    }
    out += '\n';
  }
  return out;
}

std::string search_trace_csv(const std::vector<TraceEntry>& trace, Eigen::Index p) {
  std::string out = "delta,sweep,coordinate";
  for (Eigen::Index i = 1; i <= p; ++i) out += ",z_" + std::to_string(i);
  out += ",objective,failed,accepted\n";
  for (const TraceEntry& e : trace) {
    out += format_double(e.delta) + ',' + std::to_string(e.sweep) + ',' +
           std::to_string(e.coordinate);
    for (Eigen::Index i = 0; i < e.z.size(); ++i) out += ',' + format_double(e.z(i));
    out += ',' + format_double(e.objective) + ',' + (e.failed ? "1" : "0") + ',' +
           (e.accepted ? "1" : "0") + '\n';
  }
  return out;
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  first_.pop_back();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  first_.pop_back();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  before_value();
  out_ += json(std::string(k)).dump();
  out_ += ':';
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  if (!std::isfinite(x)) return null();
  before_value();
  out_ += format_double(x);
  return *this;
}

JsonWriter& JsonWriter::value(long x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool b) {
  before_value();
  out_ += b ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  before_value();
  out_ += json(std::string(s)).dump();
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::vector(const Vector& v) {
  begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) value(v(i));
  return end_array();
}

JsonWriter& JsonWriter::matrix(const Matrix& m) {
  begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) vector(m.row(i).transpose());
  return end_array();
}

JsonWriter& JsonWriter::raw(std::string_view json_text) {
  before_value();
  out_ += json_text;
  return *this;
}

}  // namespace giwvol
