#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "giwvol/cli_io.hpp"
#include "giwvol/commands.hpp"
#include "json.hpp"

using namespace giwvol;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kIo;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("giwvol_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string price_csv(int rows) {
  std::string out = "date,a,b\n";
  double pa = 100.0, pb = 50.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int i = 0; i < rows; ++i) {
    out += "2020-01-" + std::to_string(i + 1) + "," + format_double(pa) + "," + format_double(pb) +
           "\n";
    pa *= std::exp(0.01 * n01(rng));
    pb *= std::exp(0.02 * n01(rng));
  }
  return out;
}

const char* kConfig = R"({"delta": 0.8, "phi": 1.0, "omega_diag": [1.0, 0.5], "seed": 7})";

}  // namespace

TEST(ParsePricesCsv, LogDifferences) {
  const double e = std::exp(1.0);
  const ReturnsTable t =
      parse_prices_csv("x,y\n" + format_double(e) + ",3\n" + format_double(e * e) + ",3\n", {});
  ASSERT_EQ(t.rows(), 1);
  EXPECT_NEAR(t.values(0, 0), 1.0, 1e-15);
  EXPECT_EQ(t.values(0, 1), 0.0);
  EXPECT_TRUE(t.times.empty());
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "y"}));
}

TEST(ParsePricesCsv, DatesScaleAndReturnsMode) {
  const std::string text = "date,a\n2020-01-01,1\n2020-01-02,2\n2020-01-03,4\n";
  const ReturnsTable levels = parse_prices_csv(text, {true, 100.0});
  EXPECT_EQ(levels.times, (std::vector<std::string>{"2020-01-02", "2020-01-03"}));
  EXPECT_NEAR(levels.values(1, 0), 100.0 * std::log(2.0), 1e-12);
  const ReturnsTable raw = parse_prices_csv(text, {false, 2.0});
  EXPECT_EQ(raw.rows(), 3);
  EXPECT_EQ(raw.values(2, 0), 8.0);
  EXPECT_EQ(raw.times.size(), 3u);
  // returns may be negative or zero
  EXPECT_NO_THROW(parse_prices_csv("a\n-0.5\n0\n", {false, 1.0}));
  // CRLF line endings
  EXPECT_EQ(parse_prices_csv("a\r\n1\r\n2\r\n", {}).rows(), 1);
}

TEST(ParsePricesCsv, ErrorsNameTheLine) {
  const std::string gap = "date,a,b\n2020-01-01,1,2\n2020-01-02,,2\n";
  EXPECT_EQ(kind_of([&] { parse_prices_csv(gap, {}); }), ErrorKind::kParse);
  EXPECT_NE(message_of([&] { parse_prices_csv(gap, {}); }).find("line 3"), std::string::npos);
  const std::string short_row = "a,b\n1,2\n3\n";
  EXPECT_NE(message_of([&] { parse_prices_csv(short_row, {}); }).find("line 3"),
            std::string::npos);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("a\n1\nabc\n", {}); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("a\n1\n-2\n", {}); }), ErrorKind::kNonPositivePrice);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("", {}); }), ErrorKind::kEmptyInput);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("a,b\n", {}); }), ErrorKind::kEmptyInput);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("a\n1\n", {}); }), ErrorKind::kEmptyInput);
  EXPECT_EQ(kind_of([&] { parse_prices_csv("a\n1\n2\n", {true, 0.0}); }), ErrorKind::kValidation);
}

TEST(RunConfig, ParsesEveryKey) {
  const RunConfig c = parse_run_config(R"({
    "delta": 0.75, "phi": 0.9, "omega_matrix": [[2, 0.5], [0.5, 1]],
    "m0": [0.1, -0.1], "p0": 10, "s0": [[1, 0], [0, 2]], "q": 1,
    "delta_candidates": [0.8, 0.9], "seed": 42,
    "modes": {"forecast_mean": "phi_scaled", "standardization": "paper_verbatim_st"}})");
  const ModelConfig m = c.model();
  EXPECT_EQ(m.delta, 0.75);
  EXPECT_EQ(m.phi, 0.9);
  EXPECT_EQ(m.omega(0, 1), 0.5);
  EXPECT_EQ(m.m0(1), -0.1);
  EXPECT_EQ(m.p0, 10.0);
  EXPECT_EQ(m.s0(1, 1), 2.0);
  EXPECT_EQ(m.forecast_mean_mode, ForecastMeanMode::kPhiScaled);
  EXPECT_EQ(m.standardization_mode, StandardizationMode::kPaperVerbatimSt);
  EXPECT_EQ(c.seed, 42u);
  const SearchSpec spec = c.search_spec(3);
  EXPECT_EQ(spec.q, 1);
  EXPECT_EQ(spec.delta_candidates, (std::vector<double>{0.8, 0.9}));
  EXPECT_EQ(spec.jobs, 3);
}

TEST(RunConfig, Defaults) {
  const ModelConfig m = parse_run_config(R"({"delta": 0.8, "omega_diag": [1, 2, 3]})").model();
  EXPECT_EQ(m.dim(), 3);
  EXPECT_EQ(m.m0, Vector::Zero(3));
  EXPECT_EQ(m.s0.matrix(), Matrix::Identity(3, 3));
  EXPECT_EQ(m.p0, 1000.0);
  EXPECT_EQ(m.phi, 1.0);
}

TEST(RunConfig, Rejections) {
  auto parse_model = [](const std::string& s) { return [s] { parse_run_config(s).model(); }; };
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.5, "omega_diag": [1]})")), ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1], "extra": 1})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1], "omega_matrix": [[1]]})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8})")), ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"omega_diag": [1]})")), ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1, -1]})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_matrix": [[1, 2], [2, 1]]})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1], "m0": [1, 2]})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1], "seed": -3})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, "omega_diag": [1], "modes": {"x": "y"}})")),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of(parse_model(R"({"delta": 0.8, )")), ErrorKind::kParse);
}

TEST(Formatting, SeventeenDigitsAndNonFinite) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Formatting, VechAndCorrelation) {
  Matrix m(3, 3);
  m << 4, 2, 1, 2, 9, 3, 1, 3, 16;
  EXPECT_EQ(vech_lower(m), (std::vector<double>{4, 2, 9, 1, 3, 16}));
  const Matrix r = correlation(m);
  EXPECT_EQ(r.diagonal(), Vector::Ones(3));
  EXPECT_NEAR(r(1, 0), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(r(2, 1), 3.0 / 12.0, 1e-15);
  Matrix perfect(2, 2);
  perfect << 1, 1 + 1e-15, 1 + 1e-15, 1;
  EXPECT_LE(correlation(perfect)(0, 1), 1.0);
}

TEST(JsonWriter, ProducesParseableOutput) {
  JsonWriter w;
  w.begin_object();
  w.key("a").value(0.1);
  w.key("b").value(std::numeric_limits<double>::infinity());
  w.key("c").begin_array().value(1L).value(true).value("x\"y").end_array();
  w.key("m").matrix(Matrix::Identity(2, 2));
  w.key("r").raw(R"({"z": 1})");
  w.end_object();
  const json j = json::parse(w.str());
  EXPECT_EQ(j["a"].get<double>(), 0.1);
  EXPECT_TRUE(j["b"].is_null());
  EXPECT_EQ(j["c"][2].get<std::string>(), "x\"y");
  EXPECT_EQ(j["m"][1][1].get<double>(), 1.0);
  EXPECT_EQ(j["r"]["z"].get<int>(), 1);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Commands, FilterWritesOutputsAndIsByteIdentical) {
  TempDir dir;
  write(dir.path() / "prices.csv", price_csv(120));
  write(dir.path() / "config.json", kConfig);
  CommandOptions o;
  o.config = dir.path() / "config.json";
  o.input = dir.path() / "prices.csv";
  o.out = dir.path() / "run1";
  run_filter_cmd(o);
  const std::string vol = slurp(o.out / "volatility.csv");
  const std::string fc = slurp(o.out / "forecast.csv");
  const std::string report = slurp(o.out / "report.json");
  o.out = dir.path() / "run2";
  run_filter_cmd(o);
  EXPECT_EQ(vol, slurp(o.out / "volatility.csv"));
  EXPECT_EQ(fc, slurp(o.out / "forecast.csv"));
  EXPECT_EQ(report, slurp(o.out / "report.json"));

  const json j = json::parse(report);
  EXPECT_EQ(j["command"], "filter");
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["n_obs"], 119);
  EXPECT_EQ(j["performance"]["mse"].size(), 2u);
  EXPECT_EQ(j["manifest"]["input_sha256"], sha256_hex(slurp(dir.path() / "prices.csv")));
  EXPECT_EQ(j["manifest"]["config"]["delta"], 0.8);
  EXPECT_FALSE(j["manifest"].contains("elapsed_seconds"));

  std::istringstream lines(vol);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind('#', 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line, "t,time,s_1_1,s_2_1,s_2_2,rho_1_1,rho_2_1,rho_2_2");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 119);
  std::istringstream fl(fc);
  std::getline(fl, line);
  EXPECT_EQ(line, "t,time,f_1,f_2,e_1,e_2,u_1,u_2");
}

TEST(Commands, SimulateThenFilterRoundTrip) {
  TempDir dir;
  write(dir.path() / "config.json", kConfig);
  CommandOptions o;
  o.config = dir.path() / "config.json";
  o.out = dir.path() / "sim";
  o.steps = 80;
  run_simulate_cmd(o);
  const json sim = json::parse(slurp(o.out / "report.json"));
  EXPECT_EQ(sim["n_obs"], 80);
  EXPECT_EQ(sim["manifest"]["seed"], 7);
  EXPECT_TRUE(sim["manifest"]["input_sha256"].is_null());
  const ReturnsTable ys = load_prices_csv(o.out / "simulated.csv", {false, 1.0});
  EXPECT_EQ(ys.rows(), 80);
  EXPECT_EQ(ys.columns, (std::vector<std::string>{"y_1", "y_2"}));

  CommandOptions f;
  f.config = o.config;
  f.input = o.out / "simulated.csv";
  f.levels = false;
  f.out = dir.path() / "filt";
  run_filter_cmd(f);
  EXPECT_EQ(json::parse(slurp(f.out / "report.json"))["n_obs"], 80);

  // a different seed override changes the path
  o.out = dir.path() / "sim2";
  o.seed = 8;
  run_simulate_cmd(o);
  EXPECT_NE(slurp(dir.path() / "sim" / "simulated.csv"), slurp(o.out / "simulated.csv"));
}

TEST(Commands, LoglikMetricsAndSearch) {
  TempDir dir;
  write(dir.path() / "prices.csv", price_csv(60));
  write(dir.path() / "config.json",
        R"({"delta": 0.8, "omega_diag": [1, 1], "q": 1, "delta_candidates": [0.8, 0.9]})");
  CommandOptions o;
  o.config = dir.path() / "config.json";
  o.input = dir.path() / "prices.csv";
  o.out = dir.path() / "out";
  run_loglik_cmd(o);
  const json ll = json::parse(slurp(o.out / "report.json"));
  const auto& b = ll["likelihood"];
  EXPECT_NEAR(b["total"].get<double>(),
              b["constant_c"].get<double>() + b["quad_term"].get<double>() +
                  b["chol_logdet_term"].get<double>() + b["lt_term"].get<double>() +
                  b["sigma_logdet_term"].get<double>(),
              1e-9 * std::abs(b["total"].get<double>()));
  run_metrics_cmd(o);
  EXPECT_EQ(json::parse(slurp(o.out / "report.json"))["performance"]["n_obs"], 59);
  o.jobs = 2;
  run_search_cmd(o);
  const json s = json::parse(slurp(o.out / "report.json"));
  EXPECT_EQ(s["best"]["z"].size(), 2u);
  const std::string trace = slurp(o.out / "search_trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "delta,sweep,coordinate,z_1,z_2,objective,failed,accepted");
}

TEST(Commands, ErrorKindsMapToExitCodes) {
  TempDir dir;
  write(dir.path() / "prices.csv", price_csv(30));
  write(dir.path() / "bad.json", R"({"delta": 0.5, "omega_diag": [1, 1]})");
  write(dir.path() / "p3.json", R"({"delta": 0.8, "omega_diag": [1, 1, 1]})");
  CommandOptions o;
  o.input = dir.path() / "prices.csv";
  o.out = dir.path() / "out";
  o.config = dir.path() / "bad.json";
  EXPECT_EQ(exit_code_for(kind_of([&] { run_filter_cmd(o); })), 2);
  o.config = dir.path() / "p3.json";
  EXPECT_EQ(kind_of([&] { run_filter_cmd(o); }), ErrorKind::kDimensionMismatch);
  o.config = dir.path() / "missing.json";
  EXPECT_EQ(kind_of([&] { run_filter_cmd(o); }), ErrorKind::kIo);
  EXPECT_EQ(exit_code_for(ErrorKind::kNotPositiveDefinite), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kNumerical), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kDomain), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kParse), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kEmptyInput), 2);
}
