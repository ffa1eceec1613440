#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("giwvol_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

struct Result {
  int code;
  std::string err;
};

Result run(const std::string& args, const TempDir& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd =
      std::string("\"") + GIWVOL_CLI_PATH + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::string prices(long rows) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::ostringstream out;
  out.precision(17);
  out << "date,A,B\n";
  double a = 100.0, b = 50.0;
  for (long t = 0; t < rows; ++t) {
    out << "2020-01-" << t + 1 << "," << a << "," << b << "\n";
    a *= std::exp(0.01 * n01(rng));
    b *= std::exp(0.02 * n01(rng));
  }
  return out.str();
}

const char* kConfig = R"({"delta": 0.8, "phi": 1.0, "omega_diag": [1.0, 0.5], "seed": 7})";

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, FilterWritesAllOutputs) {
  TempDir dir;
  write_text(dir / "config.json", kConfig);
  write_text(dir / "prices.csv", prices(30));
  const Result r = run("filter --config " + quoted(dir / "config.json") + " --input " +
                           quoted(dir / "prices.csv") + " --out " + quoted(dir / "out") +
                           " --scale 100",
                       dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir / "out/report.json"));
  EXPECT_EQ(report["command"], "filter");
  EXPECT_EQ(report["n_obs"], 29);
  EXPECT_EQ(report["dim"], 2);
  EXPECT_EQ(report["manifest"]["scale"], 100.0);
  EXPECT_EQ(report["manifest"]["seed"], 7);
  EXPECT_FALSE(report["manifest"].contains("elapsed_seconds"));
  EXPECT_EQ(report["performance"]["msse"].size(), 2u);

  std::istringstream vol(slurp(dir / "out/volatility.csv"));
  std::string line;
  long lines = 0;
  while (std::getline(vol, line)) ++lines;
  EXPECT_EQ(lines, 31);
  EXPECT_TRUE(fs::exists(dir / "out/forecast.csv"));
}

TEST(Cli, TimingIsOptIn) {
  TempDir dir;
  write_text(dir / "config.json", kConfig);
  write_text(dir / "prices.csv", prices(20));
  const Result r = run("loglik --timing --config " + quoted(dir / "config.json") + " --input " +
                           quoted(dir / "prices.csv") + " --out " + quoted(dir / "out"),
                       dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir / "out/report.json"));
  EXPECT_TRUE(report["manifest"].contains("elapsed_seconds"));
}

TEST(Cli, SimulateThenFilterReturns) {
  TempDir dir;
  write_text(dir / "config.json", kConfig);
  ASSERT_EQ(run("simulate --steps 80 --seed 11 --config " + quoted(dir / "config.json") +
                    " --out " + quoted(dir / "sim"),
                dir)
                .code,
            0);
  const std::string first = slurp(dir / "sim/simulated.csv");
  ASSERT_EQ(run("simulate --steps 80 --seed 11 --config " + quoted(dir / "config.json") +
                    " --out " + quoted(dir / "sim"),
                dir)
                .code,
            0);
  EXPECT_EQ(slurp(dir / "sim/simulated.csv"), first);
  const Result r = run("metrics --returns --config " + quoted(dir / "config.json") +
                           " --input " + quoted(dir / "sim/simulated.csv") + " --out " +
                           quoted(dir / "m"),
                       dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir / "m/report.json"));
  EXPECT_EQ(report["n_obs"], 80);
}

TEST(Cli, SearchWritesTrace) {
  TempDir dir;
  write_text(dir / "config.json",
             R"({"delta": 0.8, "phi": 1.0, "omega_diag": [1.0, 1.0], "q": 1,
                 "delta_candidates": [0.8, 0.9]})");
  write_text(dir / "prices.csv", prices(60));
  const Result r = run("search --jobs 2 --config " + quoted(dir / "config.json") + " --input " +
                           quoted(dir / "prices.csv") + " --out " + quoted(dir / "s"),
                       dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "s/search_trace.csv"));
  const auto report = nlohmann::json::parse(slurp(dir / "s/report.json"));
  EXPECT_EQ(report["command"], "search");
}

TEST(Cli, ValidationFailuresExitTwo) {
  TempDir dir;
  write_text(dir / "bad_delta.json", R"({"delta": 0.5, "phi": 1.0, "omega_diag": [1.0, 0.5]})");
  write_text(dir / "config.json", kConfig);
  write_text(dir / "prices.csv", prices(10));
  write_text(dir / "negative.csv", "A,B\n1,2\n-1,3\n");
  Result r = run("filter --config " + quoted(dir / "bad_delta.json") + " --input " +
                     quoted(dir / "prices.csv") + " --out " + quoted(dir / "o"),
                 dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("delta"), std::string::npos) << r.err;
  r = run("filter --config " + quoted(dir / "config.json") + " --input " +
              quoted(dir / "negative.csv") + " --out " + quoted(dir / "o"),
          dir);
  EXPECT_EQ(r.code, 2);
  r = run("filter --config " + quoted(dir / "config.json"), dir);
  EXPECT_EQ(r.code, 2);
  r = run("bogus", dir);
  EXPECT_EQ(r.code, 2);
  r = run("filter --config " + quoted(dir / "missing.json") + " --input " +
              quoted(dir / "prices.csv"),
          dir);
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, NumericalFailureExitsThreeWithStep) {
  TempDir dir;
  write_text(dir / "config.json", kConfig);
  write_text(dir / "returns.csv", "A,B\n0.1,0.2\n0.3,-0.1\n1e200,0.2\n0.1,0.1\n");
  const Result r = run("filter --returns --config " + quoted(dir / "config.json") + " --input " +
                           quoted(dir / "returns.csv") + " --out " + quoted(dir / "o"),
                       dir);
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("t=3"), std::string::npos) << r.err;
}
