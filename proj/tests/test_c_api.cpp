#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "giwvol/giwvol.h"

namespace fs = std::filesystem;

namespace {

std::vector<double> gaussian_returns(std::uint64_t seed, std::size_t n, std::size_t p) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> v(n * p);
  for (double& x : v) x = n01(rng);
  return v;
}

struct Config {
  giwvol_config* ptr = nullptr;
  ~Config() { giwvol_config_free(ptr); }
};

struct Series {
  giwvol_series* ptr = nullptr;
  ~Series() { giwvol_series_free(ptr); }
};

struct Filter {
  giwvol_filter_result* ptr = nullptr;
  ~Filter() { giwvol_filter_free(ptr); }
};

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("giwvol_c_api_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST(CApi, VersionAndCleanErrorState) {
  EXPECT_STRNE(giwvol_version(), "");
  giwvol_config_free(nullptr);
  giwvol_series_free(nullptr);
  giwvol_filter_free(nullptr);
  giwvol_search_free(nullptr);
}

TEST(CApi, ConfigValidation) {
  Config c;
  const double omega[2] = {1.0, 0.5};
  EXPECT_EQ(giwvol_config_create(2, 0.5, 1.0, omega, &c.ptr), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(c.ptr, nullptr);
  EXPECT_NE(std::string(giwvol_last_error()), "");
  EXPECT_EQ(giwvol_config_create(2, 0.8, 1.0, nullptr, &c.ptr), GIWVOL_ERR_VALIDATION);
  const double negative[2] = {1.0, -0.5};
  EXPECT_EQ(giwvol_config_create(2, 0.8, 1.0, negative, &c.ptr), GIWVOL_ERR_VALIDATION);

  ASSERT_EQ(giwvol_config_create(2, 0.8, 1.0, omega, &c.ptr), GIWVOL_OK);
  EXPECT_EQ(giwvol_config_dim(c.ptr), 2u);
  EXPECT_EQ(giwvol_config_set_p0(c.ptr, -1.0), GIWVOL_ERR_VALIDATION);
  const double not_pd[4] = {1.0, 2.0, 2.0, 1.0};
  EXPECT_EQ(giwvol_config_set_s0(c.ptr, not_pd), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(giwvol_last_error_kind(), GIWVOL_KIND_VALIDATION);
  const double s0[4] = {2.0, 0.3, 0.3, 1.0};
  EXPECT_EQ(giwvol_config_set_s0(c.ptr, s0), GIWVOL_OK);
}

TEST(CApi, SeriesRoundTrip) {
  const std::vector<double> v = gaussian_returns(1, 7, 3);
  Series s;
  ASSERT_EQ(giwvol_series_create(7, 3, v.data(), &s.ptr), GIWVOL_OK);
  EXPECT_EQ(giwvol_series_rows(s.ptr), 7u);
  EXPECT_EQ(giwvol_series_cols(s.ptr), 3u);
  std::vector<double> back(21);
  ASSERT_EQ(giwvol_series_values(s.ptr, back.data()), GIWVOL_OK);
  EXPECT_EQ(back, v);
  Series empty;
  EXPECT_EQ(giwvol_series_create(0, 3, v.data(), &empty.ptr), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(giwvol_last_error_kind(), GIWVOL_KIND_VALIDATION);
}

TEST(CApi, FilterOutputsAreConsistent) {
  const std::size_t n = 200, p = 2;
  const std::vector<double> v = gaussian_returns(2, n, p);
  const double omega[2] = {1.0, 1.0};
  Config c;
  Series s;
  Filter f;
  ASSERT_EQ(giwvol_config_create(p, 0.9, 1.0, omega, &c.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_series_create(n, p, v.data(), &s.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_filter_run(c.ptr, s.ptr, 1, &f.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_filter_steps(f.ptr), n);

  double mean[2], err[2], vol[4];
  for (std::size_t t = 1; t <= n; ++t) {
    ASSERT_EQ(giwvol_filter_forecast_mean(f.ptr, t, mean), GIWVOL_OK);
    ASSERT_EQ(giwvol_filter_error(f.ptr, t, err), GIWVOL_OK);
    ASSERT_EQ(giwvol_filter_volatility(f.ptr, t, vol), GIWVOL_OK);
    for (std::size_t j = 0; j < p; ++j) {
      EXPECT_NEAR(err[j], v[(t - 1) * p + j] - mean[j], 1e-12);
    }
    EXPECT_EQ(vol[1], vol[2]);
    EXPECT_GT(vol[0], 0.0);
    EXPECT_GT(vol[0] * vol[3] - vol[1] * vol[2], 0.0);
  }
  EXPECT_EQ(giwvol_filter_error(f.ptr, 0, err), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(giwvol_filter_error(f.ptr, n + 1, err), GIWVOL_ERR_VALIDATION);

  double ll = 0.0;
  ASSERT_EQ(giwvol_filter_loglik(f.ptr, &ll), GIWVOL_OK);
  EXPECT_TRUE(std::isfinite(ll));

  double mse[2], msse[2], mad[2], me[2];
  ASSERT_EQ(giwvol_filter_metrics(f.ptr, mse, msse, mad, me), GIWVOL_OK);
  ASSERT_EQ(giwvol_filter_metrics(f.ptr, nullptr, nullptr, nullptr, nullptr), GIWVOL_OK);
  for (std::size_t j = 0; j < p; ++j) {
    double sum_sq = 0.0, sum_abs = 0.0, sum = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      giwvol_filter_error(f.ptr, t, err);
      sum_sq += err[j] * err[j];
      sum_abs += std::abs(err[j]);
      sum += err[j];
    }
    EXPECT_NEAR(mse[j], sum_sq / n, 1e-12 * mse[j]);
    EXPECT_NEAR(mad[j], sum_abs / n, 1e-12 * mad[j]);
    EXPECT_NEAR(me[j], sum / n, 1e-12);
    EXPECT_GT(msse[j], 0.0);
  }
}

TEST(CApi, FilterWithoutLikelihoodReportsIt) {
  const std::vector<double> v = gaussian_returns(3, 50, 1);
  const double omega[1] = {1.0};
  Config c;
  Series s;
  Filter f;
  ASSERT_EQ(giwvol_config_create(1, 0.8, 1.0, omega, &c.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_series_create(50, 1, v.data(), &s.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_filter_run(c.ptr, s.ptr, 0, &f.ptr), GIWVOL_OK);
  double ll = 0.0;
  EXPECT_NE(giwvol_filter_loglik(f.ptr, &ll), GIWVOL_OK);
}

TEST(CApi, DimensionMismatchAndNumericalStep) {
  const double omega[2] = {1.0, 1.0};
  Config c;
  ASSERT_EQ(giwvol_config_create(2, 0.8, 1.0, omega, &c.ptr), GIWVOL_OK);
  const std::vector<double> v3 = gaussian_returns(4, 10, 3);
  Series s3;
  ASSERT_EQ(giwvol_series_create(10, 3, v3.data(), &s3.ptr), GIWVOL_OK);
  Filter f;
  EXPECT_EQ(giwvol_filter_run(c.ptr, s3.ptr, 1, &f.ptr), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(giwvol_last_error_kind(), GIWVOL_KIND_DIMENSION_MISMATCH);

  std::vector<double> v = gaussian_returns(5, 10, 2);
  v[4 * 2 + 1] = std::nan("");
  Series s;
  ASSERT_EQ(giwvol_series_create(10, 2, v.data(), &s.ptr), GIWVOL_OK);
  EXPECT_EQ(giwvol_filter_run(c.ptr, s.ptr, 1, &f.ptr), GIWVOL_ERR_NUMERICAL);
  EXPECT_EQ(giwvol_last_error_step(), 5);
  EXPECT_EQ(f.ptr, nullptr);
}

TEST(CApi, SimulateIsDeterministic) {
  const double omega[2] = {0.5, 2.0};
  Config c;
  ASSERT_EQ(giwvol_config_create(2, 0.85, 1.0, omega, &c.ptr), GIWVOL_OK);
  Series a, b, other;
  ASSERT_EQ(giwvol_simulate(c.ptr, 42, 100, &a.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_simulate(c.ptr, 42, 100, &b.ptr), GIWVOL_OK);
  ASSERT_EQ(giwvol_simulate(c.ptr, 43, 100, &other.ptr), GIWVOL_OK);
  std::vector<double> va(200), vb(200), vo(200);
  giwvol_series_values(a.ptr, va.data());
  giwvol_series_values(b.ptr, vb.data());
  giwvol_series_values(other.ptr, vo.data());
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vo);
  Series none;
  EXPECT_EQ(giwvol_simulate(c.ptr, 42, 0, &none.ptr), GIWVOL_ERR_VALIDATION);
}

TEST(CApi, SearchReturnsGridPoint) {
  const double omega[1] = {1.0};
  Config c;
  ASSERT_EQ(giwvol_config_create(1, 0.8, 1.0, omega, &c.ptr), GIWVOL_OK);
  Series s;
  ASSERT_EQ(giwvol_simulate(c.ptr, 9, 150, &s.ptr), GIWVOL_OK);
  const double deltas[2] = {0.8, 0.9};
  giwvol_search_result* r = nullptr;
  ASSERT_EQ(giwvol_search_run(c.ptr, s.ptr, 1, deltas, 2, 2, &r), GIWVOL_OK);
  double z = 0.0, delta = 0.0, objective = 0.0;
  ASSERT_EQ(giwvol_search_best(r, &z, &delta, &objective), GIWVOL_OK);
  giwvol_search_free(r);
  EXPECT_NEAR(z * 10.0, std::round(z * 10.0), 1e-12);
  EXPECT_TRUE(delta == 0.8 || delta == 0.9);
  EXPECT_TRUE(std::isfinite(objective));
  EXPECT_EQ(giwvol_search_run(c.ptr, s.ptr, 0, deltas, 2, 1, &r), GIWVOL_ERR_VALIDATION);
}

TEST(CApi, RunCommandWritesOutputs) {
  TempDir dir;
  write_text(dir.path() / "config.json",
             R"({"delta": 0.8, "phi": 1.0, "omega_diag": [1.0, 0.5], "seed": 3})");
  giwvol_command_options o;
  giwvol_command_options_init(&o);
  EXPECT_EQ(o.jobs, 1);
  EXPECT_EQ(o.levels, 1);
  EXPECT_EQ(o.scale, 1.0);
  EXPECT_EQ(o.steps, 500);
  const std::string config = (dir.path() / "config.json").string();
  const std::string sim_out = (dir.path() / "sim").string();
  o.config_path = config.c_str();
  o.out_dir = sim_out.c_str();
  o.steps = 120;
  ASSERT_EQ(giwvol_run_command(GIWVOL_CMD_SIMULATE, &o), GIWVOL_OK) << giwvol_last_error();
  EXPECT_TRUE(fs::exists(dir.path() / "sim" / "simulated.csv"));

  const std::string input = (dir.path() / "sim" / "simulated.csv").string();
  const std::string filter_out = (dir.path() / "filter").string();
  o.input_path = input.c_str();
  o.out_dir = filter_out.c_str();
  o.levels = 0;
  ASSERT_EQ(giwvol_run_command(GIWVOL_CMD_FILTER, &o), GIWVOL_OK) << giwvol_last_error();
  for (const char* f : {"volatility.csv", "forecast.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "filter" / f)) << f;
  }

  o.config_path = nullptr;
  EXPECT_EQ(giwvol_run_command(GIWVOL_CMD_FILTER, &o), GIWVOL_ERR_VALIDATION);
  EXPECT_EQ(giwvol_run_command(GIWVOL_CMD_FILTER, nullptr), GIWVOL_ERR_VALIDATION);
}
