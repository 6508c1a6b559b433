#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "ptcov/ptcov.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "ptcov_capi_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string run_ok(const char* command, const Json& config) {
  char* report = nullptr;
  ptcov_status status = ptcov_run_command(command, config.dump().c_str(), &report);
  REQUIRE_MESSAGE(status == PTCOV_OK, ptcov_last_error());
  std::string out = report;
  ptcov_string_free(report);
  return out;
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::strlen(ptcov_version()) > 0);
  char* report = nullptr;
  CHECK(ptcov_run_command("bogus", "{}", &report) == PTCOV_ERR_ARGUMENT);
  CHECK(std::strlen(ptcov_last_error()) > 0);
  CHECK(ptcov_run_command("test", "{not json", &report) == PTCOV_ERR_ARGUMENT);
}

TEST_CASE("pattern handles round-trip through csv") {
  TempDir dir;
  std::string path = dir.file("points.csv");
  {
    std::ofstream out(path);
    out << "x,y\n0.25,0.5\n0.75,0.25\n";
  }
  double window[4] = {0, 0, 1, 1};
  ptcov_pattern* pattern = nullptr;
  REQUIRE(ptcov_pattern_read_csv(path.c_str(), window, &pattern) == PTCOV_OK);
  CHECK(ptcov_pattern_size(pattern) == 2);
  double x = 0, y = 0;
  REQUIRE(ptcov_pattern_point(pattern, 1, &x, &y) == PTCOV_OK);
  CHECK(x == 0.75);
  CHECK(y == 0.25);
  CHECK(ptcov_pattern_point(pattern, 9, &x, &y) == PTCOV_ERR_ARGUMENT);

  std::string copy = dir.file("copy.csv");
  REQUIRE(ptcov_pattern_write_csv(pattern, copy.c_str()) == PTCOV_OK);
  ptcov_pattern* again = nullptr;
  REQUIRE(ptcov_pattern_read_csv(copy.c_str(), window, &again) == PTCOV_OK);
  CHECK(ptcov_pattern_size(again) == 2);
  ptcov_pattern_free(pattern);
  ptcov_pattern_free(again);

  // Points outside the window are a data error.
  double small[4] = {0, 0, 0.5, 0.5};
  ptcov_pattern* bad = nullptr;
  CHECK(ptcov_pattern_read_csv(path.c_str(), small, &bad) == PTCOV_ERR_DATA);
}

TEST_CASE("field handles expose lookup and integration") {
  TempDir dir;
  std::string path = dir.file("grid.asc");
  {
    std::ofstream out(path);
    out << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 0.5\nNODATA_value -9999\n";
    out << "3 4\n1 2\n";
  }
  ptcov_field* field = nullptr;
  REQUIRE(ptcov_field_read_asc(path.c_str(), &field) == PTCOV_OK);
  double value = 0;
  REQUIRE(ptcov_field_lookup(field, 0.25, 0.25, &value) == PTCOV_OK);
  CHECK(value == 1.0);  // south-west cell; header rows are north-up
  REQUIRE(ptcov_field_lookup(field, 0.75, 0.75, &value) == PTCOV_OK);
  CHECK(value == 4.0);
  CHECK(ptcov_field_lookup(field, 2.0, 2.0, &value) == PTCOV_ERR_DATA);
  REQUIRE(ptcov_field_integrate(field, &value) == PTCOV_OK);
  CHECK(value == doctest::Approx(0.25 * (1 + 2 + 3 + 4)));
  ptcov_field_free(field);

  CHECK(ptcov_field_read_asc(dir.file("missing.asc").c_str(), &field) == PTCOV_ERR_IO);
}

TEST_CASE("kendall tau through the c interface") {
  double a[4] = {1, 2, 3, 4};
  double b[4] = {2, 1, 4, 3};
  double tau = 0;
  REQUIRE(ptcov_kendall_tau(a, b, 4, &tau) == PTCOV_OK);
  CHECK(tau == doctest::Approx(1.0 / 3.0));
  CHECK(ptcov_kendall_tau(a, b, 1, &tau) == PTCOV_ERR_ARGUMENT);
  CHECK(ptcov_kendall_tau(nullptr, b, 4, &tau) == PTCOV_ERR_ARGUMENT);
}

TEST_CASE("command pipeline: simulate then test") {
  TempDir dir;
  Json sim{{"model", "P1"}, {"seed", 3}, {"output_dir", dir.file("p1")}};
  Json sim_report = Json::parse(run_ok("simulate", sim));
  CHECK(sim_report["command"] == "simulate");
  CHECK(sim_report["n_points"].get<long>() > 0);

  Json test{{"pattern", dir.file("p1") + "/pattern.csv"},
            {"nuisance", Json::array({dir.file("p1") + "/c1.asc"})},
            {"interest", dir.file("p1") + "/c2.asc"},
            {"seed", 4},
            {"test",
             Json{{"statistic", "cwr"},
                  {"residuals", "nonparametric"},
                  {"correction", "torus"},
                  {"n_shifts", 99}}}};
  Json report = Json::parse(run_ok("test", test));
  CHECK(report["result"]["statistics"].size() == 100);
  double p = report["result"]["p_value"].get<double>();
  CHECK(p > 0.0);
  CHECK(p <= 1.0);

  // Unknown keys are rejected before any computation.
  Json bad = test;
  bad["surprise"] = 1;
  char* out = nullptr;
  CHECK(ptcov_run_command("test", bad.dump().c_str(), &out) == PTCOV_ERR_ARGUMENT);
}
