#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rho/cli.hpp"

using nlohmann::json;

namespace {
json strip_runtime(json j) {
  j.erase("runtime_sec");
  return j;
}
}  // namespace

TEST_CASE("config validation") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";

  SUBCASE("unknown top-level keys are rejected") {
    json cfg = {{"command", "estimate"}, {"bogus", 1}};
    CHECK(rho::cli::run_command(cfg, opts) == rho::cli::kExitConfig);
  }
  SUBCASE("unknown nested keys are rejected") {
    json cfg;
    cfg["command"] = "estimate";
    cfg["model"] = {{"type", "translation"}, {"base", "uniform"}, {"sigma", 0.5},
                    {"theta_min", -1.0}, {"theta_max", 1.0}, {"step", 0.05}, {"n", 5},
                    {"surprise", true}};
    cfg["data"] = {{"inline", {0.1, 0.2, -0.1, 0.3, 0.0}}};
    CHECK(rho::cli::run_command(cfg, opts) == rho::cli::kExitConfig);
  }
  SUBCASE("missing command") {
    json cfg = {{"model", {{"type", "translation"}}}};
    CHECK(rho::cli::run_command(cfg, opts) == rho::cli::kExitConfig);
  }
  SUBCASE("mismatched data length") {
    json cfg;
    cfg["command"] = "estimate";
    cfg["model"] = {{"type", "translation"}, {"base", "uniform"}, {"sigma", 0.5},
                    {"theta_min", -1.0}, {"theta_max", 1.0}, {"step", 0.05}, {"n", 7}};
    cfg["data"] = {{"inline", {0.1, 0.2}}};
    CHECK(rho::cli::run_command(cfg, opts) == rho::cli::kExitConfig);
  }
}

TEST_CASE("estimate command: uniform-shift demo lands near the midrange") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg;
  cfg["command"] = "estimate";
  cfg["model"] = {{"type", "translation"}, {"base", "uniform"}, {"sigma", 0.5},
                  {"theta_min", -2.0}, {"theta_max", 2.0}, {"step", 0.001}, {"n", 40}};
  cfg["data"] = {{"generate",
                  {{"family", "translation"}, {"base", "uniform"}, {"sigma", 0.5},
                   {"theta", 0.25}, {"n", 40}, {"seed", 5}}}};

  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  CHECK(report["upsilon_min"].get<double>() == 0.0);
  const double est = report["estimate"]["params"][0].get<double>();
  CHECK(est > 0.25 - 0.15);
  CHECK(est < 0.25 + 0.15);
  CHECK(std::filesystem::exists("/tmp/rho_cli_test/estimate.json"));

  // the report's embedded config re-runs to identical numbers
  json report2;
  REQUIRE(rho::cli::run_command(report["config"], opts, &report2) == rho::cli::kExitOk);
  CHECK(strip_runtime(report) == strip_runtime(report2));
}

TEST_CASE("estimate command: histogram demo returns the frequencies") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg;
  cfg["command"] = "estimate";
  cfg["model"] = {{"type", "histogram"}, {"edges", {0.0, 1.0, 2.0, 3.0}}, {"resolution", 20},
                  {"n", 10}};
  cfg["data"] = {{"inline", {0.5, 0.5, 0.5, 0.5, 0.5, 1.5, 1.5, 1.5, 2.5, 2.5}}};
  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  CHECK(report["estimate"]["params"][0].get<double>() == doctest::Approx(0.5).epsilon(0.051));
  CHECK(report["estimate"]["params"][1].get<double>() == doctest::Approx(0.3).epsilon(0.17));
}

TEST_CASE("select command on a two-model histogram family") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg;
  cfg["command"] = "select";
  cfg["family"] = {{"type", "histogram_family"},
                   {"models", {{{"edges", {0.0, 0.5, 1.0}}, {"resolution", 8}},
                               {{"edges", {0.0, 0.25, 0.5, 0.75, 1.0}}, {"resolution", 8}}}},
                   {"delta", {0.6931471805599453, 0.6931471805599453}},
                   {"n", 30}};
  cfg["data"] = {{"generate",
                  {{"family", "histogram"}, {"edges", {0.0, 0.5, 1.0}}, {"masses", {0.25, 0.75}},
                   {"n", 30}, {"seed", 12}}}};
  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  CHECK(report["selected"]["model_index"].get<int>() == 0);
}

TEST_CASE("simulate command writes the fixed-format CSV") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg;
  cfg["command"] = "simulate";
  cfg["scenario"] = {{"name", "demo"},      {"family", "translation"}, {"error", "gauss"},
                     {"grid_min", -0.3},    {"grid_max", 0.3},         {"grid_step", 0.01},
                     {"ns", {20}},          {"replications", 10},      {"seed", 9},
                     {"estimators", {"rho", "mean"}}};
  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  REQUIRE(std::filesystem::exists("/tmp/rho_cli_test/risk_report.csv"));
  std::ifstream in("/tmp/rho_cli_test/risk_report.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "scenario,estimator,n,replications,loss_name,mean,std_err,q05,q50,q95");
  CHECK(report["rows"].size() > 0);

  json report2;
  REQUIRE(rho::cli::run_command(cfg, opts, &report2) == rho::cli::kExitOk);
  CHECK(strip_runtime(report) == strip_runtime(report2));
}

TEST_CASE("bad scenario name exits with a config error") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg = {{"command", "simulate"}, {"scenario", "no-such-scenario"}};
  CHECK(rho::cli::run_command(cfg, opts) == rho::cli::kExitConfig);
}

TEST_CASE("random-design model with (w,y) CSV data") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  std::filesystem::create_directories(opts.out_dir);

  // write (w, y) rows with y = 0.5 w + small noise-free line
  {
    std::ofstream csv("/tmp/rho_cli_test/wy.csv");
    for (int i = 0; i < 40; ++i) {
      const double w = (i + 0.5) / 40.0;
      csv << w << "," << 0.5 * w + ((i % 2 == 0) ? 0.08 : -0.08) << "\n";
    }
  }
  json cfg;
  cfg["command"] = "estimate";
  cfg["model"] = {{"type", "random_design"}, {"base", "gauss"}, {"sigma", 0.25}, {"n", 40},
                  {"grids", {{-0.2, -0.1, 0.0, 0.1, 0.2}, {0.1, 0.3, 0.5, 0.7, 0.9}}}};
  cfg["data"] = {{"csv", "/tmp/rho_cli_test/wy.csv"}};
  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  CHECK(report["estimate"]["params"][0].get<double>() == doctest::Approx(0.0).epsilon(0.15));
  CHECK(report["estimate"]["params"][1].get<double>() == doctest::Approx(0.5).epsilon(0.45));
}

TEST_CASE("verify command exits zero and writes its report") {
  rho::cli::Options opts;
  opts.out_dir = "/tmp/rho_cli_test";
  json cfg = {{"command", "verify"}, {"verify", {{"budget", 1500}, {"seed", 20240801}}}};
  json report;
  REQUIRE(rho::cli::run_command(cfg, opts, &report) == rho::cli::kExitOk);
  CHECK(report["all_pass"].get<bool>());
  CHECK(report["checks"].size() >= 6);
  CHECK(std::filesystem::exists("/tmp/rho_cli_test/verify.json"));
}
