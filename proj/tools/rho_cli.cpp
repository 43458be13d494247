#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rho/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rho-estimation: robust Hellinger-affinity estimation, selection and simulation"};

  std::string config_path;
  rho::cli::Options opts;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", opts.out_dir, "output directory (default: config 'out' or '.')");
  app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", opts.threads, "worker cap (0 = hardware)");
  app.add_flag("--verbose", opts.verbose, "progress on stderr");

  CLI11_PARSE(app, argc, argv);
  if (seed_set) opts.seed = seed;

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot open " << config_path << "\n";
    return rho::cli::kExitConfig;
  }
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rho::cli::kExitConfig;
  }
  return rho::cli::run_command(config, opts);
}
