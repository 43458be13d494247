#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace rho::cli {

struct Options {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides any seed in the config
  int threads = 0;
  bool verbose = false;
};

/// Thrown for malformed configurations (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Dispatches on config["command"]; writes report files under opts.out_dir
/// and returns the process exit code. `report_out`, when non-null, receives
/// the JSON report that was written (for round-trip tests).
int run_command(const nlohmann::json& config, const Options& opts,
                nlohmann::json* report_out = nullptr);

}  // namespace rho::cli
