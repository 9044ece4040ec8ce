#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rotor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidation = 4;

struct CliOptions {
  std::string command;      // calibrate | run | validate | wigner
  std::string config_path;  // JSON file
  std::string out_dir;      // overrides the config's output_dir when set
  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool strict = false;
};

// Executes one command and returns the process exit code. Failures produce a
// one-line JSON error report on stderr (and error.json in the output
// directory when one is known) instead of an exception.
int run_cli(const CliOptions& options);

}  // namespace rotor
