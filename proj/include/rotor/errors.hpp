#pragma once

#include <stdexcept>
#include <string>

namespace rotor {

// Invalid inputs: bad parameter values, malformed configs, schedule misuse.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failures: non-convergence, ill-conditioned formulas, NaN.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rotor
