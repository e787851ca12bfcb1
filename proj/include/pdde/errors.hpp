#pragma once
#include <stdexcept>
#include <string>

namespace pdde {

/// Invalid inputs, violated preconditions, malformed configs. CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Runtime numerical failure: non-finite values, divergence, blow-up. CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pdde
