#pragma once

#include <stdexcept>
#include <string>

namespace gpv {

// Invalid inputs: bad parameters, violated preconditions, malformed configs.
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A solver failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), residual(last_residual) {}
  double residual;
};

}  // namespace gpv
