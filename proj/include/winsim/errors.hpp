#pragma once

#include <stdexcept>
#include <string>

namespace winsim {

/// Invalid argument to a library operation (bad count, unsupported order, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent system configuration (rank-deficient bank, bad config file).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown, e.g. an ill-conditioned equalizer system.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace winsim
