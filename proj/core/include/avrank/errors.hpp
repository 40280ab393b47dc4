#pragma once

#include <stdexcept>
#include <string>

namespace avrank {

// Bad configuration (dimensions, divisibility, unknown tags). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejected input data (non-finite values, malformed files, version
// mismatches). CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal state machine misuse (time index out of sync with history).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// A test statistic violated its contract (negative or non-finite values).
struct StatisticError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace avrank
