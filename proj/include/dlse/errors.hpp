#pragma once

#include <stdexcept>

namespace dlse {

// Invalid or inconsistent user-supplied input: dimension mismatches,
// non-finite values, malformed files.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: exponent overflow, non-finite loss, unattainable
// tolerance.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dlse
