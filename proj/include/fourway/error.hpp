#pragma once

#include <stdexcept>
#include <string>

namespace fourway {

// Input that violates a data or configuration contract (bad CSV, bad schema,
// bad scenario). The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hazard regression that cannot be fitted (rank deficiency, separation,
// no events). The CLI maps these to exit code 3.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fourway
