#pragma once

#include <stdexcept>
#include <string>

namespace palin {

// Base of everything the library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (bad shapes, non-finite entries,
// structure violations, inadmissible ansatz vectors).
struct ValidationError : Error {
  using Error::Error;
};

// The input is well formed but contradicts what the structure forces,
// e.g. a nonzero x^T r where the structure makes it vanish identically.
struct InconsistencyError : Error {
  using Error::Error;
};

// An iterative kernel did not converge or a certificate failed.
struct NumericalFailure : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace palin
