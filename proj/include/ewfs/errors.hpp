#pragma once

#include <stdexcept>
#include <string>

namespace ewfs {

// Enumeration would exceed the configured desk-scale limits.
struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The LP solver could not produce a verifiable certificate.
struct LpFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// H-representation input admits an unbounded direction.
struct UnboundedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ewfs
