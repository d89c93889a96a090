#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace choquard {

enum class ErrorKind {
  invalid_parameter,
  grid_mismatch,
  domain_error,
  non_convergence,
  unsupported_grid,
  exponent_mismatch,
  negative_input,
  empty_family,
  quadrature_failure,
  resolution_failure,
  division_by_zero,
  geometry_failure,
  no_interior_max,
  validation,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace choquard
