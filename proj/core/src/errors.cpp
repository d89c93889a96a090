#include <choquard/errors.hpp>

namespace choquard {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::unsupported_grid: return "unsupported-grid";
    case ErrorKind::exponent_mismatch: return "exponent-mismatch";
    case ErrorKind::negative_input: return "negative-input";
    case ErrorKind::empty_family: return "empty-family";
    case ErrorKind::quadrature_failure: return "quadrature-failure";
    case ErrorKind::resolution_failure: return "resolution-failure";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::geometry_failure: return "geometry-failure";
    case ErrorKind::no_interior_max: return "no-interior-max";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace choquard
