#pragma once

#include <choquard/config.hpp>
#include <choquard/errors.hpp>
#include <choquard/report.hpp>
#include <choquard/weighted_spaces.hpp>

#include <vector>

namespace choquard {

/// Exit codes of the command line tool.
enum ExitCode : int {
  exit_success = 0,
  exit_validation = 2,
  exit_admissibility = 3,
  exit_budget = 4,
};

int exit_code_for(ErrorKind kind);

/// Radial test family: Gaussians e^{-r^2/s^2}, bumps (1 - r^2/a^2)^2 and
/// Moser caps (rho = 1/2) for the given n, on grids of the given radius.
std::vector<FamilyMember> embedding_family(double radius, int resolution,
                                           const std::vector<int>& moser_n);

RunReport cmd_check_assumptions(const RunConfig& config);
RunReport cmd_verify_embedding(const RunConfig& config);
RunReport cmd_moser_scan(const RunConfig& config);
RunReport cmd_solve(const RunConfig& config);
RunReport cmd_kernel_bench(const RunConfig& config);

/// Validates, dispatches on config.command and turns admissibility failures
/// into a report with the matching exit code. Validation errors propagate.
RunReport run_command(const RunConfig& config);

}  // namespace choquard
