#pragma once

#include <choquard/energy.hpp>
#include <choquard/grid.hpp>
#include <choquard/nonlinearity.hpp>
#include <choquard/periodic_profile.hpp>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace choquard {

/// Metric of the Sobolev gradient: int grad u grad v + (V + log(1 + |x|)) u v,
/// i.e. the squared 1,2(w) norm. Factored once per grid.
class SobolevMetric {
 public:
  explicit SobolevMetric(const EnergyFunctional& functional);
  ~SobolevMetric();
  SobolevMetric(const SobolevMetric&) = delete;
  SobolevMetric& operator=(const SobolevMetric&) = delete;

  /// z = G^{-1} g for a covector g (zero on inactive nodes).
  std::vector<double> solve(std::span<const double> covector) const;
  /// sqrt(g^T G^{-1} g): the dual norm of the covector.
  double dual_norm(std::span<const double> covector) const;
  /// sqrt(u^T G u)
  double norm(std::span<const double> u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct GeometryReport {
  double rho_sphere = 0.0;
  double delta0 = 0.0;  // min of I_V over the probe set on the sphere
  int probes = 0;
  GridField e_witness;  // I_V(e_witness) < 0
  double e_energy = 0.0;
  double e_norm = 0.0;  // ||e||_{1,q(w)}
};

/// Probes the sphere ||u||_{1,q(w)} = rho_sphere with Gaussians of several
/// widths and seeded centres, and scales a bump supported in B_{1/4} by
/// doubling until the energy is negative. Throws geometry-failure otherwise.
GeometryReport check_mp_geometry(const EnergyFunctional& functional, double rho_sphere,
                                 std::uint64_t seed = 0);

struct SolverConfig {
  GridKind grid_kind = GridKind::cartesian;
  double domain_radius = 20.0;
  int resolution = 128;
  NonlinearitySpec spec;
  PeriodicProfile potential;
  int path_nodes = 16;
  double descent_step = 1.0;
  int max_iterations = 200;
  double residual_tolerance = 1e-4;
  double rho_sphere = 1e-2;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SolverStatus { converged, budget_exhausted, level_out_of_window, stalled };

std::string_view to_string(SolverStatus status);

struct TracePoint {
  double level = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct SolverResult {
  GridField field;
  double level = 0.0;
  double residual = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::stalled;
  double vanishing_indicator = 0.0;
  std::array<int, 2> recentering_shift{0, 0};
  std::vector<TracePoint> ps_trace;
  std::vector<GridField> fields;  // accepted path-maximum states, same order as ps_trace
  GeometryReport geometry;
  int restarts = 0;
  bool saturated = false;
};

/**
 * Mountain-pass iteration on rays: the path 0 -> e is the segment t w,
 * relaxed by locating its maximum t* (path nodes plus Brent refinement);
 * the maximum u = t* w then takes a Sobolev-gradient step
 * w <- max(u - tau G^{-1} I'(u), 0) accepted by an Armijo test on the new
 * path maximum. Stops when the dual norm of I'(u) drops below the tolerance.
 */
SolverResult solve_mountain_pass(const SolverConfig& config);
SolverResult solve_mountain_pass(const EnergyFunctional& functional, const SolverConfig& config);

struct WeakResidual {
  double max_pairing = 0.0;  // max_k |I_V'(u) phi_k| over unit-norm phi_k
  int directions = 0;
};

/// Pairs I_V'(u) against seeded random Gaussian directions normalized in the
/// metric of SobolevMetric.
WeakResidual weak_residual_check(const EnergyFunctional& functional, const GridField& u,
                                 int directions = 20, std::uint64_t seed = 0);

struct PsReport {
  double sup_norm_V = 0.0;        // sup ||u_k||_V
  double sup_frakF = 0.0;         // sup |frakF(u_k)|
  double sup_pairing = 0.0;       // sup |int [log(1/|x|) * F] u f|
  std::vector<double> levels;
  double level_limit = 0.0;       // last level, c
  double alpha_window = 0.0;      // 1 / (2c)
  std::vector<double> alphas;
  /// integrals[a][k] = int c(x)^alpha F(|u_k|)^alpha for alphas[a]
  std::vector<std::vector<double>> integrals;
  /// max/min - 1 over the last quarter of the trace, per alpha
  std::vector<double> tail_spread;
};

/// alphas are scanned on [1, 1/(2c) - margin); the list always contains
/// min(1.2, 0.9/(2c)).
PsReport ps_diagnostics(const EnergyFunctional& functional, const std::vector<GridField>& trace,
                        double margin = 0.1, int alpha_count = 5);

struct VanishingReport {
  double value = 0.0;  // sup over integer centres of int_{B_r(y)} u^2
  std::array<int, 2> center{0, 0};
};

VanishingReport vanishing_check(const GridField& u, double r);

struct RecenterResult {
  GridField field;
  std::array<int, 2> shift{0, 0};  // field(x) = u(x - shift)
  double truncated_mass = 0.0;     // int u^2 moved out of the domain
};

/// Translates by the integer vector that brings the unit-radius local mass
/// maximum to the origin. Needs 1/h integral on cartesian grids; radial
/// profiles are returned unchanged.
RecenterResult recenter(const GridField& u);

/// Translation of a cartesian field by an integer vector, zero-filled.
RecenterResult shift_field(const GridField& u, std::array<int, 2> shift);

}  // namespace choquard
