#pragma once

#include <choquard/grid.hpp>
#include <choquard/log_kernel.hpp>
#include <choquard/nonlinearity.hpp>
#include <choquard/periodic_profile.hpp>

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace choquard {

/// frakF_i(u) = B_i(cF(u), cF(u)), frakF = frakF2 - frakF1.
struct FrakValues {
  double frakF = 0.0;
  double frakF1 = 0.0;
  double frakF2 = 0.0;
  bool saturated = false;
};

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double potential_mass = 0.0;  // int V u^2
  double quadratic = 0.0;       // (dirichlet + potential_mass) / 2
  double frakF = 0.0;
  double frakF1 = 0.0;
  double frakF2 = 0.0;
  double total = 0.0;  // quadratic - frakF / (4 pi)
  bool saturated = false;
};

/**
 * I_V(u) = 1/2 (int |grad u|^2 + V u^2) - 1/(4 pi) int [log(1/|x|) * F(x,u)] F(x,u)
 * on a fixed grid. The potential and c(x) are sampled once; the kernel
 * operator is shared with every other functional on the same grid.
 */
class EnergyFunctional {
 public:
  EnergyFunctional(GridPtr grid, NonlinearitySpec spec, PeriodicProfile potential);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const NonlinearitySpec& spec() const { return spec_; }
  const PeriodicProfile& potential() const { return potential_; }
  std::span<const double> potential_values() const { return v_; }
  std::span<const double> c_values() const { return c_; }

  FrakValues frak(std::span<const double> u) const;
  EnergyBreakdown energy(std::span<const double> u) const;

  /// Partial derivatives dI/du_i of the discrete energy.
  std::vector<double> gradient(std::span<const double> u, EnergyBreakdown* energy = nullptr) const;

  /// Nodal residual -Lap u + V u - (1/2pi)(log(1/|x|) * F) f, i.e. the
  /// gradient divided by the quadrature weights (0 on inactive nodes), so
  /// that sum_i w_i g_i phi_i is the directional derivative along phi.
  GridField residual_field(std::span<const double> u) const;

  /// int [log(1/|x|) * F(x,u)] u f(x,u) and int [log(1/|x|) * F(x,u)] F(x,u).
  std::pair<double, double> convolution_pairings(std::span<const double> u) const;

 private:
  std::vector<double> densities(std::span<const double> u, bool derivative, bool& saturated) const;

  GridPtr grid_;
  NonlinearitySpec spec_;
  PeriodicProfile potential_;
  std::vector<double> v_;
  std::vector<double> c_;
  std::shared_ptr<const KernelOperator> kernel_;
};

FrakValues frak_functionals(const GridField& u, const NonlinearitySpec& spec);
EnergyBreakdown energy_IV(const GridField& u, const NonlinearitySpec& spec,
                          const PeriodicProfile& potential);
GridField energy_gradient(const GridField& u, const NonlinearitySpec& spec,
                          const PeriodicProfile& potential);

struct MoserCap {
  int n = 2;
  double rho = 0.5;
  bool normalized = false;
  double delta_n = 0.0;
  double plateau = 0.0;  // sqrt(log n / (2 pi)), before normalization
};

/// sqrt(log n / 2pi) on [0, rho/n], log(rho/r)/sqrt(2 pi log n) on [rho/n, rho], 0 beyond.
double moser_profile(int n, double rho, double r);

/// Radial grid with nodes at rho/n and rho.
GridPtr moser_grid(int n, double rho, double radius, int resolution);

struct MoserField {
  MoserCap cap;
  GridField field;
};

/// With normalize = true the field is divided by sqrt(1 + delta_n), delta_n
/// evaluated for the given q and potential.
MoserField moser_cap(int n, double rho, const GridPtr& grid, bool normalize = false,
                     double q = 2.0, const PeriodicProfile& potential = {});

struct MoserDelta {
  double delta_n = 0.0;      // closed form
  double v_rho = 0.0;        // max of V on the disc of radius rho
  double norm_sq = 0.0;      // ||w_n||^2_{1,q(w)} by quadrature
  double excess = 0.0;       // norm_sq - 1
  double band_upper = 0.0;   // delta_n + 5 / log n
  bool in_band = false;
};

/// delta_n = rho^2/(4 log n) [V_rho + (2pi)^{2/q-1} log^{2/q}(1+rho) [q]!/2^{[q]-1} (1 + ([q]+1)/2)].
double moser_delta_closed_form(int n, double rho, double q, double v_rho);

/// Closed form plus the quadratured norm on a radial grid (radius 2 rho,
/// resolution nodes).
MoserDelta moser_delta_n(int n, double rho, double q, const PeriodicProfile& potential,
                         int resolution = 4096);

struct RayAnalysis {
  std::vector<double> t_samples;
  std::vector<double> energy_samples;
  double t_star = 0.0;
  double max_value = 0.0;
  /// t^2 ||u||_V^2 - (1/2pi) int [K*F] t u f at t_star (vanishes at a critical t).
  double identity_eq_residual = 0.0;
  /// t^2 ||u||_V^2 - 1 - (1/2pi) int [K*F] F at t_star (>= 0 iff max >= 1/2).
  double identity_ge_residual = 0.0;
  /// centred difference of t -> I(t u) at t_star
  double stationarity = 0.0;
  bool saturated = false;
};

/// Samples I(t u) log-uniformly on [1e-3, t_max] and refines the maximum by
/// Brent's method. Throws no-interior-max when the largest sample is at t_max.
RayAnalysis ray_analysis(const EnergyFunctional& functional, const GridField& direction,
                         double t_max, int samples = 128);
RayAnalysis ray_analysis(const GridField& direction, const NonlinearitySpec& spec,
                         const PeriodicProfile& potential, double t_max, int samples = 128);

struct LevelBound {
  double bound = 0.0;
  std::size_t witness = 0;
  std::vector<double> ray_maxima;  // NaN for directions without an interior max
};

/// Minimum over the family of the ray maxima.
LevelBound mp_level_upper_bound(const std::vector<GridField>& family, const NonlinearitySpec& spec,
                                const PeriodicProfile& potential, double t_max, int samples = 128);

}  // namespace choquard
