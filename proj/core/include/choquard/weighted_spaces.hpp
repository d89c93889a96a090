#pragma once

#include <choquard/grid.hpp>
#include <choquard/periodic_profile.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace choquard {

/// s = T(r) = r sqrt(log(e + r)).
double radial_map_T(double r);
double radial_map_T_prime(double r);
/// Safeguarded Newton; |T(r) - s| <= 1e-12 (1 + s).
double radial_map_T_inverse(double s);

enum class WeightKind {
  log_e_weight,  // log(e + |x|) >= 1
  log_one_plus,  // log(1 + |x|)
  potential_V,
};

struct WeightSpec {
  WeightKind kind = WeightKind::log_e_weight;
  PeriodicProfile potential;  // used by potential_V only

  double operator()(Point x) const;
};

/// Radial grids sample circle means of V and the exact radial weights.
GridField sample_weight(const WeightSpec& weight, const GridPtr& grid);

struct NormReport {
  double dirichlet = 0.0;
  double potential_mass = 0.0;  // int V u^2, 0 without a potential
  double weighted_mass = 0.0;   // int |u|^q w
  double total_sq = 0.0;        // dirichlet + potential_mass + weighted_mass^{2/q}
  double q_exponent = 2.0;
};

/// dirichlet + int V u^2 + (int |u|^q w)^{2/q}. With potential = nullopt and
/// w = log(e + |x|) this is the squared w0-norm.
NormReport norm_1qw(const GridField& u, double q, const WeightSpec& lq_weight,
                    const std::optional<PeriodicProfile>& potential);

/// ||u||_{w0}^2 = int |grad u|^2 + (int |u|^q log(e + |x|))^{2/q}.
double norm_w0_sq(const GridField& u, double q = 2.0);

/// v(T(r)) = u(r) on a radial grid of radius T(R) with the same resolution,
/// resampled with monotone cubic interpolation.
GridField transform_to_unweighted(const GridField& u);
/// u(r) = v(T(r)) on the given radial target grid.
GridField transform_from_unweighted(const GridField& v, const GridPtr& target);

struct TmValue {
  double value = 0.0;
  bool saturated = false;  // some exponent was capped at 700
};

inline constexpr double exponent_cap = 700.0;

/// int (e^{alpha u^2} - 1) w with w = log(e + |x|) when weighted, 1 otherwise.
TmValue tm_functional(const GridField& u, double alpha, bool weighted);

/// int F(alpha |u|) log(e + |x|) for a growth function F.
TmValue tm_functional_q(const GridField& u, double alpha,
                        const std::function<double(double)>& growth);

enum class NormConstraint {
  w0,   // ||u||_{w0} <= 1
  ruf,  // int |grad u|^2 + u^2 <= 1
};

struct FamilyMember {
  std::string label;
  double parameter = 0.0;
  GridField field;
};

struct SupSearchResult {
  double best_value = 0.0;
  std::size_t best_index = 0;
  std::string best_label;
  double best_parameter = 0.0;
  std::vector<double> values;  // per member, after normalization
  std::vector<bool> saturated;
};

/// Maximum of tm_functional over the family, each member scaled onto the unit
/// sphere of the constraint norm (zero members contribute 0).
SupSearchResult tm_sup_search(const std::vector<FamilyMember>& family, double alpha,
                              NormConstraint constraint, bool weighted = true);

}  // namespace choquard
