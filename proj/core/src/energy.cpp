#include <choquard/energy.hpp>

#include <choquard/errors.hpp>
#include <choquard/weighted_spaces.hpp>

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace choquard {

namespace {
constexpr double pi = std::numbers::pi;
}

EnergyFunctional::EnergyFunctional(GridPtr grid, NonlinearitySpec spec, PeriodicProfile potential)
    : grid_(std::move(grid)), spec_(std::move(spec)), potential_(potential) {
  spec_.validate();
  potential_.validate("V");
  if (grid_->kind() == GridKind::radial && !spec_.c_profile.is_constant())
    fail(ErrorKind::unsupported_grid, "a non-constant c(x) needs a cartesian grid");
  const GridField v = sample_profile(potential_, grid_);
  const GridField c = sample_profile(spec_.c_profile, grid_);
  v_.assign(v.values().begin(), v.values().end());
  c_.assign(c.values().begin(), c.values().end());
  kernel_ = kernel_operator(grid_);
}

std::vector<double> EnergyFunctional::densities(std::span<const double> u, bool derivative,
                                                bool& saturated) const {
  const auto w = grid_->weights();
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (w[k] <= 0.0 || u[k] <= 0.0) continue;
    if (saturates(u[k])) saturated = true;
    out[k] = c_[k] * (derivative ? eval_f(spec_, u[k]) : eval_F(spec_, u[k]));
  }
  return out;
}

FrakValues EnergyFunctional::frak(std::span<const double> u) const {
  require(u.size() == grid_->size(), ErrorKind::grid_mismatch, "field size differs from grid");
  FrakValues out;
  const auto dens = densities(u, false, out.saturated);
  const auto w = grid_->weights();
  std::vector<double> m(dens.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = w[k] * dens[k];
  const auto pot = kernel_->apply(m);
  for (std::size_t k = 0; k < m.size(); ++k) {
    out.frakF2 += m[k] * pot.near[k];
    out.frakF1 += m[k] * pot.far[k];
  }
  out.frakF = out.frakF2 - out.frakF1;
  return out;
}

EnergyBreakdown EnergyFunctional::energy(std::span<const double> u) const {
  require(u.size() == grid_->size(), ErrorKind::grid_mismatch, "field size differs from grid");
  EnergyBreakdown e;
  const auto w = grid_->weights();
  for (const Edge& edge : grid_->edges()) {
    const double d = u[edge.i] - u[edge.j];
    e.dirichlet += edge.coefficient * d * d;
  }
  for (std::size_t k = 0; k < u.size(); ++k) e.potential_mass += w[k] * v_[k] * u[k] * u[k];
  e.quadratic = 0.5 * (e.dirichlet + e.potential_mass);
  const FrakValues f = frak(u);
  e.frakF = f.frakF;
  e.frakF1 = f.frakF1;
  e.frakF2 = f.frakF2;
  e.saturated = f.saturated;
  e.total = e.quadratic - e.frakF / (4.0 * pi);
  return e;
}

std::vector<double> EnergyFunctional::gradient(std::span<const double> u,
                                               EnergyBreakdown* energy_out) const {
  require(u.size() == grid_->size(), ErrorKind::grid_mismatch, "field size differs from grid");
  const auto w = grid_->weights();
  const std::size_t n = u.size();
  std::vector<double> g(n, 0.0);
  add_stiffness_product(*grid_, u, g);
  for (std::size_t k = 0; k < n; ++k) g[k] += w[k] * v_[k] * u[k];

  bool saturated = false;
  const auto F = densities(u, false, saturated);
  const auto f = densities(u, true, saturated);
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = w[k] * F[k];
  const auto pot = kernel_->apply(m);
  for (std::size_t k = 0; k < n; ++k)
    g[k] -= (pot.near[k] - pot.far[k]) * w[k] * f[k] / (2.0 * pi);

  if (energy_out) {
    EnergyBreakdown& e = *energy_out;
    e = EnergyBreakdown{};
    for (const Edge& edge : grid_->edges()) {
      const double d = u[edge.i] - u[edge.j];
      e.dirichlet += edge.coefficient * d * d;
    }
    for (std::size_t k = 0; k < n; ++k) e.potential_mass += w[k] * v_[k] * u[k] * u[k];
    e.quadratic = 0.5 * (e.dirichlet + e.potential_mass);
    for (std::size_t k = 0; k < n; ++k) {
      e.frakF2 += m[k] * pot.near[k];
      e.frakF1 += m[k] * pot.far[k];
    }
    e.frakF = e.frakF2 - e.frakF1;
    e.saturated = saturated;
    e.total = e.quadratic - e.frakF / (4.0 * pi);
  }
  return g;
}

GridField EnergyFunctional::residual_field(std::span<const double> u) const {
  std::vector<double> g = gradient(u);
  const auto w = grid_->weights();
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = w[k] > 0.0 ? g[k] / w[k] : 0.0;
  return GridField(grid_, std::move(g));
}

std::pair<double, double> EnergyFunctional::convolution_pairings(std::span<const double> u) const {
  bool saturated = false;
  const auto F = densities(u, false, saturated);
  const auto f = densities(u, true, saturated);
  const auto w = grid_->weights();
  std::vector<double> m(u.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = w[k] * F[k];
  const auto pot = kernel_->apply(m);
  double with_f = 0.0, with_F = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double phi = pot.near[k] - pot.far[k];
    with_f += w[k] * phi * u[k] * f[k];
    with_F += w[k] * phi * F[k];
  }
  return {with_f, with_F};
}

FrakValues frak_functionals(const GridField& u, const NonlinearitySpec& spec) {
  return EnergyFunctional(u.grid_ptr(), spec, PeriodicProfile{}).frak(u.values());
}

EnergyBreakdown energy_IV(const GridField& u, const NonlinearitySpec& spec,
                          const PeriodicProfile& potential) {
  return EnergyFunctional(u.grid_ptr(), spec, potential).energy(u.values());
}

GridField energy_gradient(const GridField& u, const NonlinearitySpec& spec,
                          const PeriodicProfile& potential) {
  return EnergyFunctional(u.grid_ptr(), spec, potential).residual_field(u.values());
}

// ---------------------------------------------------------------------------

double moser_profile(int n, double rho, double r) {
  const double ln = std::log(static_cast<double>(n));
  if (r <= rho / n) return std::sqrt(ln / (2.0 * pi));
  if (r >= rho) return 0.0;
  return std::log(rho / r) / std::sqrt(2.0 * pi * ln);
}

GridPtr moser_grid(int n, double rho, double radius, int resolution) {
  if (n < 2) fail(ErrorKind::invalid_parameter, "Moser index must be at least 2");
  if (!(rho > 0.0 && rho <= 0.5)) fail(ErrorKind::invalid_parameter, "rho must lie in (0, 1/2]");
  const double bps[] = {rho / n, rho};
  return build_radial_grid(radius, resolution, bps);
}

double moser_delta_closed_form(int n, double rho, double q, double v_rho) {
  const double fq = std::floor(q);
  const double combinatorial =
      std::tgamma(fq + 1.0) / std::pow(2.0, fq - 1.0) * (1.0 + (fq + 1.0) / 2.0);
  const double bracket =
      v_rho + std::pow(2.0 * pi, 2.0 / q - 1.0) * std::pow(std::log1p(rho), 2.0 / q) * combinatorial;
  return rho * rho / (4.0 * std::log(static_cast<double>(n))) * bracket;
}

MoserField moser_cap(int n, double rho, const GridPtr& grid, bool normalize, double q,
                     const PeriodicProfile& potential) {
  if (n < 2) fail(ErrorKind::invalid_parameter, "Moser index must be at least 2");
  if (!(rho > 0.0 && rho <= 0.5)) fail(ErrorKind::invalid_parameter, "rho must lie in (0, 1/2]");
  const double inner = rho / n;
  std::size_t plateau_nodes = 0;
  for (double r : grid->radii())
    if (r <= inner * (1.0 + 1e-12)) ++plateau_nodes;
  if (plateau_nodes < 4)
    fail(ErrorKind::resolution_failure, "grid has fewer than 4 nodes inside the Moser plateau");
  MoserField out{MoserCap{}, GridField::sample_radial(grid, [&](double r) {
                   return moser_profile(n, rho, r);
                 })};
  out.cap.n = n;
  out.cap.rho = rho;
  out.cap.plateau = std::sqrt(std::log(static_cast<double>(n)) / (2.0 * pi));
  out.cap.delta_n = moser_delta_closed_form(n, rho, q, potential.max_on_disc(rho));
  if (normalize) {
    out.cap.normalized = true;
    out.field = out.field.scaled(1.0 / std::sqrt(1.0 + out.cap.delta_n));
  }
  return out;
}

MoserDelta moser_delta_n(int n, double rho, double q, const PeriodicProfile& potential,
                         int resolution) {
  MoserDelta out;
  out.v_rho = potential.max_on_disc(rho);
  out.delta_n = moser_delta_closed_form(n, rho, q, out.v_rho);
  const GridPtr grid = moser_grid(n, rho, rho, resolution);
  const MoserField cap = moser_cap(n, rho, grid, false, q, potential);
  const NormReport nr =
      norm_1qw(cap.field, q, WeightSpec{WeightKind::log_one_plus, {}}, potential);
  out.norm_sq = nr.total_sq;
  out.excess = out.norm_sq - 1.0;
  out.band_upper = out.delta_n + 5.0 / std::log(static_cast<double>(n));
  out.in_band = out.excess >= 0.0 && out.excess <= out.band_upper;
  return out;
}

// ---------------------------------------------------------------------------

RayAnalysis ray_analysis(const EnergyFunctional& functional, const GridField& direction,
                         double t_max, int samples) {
  require_same_grid(functional.grid(), direction.grid());
  if (!(t_max > 1e-3)) fail(ErrorKind::invalid_parameter, "t_max must exceed 1e-3");
  if (samples < 64) fail(ErrorKind::invalid_parameter, "ray analysis needs at least 64 samples");
  bool nonzero = false;
  for (double x : direction.values()) nonzero = nonzero || x != 0.0;
  if (!nonzero) fail(ErrorKind::invalid_parameter, "ray direction must be nonzero");

  const auto u = direction.values();
  std::vector<double> tu(u.size());
  RayAnalysis ray;
  auto energy_at = [&](double t) {
    for (std::size_t k = 0; k < u.size(); ++k) tu[k] = t * u[k];
    const EnergyBreakdown e = functional.energy(tu);
    ray.saturated = ray.saturated || e.saturated;
    return e.total;
  };

  const double lo = 1e-3;
  const double step = std::log(t_max / lo) / (samples - 1);
  for (int k = 0; k < samples; ++k) {
    const double t = k + 1 == samples ? t_max : lo * std::exp(step * k);
    ray.t_samples.push_back(t);
    ray.energy_samples.push_back(energy_at(t));
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(ray.energy_samples.begin(), ray.energy_samples.end()) -
      ray.energy_samples.begin());
  if (best + 1 == ray.t_samples.size())
    fail(ErrorKind::no_interior_max,
         "energy is nondecreasing up to t_max; raise t_max to locate the maximum");

  const double a = best == 0 ? 0.0 : ray.t_samples[best - 1];
  const double b = ray.t_samples[best + 1];
  auto [t_star, neg] = boost::math::tools::brent_find_minima(
      [&](double t) { return -energy_at(t); }, a, b, 50);
  double value = -neg;
  if (value < ray.energy_samples[best]) {
    t_star = ray.t_samples[best];
    value = ray.energy_samples[best];
  } else {
    auto pos = std::lower_bound(ray.t_samples.begin(), ray.t_samples.end(), t_star);
    if (pos == ray.t_samples.end() || *pos != t_star) {
      const auto idx = pos - ray.t_samples.begin();
      ray.t_samples.insert(pos, t_star);
      ray.energy_samples.insert(ray.energy_samples.begin() + idx, value);
    }
  }
  ray.t_star = t_star;
  ray.max_value = *std::max_element(ray.energy_samples.begin(), ray.energy_samples.end());

  const double h = 1e-5 * std::max(1.0, t_star);
  ray.stationarity = (energy_at(t_star + h) - energy_at(t_star - h)) / (2.0 * h);

  for (std::size_t k = 0; k < u.size(); ++k) tu[k] = t_star * u[k];
  const EnergyBreakdown e = functional.energy(tu);
  const auto [with_f, with_F] = functional.convolution_pairings(tu);
  const double norm_v_sq = 2.0 * e.quadratic;  // ||t u||_V^2
  ray.identity_eq_residual = norm_v_sq - with_f / (2.0 * pi);
  ray.identity_ge_residual = norm_v_sq - 1.0 - with_F / (2.0 * pi);
  return ray;
}

RayAnalysis ray_analysis(const GridField& direction, const NonlinearitySpec& spec,
                         const PeriodicProfile& potential, double t_max, int samples) {
  const EnergyFunctional functional(direction.grid_ptr(), spec, potential);
  return ray_analysis(functional, direction, t_max, samples);
}

LevelBound mp_level_upper_bound(const std::vector<GridField>& family, const NonlinearitySpec& spec,
                                const PeriodicProfile& potential, double t_max, int samples) {
  if (family.empty()) fail(ErrorKind::empty_family, "level bound needs at least one direction");
  LevelBound out;
  out.bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      value = ray_analysis(family[i], spec, potential, t_max, samples).max_value;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::no_interior_max) throw;
    }
    out.ray_maxima.push_back(value);
    if (value < out.bound) {
      out.bound = value;
      out.witness = i;
    }
  }
  if (!std::isfinite(out.bound))
    fail(ErrorKind::no_interior_max, "no direction of the family has an interior ray maximum");
  return out;
}

}  // namespace choquard
