#include <choquard/weighted_spaces.hpp>

#include <choquard/errors.hpp>

#include <math.h>  // boost 1.74 pchip calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace choquard {

namespace {

constexpr double e_const = std::numbers::e;

double lq_mass(const GridField& u, double q, const GridField& w) {
  const auto cw = u.grid().weights();
  double total = 0.0;
  for (std::size_t k = 0; k < cw.size(); ++k) {
    if (cw[k] <= 0.0) continue;
    const double a = std::abs(u[k]);
    total += cw[k] * (q == 2.0 ? a * a : std::pow(a, q)) * w[k];
  }
  return total;
}

void require_radial(const GridField& u) {
  if (u.grid().kind() != GridKind::radial)
    fail(ErrorKind::grid_mismatch, "radial profile expected");
}

GridField resample(const std::vector<double>& abscissae, std::span<const double> values,
                   const GridPtr& target, const std::function<double(double)>& to_source) {
  std::vector<double> x(abscissae);
  std::vector<double> y(values.begin(), values.end());
  const double lo = x.front();
  const double hi = x.back();
  boost::math::interpolators::pchip<std::vector<double>> spline(std::move(x), std::move(y));
  const auto r = target->radii();
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    out[k] = spline(std::clamp(to_source(r[k]), lo, hi));
  return GridField(target, std::move(out));
}

}  // namespace

double radial_map_T(double r) {
  if (!(r >= 0.0)) fail(ErrorKind::domain_error, "T is defined for r >= 0");
  return r * std::sqrt(std::log(e_const + r));
}

double radial_map_T_prime(double r) {
  if (!(r >= 0.0)) fail(ErrorKind::domain_error, "T' is defined for r >= 0");
  const double l = std::log(e_const + r);
  return (2.0 * l + r / (e_const + r)) / (2.0 * std::sqrt(l));
}

double radial_map_T_inverse(double s) {
  if (!(s >= 0.0)) fail(ErrorKind::domain_error, "T^{-1} is defined for s >= 0");
  if (s == 0.0) return 0.0;
  // T(r) >= r, so the root lies in [0, s].
  double lo = 0.0;
  double hi = s;
  double r = s / std::sqrt(std::log(e_const + s));
  for (int it = 0; it < 200; ++it) {
    const double g = radial_map_T(r) - s;
    if (g == 0.0) return r;
    if (g > 0.0) hi = r; else lo = r;
    double next = r - g / radial_map_T_prime(r);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 2.0 * std::numeric_limits<double>::epsilon() * r) {
      r = next;
      break;
    }
    r = next;
  }
  // settle on the neighbouring double with the smallest residual
  double best = r, best_g = std::abs(radial_map_T(r) - s);
  for (double c = r, step = 0; step < 4; ++step) {
    c = std::nextafter(c, 0.0);
    if (const double g = std::abs(radial_map_T(c) - s); g < best_g) best = c, best_g = g;
  }
  for (double c = r, step = 0; step < 4; ++step) {
    c = std::nextafter(c, HUGE_VAL);
    if (const double g = std::abs(radial_map_T(c) - s); g < best_g) best = c, best_g = g;
  }
  if (best_g <= 1e-12 * (1.0 + s)) return best;
  fail(ErrorKind::non_convergence, "T^{-1} did not converge");
}

double WeightSpec::operator()(Point x) const {
  const double r = std::hypot(x.x, x.y);
  switch (kind) {
    case WeightKind::log_e_weight: return std::log(e_const + r);
    case WeightKind::log_one_plus: return std::log1p(r);
    case WeightKind::potential_V: return potential(x);
  }
  return 0.0;
}

GridField sample_weight(const WeightSpec& weight, const GridPtr& grid) {
  if (weight.kind == WeightKind::potential_V) return sample_profile(weight.potential, grid);
  return GridField::sample_radial(grid, [&](double r) { return weight({r, 0.0}); });
}

NormReport norm_1qw(const GridField& u, double q, const WeightSpec& lq_weight,
                    const std::optional<PeriodicProfile>& potential) {
  if (!(q >= 2.0)) fail(ErrorKind::invalid_parameter, "q must be at least 2");
  NormReport rep;
  rep.q_exponent = q;
  rep.dirichlet = dirichlet_energy(u);
  if (potential) {
    const GridField v = sample_profile(*potential, u.grid_ptr());
    rep.potential_mass = lq_mass(u, 2.0, v);
  }
  rep.weighted_mass = lq_mass(u, q, sample_weight(lq_weight, u.grid_ptr()));
  rep.total_sq = rep.dirichlet + rep.potential_mass + std::pow(rep.weighted_mass, 2.0 / q);
  return rep;
}

double norm_w0_sq(const GridField& u, double q) {
  return norm_1qw(u, q, WeightSpec{WeightKind::log_e_weight, {}}, std::nullopt).total_sq;
}

GridField transform_to_unweighted(const GridField& u) {
  require_radial(u);
  const Grid& g = u.grid();
  std::vector<double> image_bps;
  for (double b : g.breakpoints()) image_bps.push_back(radial_map_T(b));
  GridPtr image = build_radial_grid(radial_map_T(g.radius()), g.resolution(), image_bps);
  std::vector<double> s(g.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = radial_map_T(g.radii()[k]);
  return resample(s, u.values(), image, [](double sv) { return sv; });
}

GridField transform_from_unweighted(const GridField& v, const GridPtr& target) {
  require_radial(v);
  if (target->kind() != GridKind::radial)
    fail(ErrorKind::grid_mismatch, "radial target grid expected");
  const auto s = v.grid().radii();
  return resample(std::vector<double>(s.begin(), s.end()), v.values(), target,
                  [](double r) { return radial_map_T(r); });
}

TmValue tm_functional(const GridField& u, double alpha, bool weighted) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_parameter, "alpha must be positive");
  const auto w = u.grid().weights();
  const auto r = u.grid().radii();
  TmValue out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0) continue;
    double ex = alpha * u[k] * u[k];
    if (ex > exponent_cap) {
      ex = exponent_cap;
      out.saturated = true;
    }
    const double weight = weighted ? std::log(e_const + r[k]) : 1.0;
    out.value += w[k] * std::expm1(ex) * weight;
  }
  return out;
}

TmValue tm_functional_q(const GridField& u, double alpha,
                        const std::function<double(double)>& growth) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_parameter, "alpha must be positive");
  const auto w = u.grid().weights();
  const auto r = u.grid().radii();
  const double s_cap = std::sqrt(exponent_cap / (4.0 * std::numbers::pi));
  TmValue out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0) continue;
    double s = alpha * std::abs(u[k]);
    if (s > s_cap) {
      s = s_cap;
      out.saturated = true;
    }
    out.value += w[k] * growth(s) * std::log(e_const + r[k]);
  }
  return out;
}

SupSearchResult tm_sup_search(const std::vector<FamilyMember>& family, double alpha,
                              NormConstraint constraint, bool weighted) {
  if (family.empty()) fail(ErrorKind::empty_family, "tm_sup_search needs at least one field");
  SupSearchResult res;
  res.best_value = -HUGE_VAL;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const GridField& u = family[i].field;
    double norm_sq = 0.0;
    if (constraint == NormConstraint::w0) {
      norm_sq = norm_w0_sq(u);
    } else {
      norm_sq = dirichlet_energy(u) + integrate(u, [](double s) { return s * s; });
    }
    TmValue tv;
    if (norm_sq > 0.0) tv = tm_functional(u.scaled(1.0 / std::sqrt(norm_sq)), alpha, weighted);
    res.values.push_back(tv.value);
    res.saturated.push_back(tv.saturated);
    if (tv.value > res.best_value) {
      res.best_value = tv.value;
      res.best_index = i;
      res.best_label = family[i].label;
      res.best_parameter = family[i].parameter;
    }
  }
  return res;
}

}  // namespace choquard
