#include <choquard/periodic_profile.hpp>

#include <choquard/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace choquard {

namespace {
constexpr double pi = std::numbers::pi;

double bump(Point p) {
  const double sx = std::sin(pi * p.x);
  const double sy = std::sin(pi * p.y);
  return 0.5 * (sx * sx + sy * sy);
}
}  // namespace

double PeriodicProfile::operator()(Point p) const { return base + amplitude * bump(p); }

double PeriodicProfile::circle_mean(double r) const {
  if (amplitude == 0.0) return base;
  return base + amplitude * 0.5 * (1.0 - std::cyl_bessel_j(0.0, 2.0 * pi * r));
}

double PeriodicProfile::floor() const { return base + std::min(0.0, amplitude); }

double PeriodicProfile::max_on_disc(double rho) const {
  if (amplitude == 0.0) return base;
  // sin^2 is radially increasing on the disc when rho <= 1/2, but rho may be
  // larger in diagnostics, so scan polar samples.
  constexpr int radial = 256;
  constexpr int angular = 512;
  double best = -HUGE_VAL;
  for (int i = 0; i <= radial; ++i) {
    const double r = rho * i / radial;
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * pi * j / angular;
      best = std::max(best, (*this)({r * std::cos(th), r * std::sin(th)}));
    }
  }
  return best;
}

void PeriodicProfile::validate(const char* name) const {
  if (!std::isfinite(base) || !std::isfinite(amplitude) || !(floor() > 0.0))
    fail(ErrorKind::invalid_parameter,
         std::string(name) + " must be bounded below by a positive constant");
}

GridField sample_profile(const PeriodicProfile& profile, const GridPtr& grid) {
  if (grid->kind() == GridKind::radial)
    return GridField::sample_radial(grid, [&](double r) { return profile.circle_mean(r); });
  return GridField::sample(grid, [&](Point p) { return profile(p); });
}

}  // namespace choquard
