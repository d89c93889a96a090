#pragma once

#include <choquard/grid.hpp>

namespace choquard {

/**
 * 1-periodic continuous profile
 *
 *   P(x) = base + amplitude * (sin^2(pi x1) + sin^2(pi x2)) / 2,
 *
 * used for the potential V and the coefficient c of the nonlinearity.
 * amplitude = 0 gives a constant.
 */
struct PeriodicProfile {
  double base = 1.0;
  double amplitude = 0.0;

  double operator()(Point p) const;
  /// Mean over the circle |x| = r: base + amplitude (1 - J0(2 pi r)) / 2.
  double circle_mean(double r) const;
  /// Positive lower bound of P over the plane.
  double floor() const;
  /// max over |x| <= rho.
  double max_on_disc(double rho) const;
  bool is_constant() const { return amplitude == 0.0; }

  /// Throws invalid-parameter unless P is bounded below by a positive constant.
  void validate(const char* name) const;
};

/// Nodal samples; radial grids receive circle means, which is exact for the
/// mass term of radial profiles.
GridField sample_profile(const PeriodicProfile& profile, const GridPtr& grid);

}  // namespace choquard
