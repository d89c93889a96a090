#include <choquard/errors.hpp>
#include <choquard/mountain_pass.hpp>
#include <choquard/weighted_spaces.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace choquard;

namespace {

GridField bump_at(const GridPtr& g, double cx, double cy, double a = 0.8, double h = 1.0) {
  return GridField::sample(g, [=](Point p) {
    const double s = ((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy)) / (a * a);
    return s < 1.0 ? h * (1 - s) * (1 - s) : 0.0;
  });
}

SolverConfig small_config() {
  SolverConfig c;
  c.domain_radius = 4.0;
  c.resolution = 48;
  c.spec = NonlinearitySpec::exp_minus_one();
  return c;
}

}  // namespace

TEST_CASE("geometry for the exponential family") {
  const auto g = build_grid(GridKind::cartesian, 4.0, 64);
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const auto geo = check_mp_geometry(fn, 1e-2);
  CHECK(geo.delta0 > 0.0);
  CHECK(geo.e_energy < 0.0);
  CHECK(fn.energy(geo.e_witness.values()).total == doctest::Approx(geo.e_energy));
  for (std::size_t k = 0; k < g->size(); ++k) {
    const Point p = g->node(k);
    if (std::hypot(p.x, p.y) >= 0.25) REQUIRE(geo.e_witness[k] == 0.0);
  }
}

TEST_CASE("zero nonlinearity has no mountain pass") {
  const auto g = build_grid(GridKind::cartesian, 4.0, 32);
  const EnergyFunctional fn(g, NonlinearitySpec::zero(), {});
  try {
    check_mp_geometry(fn, 1e-2);
    FAIL("expected geometry failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::geometry_failure);
  }
}

TEST_CASE("solver config validation") {
  auto c = small_config();
  c.path_nodes = 4;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.residual_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.potential = {-1.0, 0.0};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("solver on a small grid") {
  const auto c = small_config();
  const auto g = build_grid(c.grid_kind, c.domain_radius, c.resolution);
  const EnergyFunctional fn(g, c.spec, c.potential);
  const auto r = solve_mountain_pass(fn, c);
  CHECK(r.status == SolverStatus::converged);
  CHECK(r.residual <= c.residual_tolerance);
  CHECK(r.residual >= 0.0);
  CHECK(r.level > 0.0);
  CHECK(r.level < 0.5);
  for (double x : r.field.values()) REQUIRE(x >= 0.0);

  // certificate recomputed on the returned field
  const SobolevMetric metric(fn);
  CHECK(std::abs(metric.dual_norm(fn.gradient(r.field.values())) - r.residual) <= 1e-10);
  CHECK(std::abs(fn.energy(r.field.values()).total - r.level) <= 1e-12);

  for (std::size_t k = 1; k < r.ps_trace.size(); ++k) CHECK(r.ps_trace[k].level <= r.ps_trace[k - 1].level);
  CHECK(r.fields.size() == r.ps_trace.size());
  CHECK(weak_residual_check(fn, r.field, 20, 1).max_pairing <= c.residual_tolerance);

  const auto again = solve_mountain_pass(fn, c);
  CHECK(again.level == r.level);
  CHECK(again.iterations == r.iterations);
}

TEST_CASE("iteration budget") {
  auto c = small_config();
  c.max_iterations = 1;
  c.residual_tolerance = 1e-12;
  const auto r = solve_mountain_pass(c);
  CHECK(r.status == SolverStatus::budget_exhausted);
  CHECK(r.iterations == 1);
}

TEST_CASE("metric norms") {
  const auto g = build_grid(GridKind::cartesian, 2.0, 24);
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const SobolevMetric m(fn);
  const auto u = bump_at(g, 0.0, 0.0);
  const auto n = norm_1qw(u, 2.0, {WeightKind::log_one_plus, {}}, PeriodicProfile{});
  CHECK(m.norm(u.values()) == doctest::Approx(std::sqrt(n.total_sq)).epsilon(1e-10));
  // g = G u  =>  |g|_* = |u|_G
  std::vector<double> cov(g->size(), 0.0);
  const auto z = m.solve(cov);
  for (double x : z) CHECK(x == 0.0);
}

TEST_CASE("vanishing check") {
  const auto g = build_grid(GridKind::cartesian, 8.0, 128);
  CHECK(vanishing_check(GridField::zeros(g), 1.0).value == 0.0);
  const auto u = bump_at(g, 0.0, 0.0, 0.9);
  const double l2 = integrate(u, [](double x) { return x * x; });
  CHECK(vanishing_check(u, 1.0).value == doctest::Approx(l2));
  const auto v = bump_at(g, 5.0, 5.0, 0.9);
  const auto rep = vanishing_check(v, 1.0);
  CHECK(rep.center[0] == 5);
  CHECK(rep.center[1] == 5);
  CHECK_THROWS_AS(vanishing_check(u, 0.0), Error);
}

TEST_CASE("radial vanishing check") {
  const auto g = build_grid(GridKind::radial, 6.0, 256);
  const auto u = GridField::sample_radial(g, [](double r) { return r < 0.9 ? std::pow(1 - r * r / 0.81, 2) : 0.0; });
  const double l2 = integrate(u, [](double x) { return x * x; });
  CHECK(vanishing_check(u, 1.0).value == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("recentering") {
  const auto g = build_grid(GridKind::cartesian, 8.0, 128);
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), PeriodicProfile{1.0, 0.5});
  const auto centred = recenter(bump_at(g, 0.0, 0.0, 0.8, 0.3));
  CHECK(centred.shift == std::array<int, 2>{0, 0});

  const auto u = bump_at(g, 3.0, 0.0, 0.8, 0.3);
  const auto r = recenter(u);
  CHECK(r.shift == std::array<int, 2>{-3, 0});
  CHECK(r.truncated_mass == 0.0);
  const double e0 = fn.energy(u.values()).total;
  CHECK(std::abs(fn.energy(r.field.values()).total - e0) <= 1e-8 * (1 + std::abs(e0)));

  const auto s = shift_field(bump_at(g, 0.0, 0.0, 0.8, 0.3), {1, 0});
  const double a = fn.energy(bump_at(g, 0.0, 0.0, 0.8, 0.3).values()).total;
  CHECK(std::abs(fn.energy(s.field.values()).total - a) <= 1e-8 * (1 + std::abs(a)));

  const auto edge = shift_field(bump_at(g, 7.0, 0.0, 0.8, 0.3), {2, 0});
  CHECK(edge.truncated_mass > 0.0);

  const auto odd = build_grid(GridKind::cartesian, 8.0, 100);
  CHECK_THROWS_AS(shift_field(GridField::zeros(odd), {1, 0}), Error);
}

TEST_CASE("ps diagnostics on a zero trace") {
  const auto g = build_grid(GridKind::cartesian, 2.0, 16);
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const auto r = ps_diagnostics(fn, {GridField::zeros(g), GridField::zeros(g)});
  CHECK(r.sup_norm_V == 0.0);
  CHECK(r.sup_frakF == 0.0);
  CHECK(r.sup_pairing == 0.0);
  for (const auto& row : r.integrals)
    for (double x : row) CHECK(x == 0.0);
  CHECK_THROWS_AS(ps_diagnostics(fn, {}), Error);
}

TEST_CASE("ps window at level 0.1") {
  const auto g = build_grid(GridKind::cartesian, 4.0, 48);
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const auto w = bump_at(g, 0.0, 0.0, 1.0, 1.0);
  // the ray peaks near t = 0.3 at about 0.14; bisect on the rising part
  double lo = 0.0, hi = 0.3;
  REQUIRE(fn.energy(w.scaled(hi).values()).total > 0.1);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (fn.energy(w.scaled(mid).values()).total < 0.1 ? lo : hi) = mid;
  }
  const auto u = w.scaled(0.5 * (lo + hi));
  const auto r = ps_diagnostics(fn, {u, u, u, u});
  CHECK(r.level_limit == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(r.alpha_window == doctest::Approx(5.0).epsilon(1e-9));
  bool has = false;
  for (std::size_t a = 0; a < r.alphas.size(); ++a) {
    if (r.alphas[a] == 1.2) {
      has = true;
      CHECK(std::isfinite(r.integrals[a].back()));
      CHECK(r.tail_spread[a] == 0.0);
    }
    CHECK(r.alphas[a] >= 1.0);
    CHECK(r.alphas[a] < r.alpha_window);
  }
  CHECK(has);
}
