#include <choquard/energy.hpp>
#include <choquard/errors.hpp>
#include <choquard/grid.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

using namespace choquard;
using std::numbers::pi;

namespace {
double total_weight(const Grid& g) {
  return std::accumulate(g.weights().begin(), g.weights().end(), 0.0);
}

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::validation;
}
}  // namespace

TEST_CASE("invalid grid parameters") {
  CHECK(kind_of([] { build_grid(GridKind::cartesian, 0.0, 16); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { build_grid(GridKind::radial, 1.0, 0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { build_grid(GridKind::cartesian, -1.0, 16); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("weights sum to the disc area") {
  for (int n : {8, 33, 128}) {
    const auto g = build_grid(GridKind::cartesian, 3.0, n);
    CHECK(total_weight(*g) == doctest::Approx(9.0 * pi).epsilon(1e-12));
    const auto r = build_grid(GridKind::radial, 3.0, n);
    CHECK(total_weight(*r) == doctest::Approx(9.0 * pi).epsilon(1e-12));
  }
}

TEST_CASE("rectangle disc area") {
  CHECK(rectangle_disc_area(-0.1, 0.1, -0.1, 0.1, 1.0) == doctest::Approx(0.04));
  CHECK(rectangle_disc_area(0.0, 1.0, 0.0, 1.0, 1.0) == doctest::Approx(pi / 4.0));
  CHECK(rectangle_disc_area(2.0, 3.0, 0.0, 1.0, 1.0) == 0.0);
  CHECK(rectangle_disc_area(-2.0, 2.0, -2.0, 2.0, 1.0) == doctest::Approx(pi));
}

TEST_CASE("radial nodes are graded and increasing") {
  const auto g = build_grid(GridKind::radial, 5.0, 200);
  const auto r = g->radii();
  CHECK(r.front() == 0.0);
  CHECK(r[1] == doctest::Approx(5.0 / 2000.0));
  CHECK(r.back() == doctest::Approx(5.0));
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] > r[k - 1]);
}

TEST_CASE("breakpoints land on nodes") {
  const double bps[] = {0.01, 0.5};
  const auto g = build_radial_grid(1.0, 256, bps);
  int hits = 0;
  for (double r : g->radii())
    if (r == 0.01 || r == 0.5) ++hits;
  CHECK(hits == 2);
  CHECK(total_weight(*g) == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("gaussian integral on a radial grid") {
  const auto g = build_grid(GridKind::radial, 10.0, 2048);
  const auto u = GridField::sample_radial(g, [](double r) { return std::exp(-r * r); });
  CHECK(std::abs(integrate(u) - pi * (1.0 - std::exp(-100.0))) < 1e-6);
  const auto w = GridField::constant(g, 2.0);
  CHECK(integrate(u, [](double x) { return x; }, w) == doctest::Approx(2.0 * pi).epsilon(1e-8));
}

TEST_CASE("gaussian dirichlet energy") {
  const double expected = pi * (1.0 - 201.0 * std::exp(-200.0));
  const auto g = build_grid(GridKind::radial, 10.0, 2048);
  const auto u = GridField::sample_radial(g, [](double r) { return std::exp(-r * r); });
  CHECK(std::abs(dirichlet_energy(u) - expected) < 1e-4);

  const auto c = build_grid(GridKind::cartesian, 6.0, 256);
  const auto v = GridField::sample(c, [](Point p) { return std::exp(-(p.x * p.x + p.y * p.y)); });
  CHECK(dirichlet_energy(v) == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("moser profile has unit dirichlet energy") {
  const auto g = moser_grid(64, 0.5, 0.5, 2048);
  const auto u = moser_cap(64, 0.5, g).field;
  CHECK(dirichlet_energy(u) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stiffness product is the gradient of half the dirichlet energy") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (GridKind kind : {GridKind::cartesian, GridKind::radial}) {
    const auto g = build_grid(kind, 2.0, 24);
    std::vector<double> u(g->size());
    for (double& x : u) x = d(rng);
    std::vector<double> out(g->size(), 0.0);
    add_stiffness_product(*g, u, out);
    std::vector<double> dir(g->size());
    for (double& x : dir) x = d(rng);
    double analytic = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) analytic += out[k] * dir[k];
    const double h = 1e-5;
    auto energy = [&](double t) {
      std::vector<double> v(u);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += t * dir[k];
      return 0.5 * dirichlet_energy(GridField(g, v));
    };
    CHECK(analytic == doctest::Approx((energy(h) - energy(-h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("dirichlet energy is nonnegative and vanishes on constants") {
  const auto g = build_grid(GridKind::cartesian, 1.0, 16);
  CHECK(dirichlet_energy(GridField::constant(g, 3.0)) == doctest::Approx(0.0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> u(g->size());
    for (double& x : u) x = d(rng);
    CHECK(dirichlet_energy(GridField(g, u)) >= 0.0);
  }
}

TEST_CASE("field contracts") {
  const auto g = build_grid(GridKind::cartesian, 1.0, 8);
  const auto h = build_grid(GridKind::cartesian, 1.0, 16);
  CHECK(kind_of([&] { GridField(g, std::vector<double>(3)); }) == ErrorKind::grid_mismatch);
  std::vector<double> bad(g->size(), 0.0);
  bad[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { GridField(g, bad); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([&] { inner_product(GridField::zeros(g), GridField::zeros(h)); }) ==
        ErrorKind::grid_mismatch);
  CHECK(integrate(GridField::zeros(g)) == 0.0);
  const auto a = GridField::constant(g, 1.5);
  CHECK((a + a)[3] == 3.0);
  CHECK((a - a)[3] == 0.0);
  CHECK((2.0 * a)[3] == 3.0);
}

TEST_CASE("grid kind names round trip") {
  for (GridKind k : {GridKind::cartesian, GridKind::radial})
    CHECK(grid_kind_from_string(to_string(k)) == k);
}
