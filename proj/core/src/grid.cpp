#include <choquard/grid.hpp>

#include <choquard/errors.hpp>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace choquard {

namespace {

constexpr double pi = std::numbers::pi;

// Integral of sqrt(R^2 - s^2) over [0, x], 0 <= x <= R.
double circle_primitive(double x, double radius) {
  const double r2 = radius * radius;
  const double ratio = std::clamp(x / radius, -1.0, 1.0);
  return 0.5 * (x * std::sqrt(std::max(0.0, r2 - x * x)) + r2 * std::asin(ratio));
}

// Area of [0, x] x [0, y] inside the disc, x, y >= 0.
double quadrant_area(double x, double y, double radius) {
  x = std::min(x, radius);
  y = std::min(y, radius);
  const double knee = std::sqrt(std::max(0.0, radius * radius - y * y));
  if (x <= knee) return x * y;
  return knee * y + circle_primitive(x, radius) - circle_primitive(knee, radius);
}

double corner_area(double x, double y, double radius) {
  const double sx = x < 0.0 ? -1.0 : 1.0;
  const double sy = y < 0.0 ? -1.0 : 1.0;
  return sx * sy * quadrant_area(std::abs(x), std::abs(y), radius);
}

// Weights of int_a^b g(r) 2 pi r dr for g linear on [a, b].
std::array<double, 2> linear_weights(double a, double b) {
  const double h = b - a;
  return {pi * h * (2.0 * a + b) / 3.0, pi * h * (a + 2.0 * b) / 3.0};
}

// Weights of int_a^c g(r) 2 pi r dr for g quadratic through a < m < c. The
// integrand is cubic, so two-point Gauss-Legendre is exact.
std::array<double, 3> quadratic_weights(double a, double m, double c) {
  const double h0 = m - a;
  const double h1 = c - m;
  const double len = c - a;
  std::array<double, 3> w{0.0, 0.0, 0.0};
  const double g = 0.5 / std::sqrt(3.0);
  for (double xi : {0.5 - g, 0.5 + g}) {
    const double x = xi * len;
    const double jac = 0.5 * len * 2.0 * pi * (a + x);
    w[0] += jac * (x - h0) * (x - len) / (h0 * len);
    w[1] += jac * -x * (x - len) / (h0 * h1);
    w[2] += jac * x * (x - h0) / (len * h1);
  }
  return w;
}

void build_cartesian(Grid& g, double radius, int n, std::vector<double>& weights,
                     std::vector<double>& radii, std::vector<Edge>& edges, double& spacing) {
  spacing = 2.0 * radius / n;
  const double h = spacing;
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  weights.assign(count, 0.0);
  radii.assign(count, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x0 = -radius + i * h;
    for (int j = 0; j < n; ++j) {
      const double y0 = -radius + j * h;
      const std::size_t k = g.index(i, j);
      weights[k] = rectangle_disc_area(x0, x0 + h, y0, y0 + h, radius);
      radii[k] = std::hypot(x0 + 0.5 * h, y0 + 0.5 * h);
    }
  }
  // Edge weights average the covered fractions of the two cells, which
  // reduces to the five-point stencil in the interior.
  const double cell = h * h;
  auto link = [&](std::size_t a, std::size_t b) {
    if (weights[a] > 0.0 && weights[b] > 0.0)
      edges.push_back({a, b, 0.5 * (weights[a] + weights[b]) / cell});
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i + 1 < n) link(g.index(i, j), g.index(i + 1, j));
      if (j + 1 < n) link(g.index(i, j), g.index(i, j + 1));
    }
  }
}

std::vector<double> radial_nodes(double radius, int n) {
  const int intervals = n - 1;
  const double target = 10.0 * n;
  // r_k = a (e^{bk} - 1) with r_1 = R / (10 n) and r_{n-1} = R.
  auto excess = [&](double b) { return std::expm1(b * intervals) / std::expm1(b) - target; };
  double lo = 1e-14;
  double hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  auto [b0, b1] = boost::math::tools::bisect(excess, lo, hi,
                                             boost::math::tools::eps_tolerance<double>(52));
  const double b = 0.5 * (b0 + b1);
  const double a = radius / std::expm1(b * intervals);
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) r[k] = a * std::expm1(b * k);
  r.back() = radius;
  return r;
}

std::vector<double> radial_weights(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> w(n, 0.0);
  auto add_linear = [&](std::size_t k) {
    const auto lw = linear_weights(r[k], r[k + 1]);
    w[k] += lw[0];
    w[k + 1] += lw[1];
  };
  // The first interval touches the axis, where profiles are only known to be
  // continuous; the rest is integrated pairwise with quadratic interpolation.
  add_linear(0);
  std::size_t k = 1;
  while (k + 2 < n) {
    const auto qw = quadratic_weights(r[k], r[k + 1], r[k + 2]);
    if (qw[0] > 0.0 && qw[1] > 0.0 && qw[2] > 0.0) {
      for (int m = 0; m < 3; ++m) w[k + m] += qw[m];
    } else {
      add_linear(k);
      add_linear(k + 1);
    }
    k += 2;
  }
  if (k + 1 < n) add_linear(k);
  return w;
}

}  // namespace

std::string_view to_string(GridKind kind) {
  return kind == GridKind::cartesian ? "cartesian" : "radial";
}

GridKind grid_kind_from_string(std::string_view name) {
  if (name == "cartesian") return GridKind::cartesian;
  if (name == "radial") return GridKind::radial;
  fail(ErrorKind::invalid_parameter, "unknown grid kind '" + std::string(name) + "'");
}

double rectangle_disc_area(double x0, double x1, double y0, double y1, double radius) {
  return corner_area(x1, y1, radius) - corner_area(x0, y1, radius) -
         corner_area(x1, y0, radius) + corner_area(x0, y0, radius);
}

Point Grid::node(std::size_t k) const {
  if (kind_ == GridKind::radial) return {radii_[k], 0.0};
  const auto n = static_cast<std::size_t>(resolution_);
  const double i = static_cast<double>(k / n);
  const double j = static_cast<double>(k % n);
  return {-radius_ + (i + 0.5) * spacing_, -radius_ + (j + 0.5) * spacing_};
}

double Grid::measure() const { return pi * radius_ * radius_; }

bool Grid::same_as(const Grid& other) const {
  if (this == &other) return true;
  return kind_ == other.kind_ && radius_ == other.radius_ &&
         resolution_ == other.resolution_ && breakpoints_ == other.breakpoints_;
}

GridPtr build_grid(GridKind kind, double radius, int resolution) {
  if (kind == GridKind::radial) return build_radial_grid(radius, resolution, {});
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail(ErrorKind::invalid_parameter, "domain radius must be positive");
  if (resolution < 8) fail(ErrorKind::invalid_parameter, "resolution must be at least 8");
  std::shared_ptr<Grid> g(new Grid());
  g->kind_ = GridKind::cartesian;
  g->radius_ = radius;
  g->resolution_ = resolution;
  build_cartesian(*g, radius, resolution, g->weights_, g->radii_, g->edges_, g->spacing_);
  return g;
}

GridPtr build_radial_grid(double radius, int resolution, std::span<const double> breakpoints) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail(ErrorKind::invalid_parameter, "domain radius must be positive");
  if (resolution < 8) fail(ErrorKind::invalid_parameter, "resolution must be at least 8");
  std::vector<double> r = radial_nodes(radius, resolution);

  std::vector<double> bps(breakpoints.begin(), breakpoints.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<bool> pinned(r.size(), false);
  for (double p : bps) {
    if (!(p > 0.0) || p > radius)
      fail(ErrorKind::invalid_parameter, "breakpoint outside (0, R]");
    auto it = std::lower_bound(r.begin() + 1, r.end(), p);
    std::size_t k = static_cast<std::size_t>(it - r.begin());
    if (k == r.size()) k = r.size() - 1;
    if (k > 1 && std::abs(r[k - 1] - p) < std::abs(r[k] - p)) --k;
    if (pinned[k])
      fail(ErrorKind::resolution_failure, "two breakpoints share a grid node");
    if (k == r.size() - 1 && p != radius)
      fail(ErrorKind::resolution_failure, "breakpoint too close to the outer radius");
    pinned[k] = true;
    r[k] = p;
  }
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1])) fail(ErrorKind::resolution_failure, "breakpoints collapse the grid");

  std::shared_ptr<Grid> g(new Grid());
  g->kind_ = GridKind::radial;
  g->radius_ = radius;
  g->resolution_ = resolution;
  g->breakpoints_ = std::move(bps);
  g->weights_ = radial_weights(r);
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double dr = r[k + 1] - r[k];
    g->edges_.push_back({k, k + 1, pi * (r[k + 1] + r[k]) / dr});
  }
  g->radii_ = std::move(r);
  return g;
}

GridField::GridField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, ErrorKind::invalid_parameter, "field without grid");
  if (values_.size() != grid_->size())
    fail(ErrorKind::grid_mismatch, "value count differs from node count");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_parameter, "non-finite field value");
}

GridField GridField::zeros(GridPtr grid) { return constant(std::move(grid), 0.0); }

GridField GridField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return GridField(std::move(grid), std::vector<double>(n, value));
}

GridField GridField::sample(GridPtr grid, const std::function<double(Point)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid->node(k));
  return GridField(std::move(grid), std::move(v));
}

GridField GridField::sample_radial(GridPtr grid, const std::function<double(double)>& profile) {
  std::vector<double> v(grid->size());
  const auto r = grid->radii();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = profile(r[k]);
  return GridField(std::move(grid), std::move(v));
}

GridField GridField::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return GridField(grid_, std::move(v));
}

GridField GridField::mapped(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(values_[k]);
  return GridField(grid_, std::move(v));
}

GridField operator+(const GridField& a, const GridField& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> v(a.values_);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += b.values_[k];
  return GridField(a.grid_, std::move(v));
}

GridField operator-(const GridField& a, const GridField& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> v(a.values_);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= b.values_[k];
  return GridField(a.grid_, std::move(v));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) fail(ErrorKind::grid_mismatch, "fields live on different grids");
}

double integrate(const GridField& u) {
  const auto w = u.grid().weights();
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) total += w[k] * u[k];
  return total;
}

double integrate(const GridField& u, const std::function<double(double)>& map) {
  const auto w = u.grid().weights();
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) total += w[k] * map(u[k]);
  return total;
}

double integrate(const GridField& u, const std::function<double(double)>& map,
                 const GridField& weight) {
  require_same_grid(u.grid(), weight.grid());
  const auto w = u.grid().weights();
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) total += w[k] * map(u[k]) * weight[k];
  return total;
}

double dirichlet_energy(const GridField& u) {
  double total = 0.0;
  for (const Edge& e : u.grid().edges()) {
    const double d = u[e.i] - u[e.j];
    total += e.coefficient * d * d;
  }
  return total;
}

void add_stiffness_product(const Grid& grid, std::span<const double> u, std::span<double> out) {
  require(u.size() == grid.size() && out.size() == grid.size(), ErrorKind::grid_mismatch,
          "stiffness product size mismatch");
  for (const Edge& e : grid.edges()) {
    const double flux = e.coefficient * (u[e.i] - u[e.j]);
    out[e.i] += flux;
    out[e.j] -= flux;
  }
}

double inner_product(const GridField& a, const GridField& b) {
  require_same_grid(a.grid(), b.grid());
  const auto w = a.grid().weights();
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) total += w[k] * a[k] * b[k];
  return total;
}

}  // namespace choquard
