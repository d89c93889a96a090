#include <choquard/mountain_pass.hpp>

#include <choquard/errors.hpp>
#include <choquard/weighted_spaces.hpp>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace choquard {

namespace {

constexpr double pi = std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm_1qw_sq(const EnergyFunctional& fn, std::span<const double> u) {
  const GridField f(fn.grid_ptr(), std::vector<double>(u.begin(), u.end()));
  return norm_1qw(f, fn.spec().q, WeightSpec{WeightKind::log_one_plus, {}}, fn.potential())
      .total_sq;
}

struct RayMax {
  double t = 0.0;
  double value = 0.0;
  bool saturated = false;
};

// Maximum of t -> I(t w) over [0, t_end], t_end grown until I(t_end w) < 0.
class RayMaximizer {
 public:
  RayMaximizer(const EnergyFunctional& fn, int nodes) : fn_(fn), nodes_(nodes) {}

  double energy(std::span<const double> w, double t, bool* saturated = nullptr) const {
    scratch_.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) scratch_[k] = t * w[k];
    const EnergyBreakdown e = fn_.energy(scratch_);
    if (saturated && e.saturated) *saturated = true;
    return e.total;
  }

  // Throws geometry-failure if no negative endpoint exists below saturation.
  double endpoint(std::span<const double> w, double t_end) const {
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, x);
    if (!(wmax > 0.0)) fail(ErrorKind::geometry_failure, "path direction vanishes");
    const double t_cap = std::sqrt(700.0 / (4.0 * pi)) / wmax;
    t_end = std::min(t_end, t_cap);
    while (energy(w, t_end) >= 0.0) {
      if (t_end >= t_cap) fail(ErrorKind::geometry_failure, "no negative-energy point on the path");
      t_end = std::min(2.0 * t_end, t_cap);
    }
    return t_end;
  }

  RayMax maximize(std::span<const double> w, double t_end) const {
    RayMax best;
    std::vector<double> values(nodes_);
    for (;;) {
      int arg = 0;
      for (int k = 0; k < nodes_; ++k) {
        values[k] = k == 0 ? 0.0 : energy(w, t_end * k / (nodes_ - 1), &best.saturated);
        if (values[k] > values[arg]) arg = k;
      }
      if (arg == 0 || arg == nodes_ - 1) {
        // the maximum sits before the first node or the path is too short
        t_end = arg == 0 ? t_end / (nodes_ - 1) * 2.0 : t_end * 2.0;
        t_end = endpoint(w, t_end);
        if (arg == 0 && t_end < 1e-12) fail(ErrorKind::geometry_failure, "degenerate path");
        continue;
      }
      const double a = t_end * (arg - 1) / (nodes_ - 1);
      const double b = t_end * (arg + 1) / (nodes_ - 1);
      std::uintmax_t iters = 200;
      auto [t, neg] = boost::math::tools::brent_find_minima(
          [&](double s) { return -energy(w, s, &best.saturated); }, a, b, 52, iters);
      best.t = t;
      best.value = -neg;
      if (values[arg] > best.value) {
        best.t = t_end * arg / (nodes_ - 1);
        best.value = values[arg];
      }
      return best;
    }
  }

 private:
  const EnergyFunctional& fn_;
  int nodes_;
  mutable std::vector<double> scratch_;
};

}  // namespace

// ---------------------------------------------------------------------------

struct SobolevMetric::Impl {
  std::vector<std::ptrdiff_t> index;  // node -> active index or -1
  std::size_t nodes = 0;
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
};

SobolevMetric::SobolevMetric(const EnergyFunctional& fn) : impl_(std::make_unique<Impl>()) {
  const Grid& g = fn.grid();
  const auto w = g.weights();
  const auto r = g.radii();
  const auto v = fn.potential_values();
  impl_->nodes = g.size();
  impl_->index.assign(g.size(), -1);
  std::ptrdiff_t active = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (w[k] > 0.0) impl_->index[k] = active++;
  std::vector<Eigen::Triplet<double>> trip;
  for (const Edge& e : g.edges()) {
    const auto i = impl_->index[e.i], j = impl_->index[e.j];
    trip.emplace_back(i, i, e.coefficient);
    trip.emplace_back(j, j, e.coefficient);
    trip.emplace_back(i, j, -e.coefficient);
    trip.emplace_back(j, i, -e.coefficient);
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    if (impl_->index[k] >= 0)
      trip.emplace_back(impl_->index[k], impl_->index[k], w[k] * (v[k] + std::log1p(r[k])));
  impl_->matrix.resize(active, active);
  impl_->matrix.setFromTriplets(trip.begin(), trip.end());
  impl_->factor.compute(impl_->matrix);
  if (impl_->factor.info() != Eigen::Success)
    fail(ErrorKind::non_convergence, "metric factorization failed");
}

SobolevMetric::~SobolevMetric() = default;

std::vector<double> SobolevMetric::solve(std::span<const double> covector) const {
  const auto m = impl_->matrix.rows();
  Eigen::VectorXd rhs(m);
  for (std::size_t k = 0; k < impl_->nodes; ++k)
    if (impl_->index[k] >= 0) rhs[impl_->index[k]] = covector[k];
  const Eigen::VectorXd z = impl_->factor.solve(rhs);
  std::vector<double> out(impl_->nodes, 0.0);
  for (std::size_t k = 0; k < impl_->nodes; ++k)
    if (impl_->index[k] >= 0) out[k] = z[impl_->index[k]];
  return out;
}

double SobolevMetric::dual_norm(std::span<const double> covector) const {
  const auto z = solve(covector);
  return std::sqrt(std::max(0.0, dot(covector, z)));
}

double SobolevMetric::norm(std::span<const double> u) const {
  const auto m = impl_->matrix.rows();
  Eigen::VectorXd x(m);
  for (std::size_t k = 0; k < impl_->nodes; ++k)
    if (impl_->index[k] >= 0) x[impl_->index[k]] = u[k];
  return std::sqrt(std::max(0.0, x.dot(impl_->matrix * x)));
}

// ---------------------------------------------------------------------------

GeometryReport check_mp_geometry(const EnergyFunctional& fn, double rho_sphere,
                                 std::uint64_t seed) {
  if (!(rho_sphere > 0.0)) fail(ErrorKind::invalid_parameter, "sphere radius must be positive");
  const GridPtr& grid = fn.grid_ptr();
  const bool radial = grid->kind() == GridKind::radial;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);

  double delta0 = std::numeric_limits<double>::infinity();
  int probes = 0;
  for (double width : {0.25, 0.5, 1.0, 2.0}) {
    for (int c = 0; c < 3; ++c) {
      const double cx = c == 0 || radial ? 0.0 : shift(rng);
      const double cy = c == 0 || radial ? 0.0 : shift(rng);
      GridField probe = GridField::sample(grid, [&](Point p) {
        const double dx = p.x - cx, dy = p.y - cy;
        return std::exp(-(dx * dx + dy * dy) / (width * width));
      });
      const double n2 = norm_1qw_sq(fn, probe.values());
      probe = probe.scaled(rho_sphere / std::sqrt(n2));
      delta0 = std::min(delta0, fn.energy(probe.values()).total);
      ++probes;
      if (radial) break;
    }
  }
  if (!(delta0 > 0.0))
    fail(ErrorKind::geometry_failure, "energy is not positive on the small sphere");

  GridField bump = GridField::sample(grid, [](Point p) {
    const double s = (p.x * p.x + p.y * p.y) / (0.25 * 0.25);
    return s < 1.0 ? (1.0 - s) * (1.0 - s) : 0.0;
  });
  double bmax = 0.0;
  for (double x : bump.values()) bmax = std::max(bmax, x);
  if (!(bmax > 0.0)) fail(ErrorKind::geometry_failure, "grid does not resolve B_{1/4}");
  const double t_cap = std::sqrt(700.0 / (4.0 * pi)) / bmax;
  double t = 1.0;
  double e = fn.energy(bump.scaled(t).values()).total;
  while (e >= 0.0 && t < t_cap) {
    t = std::min(2.0 * t, t_cap);
    e = fn.energy(bump.scaled(t).values()).total;
  }
  if (!(e < 0.0)) fail(ErrorKind::geometry_failure, "no negative-energy point found");
  GridField witness = bump.scaled(t);
  const double wn = std::sqrt(norm_1qw_sq(fn, witness.values()));
  return GeometryReport{.rho_sphere = rho_sphere,
                        .delta0 = delta0,
                        .probes = probes,
                        .e_witness = std::move(witness),
                        .e_energy = e,
                        .e_norm = wn};
}

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
  if (!(domain_radius > 0.0)) fail(ErrorKind::invalid_parameter, "domain radius must be positive");
  if (resolution < 8) fail(ErrorKind::invalid_parameter, "resolution must be at least 8");
  if (path_nodes < 8) fail(ErrorKind::invalid_parameter, "path needs at least 8 nodes");
  if (!(descent_step > 0.0)) fail(ErrorKind::invalid_parameter, "descent step must be positive");
  if (max_iterations < 1) fail(ErrorKind::invalid_parameter, "iteration budget must be positive");
  if (!(residual_tolerance > 0.0)) fail(ErrorKind::invalid_parameter, "tolerance must be positive");
  if (!(rho_sphere > 0.0)) fail(ErrorKind::invalid_parameter, "sphere radius must be positive");
  spec.validate();
  potential.validate("V");
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::budget_exhausted: return "budget-exhausted";
    case SolverStatus::level_out_of_window: return "level-out-of-window";
    case SolverStatus::stalled: return "stalled";
  }
  return "unknown";
}

SolverResult solve_mountain_pass(const SolverConfig& config) {
  config.validate();
  const GridPtr grid = build_grid(config.grid_kind, config.domain_radius, config.resolution);
  const EnergyFunctional fn(grid, config.spec, config.potential);
  return solve_mountain_pass(fn, config);
}

SolverResult solve_mountain_pass(const EnergyFunctional& fn, const SolverConfig& config) {
  config.validate();
  GeometryReport geometry = check_mp_geometry(fn, config.rho_sphere, config.seed);
  const GridPtr& grid = fn.grid_ptr();
  const SobolevMetric metric(fn);
  const RayMaximizer rays(fn, config.path_nodes);
  constexpr double armijo = 1e-4;

  // Initial direction: a unit Gaussian; its path runs to a negative point.
  std::vector<double> w(grid->size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Point p = grid->node(k);
    w[k] = grid->active(k) ? std::exp(-(p.x * p.x + p.y * p.y)) : 0.0;
  }
  double t_end = rays.endpoint(w, 1.0);
  RayMax peak = rays.maximize(w, t_end);

  SolverResult res{.field = GridField::zeros(grid), .ps_trace = {}, .fields = {}, .geometry = std::move(geometry)};
  auto scaled = [](std::span<const double> x, double t) {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v *= t;
    return y;
  };

  std::vector<double> u = scaled(w, peak.t);
  std::vector<double> g = fn.gradient(u);
  std::vector<double> z = metric.solve(g);
  double residual = std::sqrt(std::max(0.0, dot(g, z)));
  double tau = config.descent_step;
  res.saturated = peak.saturated;
  res.ps_trace.push_back({peak.value, residual, 0.0});
  res.fields.emplace_back(grid, u);
  res.status = SolverStatus::budget_exhausted;

  int it = 0;
  while (residual > config.residual_tolerance) {
    if (it >= config.max_iterations) break;
    ++it;
    const double decrease = dot(g, z);
    bool accepted = false;
    while (!accepted) {
      std::vector<double> trial(u.size());
      for (std::size_t k = 0; k < u.size(); ++k) trial[k] = std::max(0.0, u[k] - tau * z[k]);
      RayMax trial_peak;
      bool valid = true;
      try {
        trial_peak = rays.maximize(trial, rays.endpoint(trial, 2.0));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::geometry_failure) throw;
        valid = false;
      }
      if (valid && trial_peak.value <= peak.value - armijo * tau * decrease) {
        peak = trial_peak;
        u = scaled(trial, peak.t);
        accepted = true;
        res.saturated = res.saturated || peak.saturated;
        tau = std::min(1.5 * tau, 4.0 * config.descent_step);
      } else {
        tau *= 0.5;
        if (tau < 1e-14 * config.descent_step) break;
      }
    }
    if (!accepted) {
      res.status = SolverStatus::stalled;
      break;
    }
    g = fn.gradient(u);
    z = metric.solve(g);
    residual = std::sqrt(std::max(0.0, dot(g, z)));
    res.ps_trace.push_back({peak.value, residual, tau});
    res.fields.emplace_back(grid, u);
  }
  res.iterations = it;
  res.field = GridField(grid, u);
  // certificate recomputed from scratch on the final field
  const std::vector<double> g_final = fn.gradient(res.field.values());
  res.residual = metric.dual_norm(g_final);
  res.level = fn.energy(res.field.values()).total;
  if (res.residual <= config.residual_tolerance) res.status = SolverStatus::converged;
  if (!(res.level > 0.0 && res.level < 0.5)) res.status = SolverStatus::level_out_of_window;

  res.vanishing_indicator = vanishing_check(res.field, 1.0).value;
  if (grid->kind() == GridKind::cartesian) {
    const double cells = 1.0 / grid->spacing();
    if (std::abs(cells - std::round(cells)) < 1e-9)
      res.recentering_shift = recenter(res.field).shift;
  }
  return res;
}

WeakResidual weak_residual_check(const EnergyFunctional& fn, const GridField& u, int directions,
                                 std::uint64_t seed) {
  require_same_grid(fn.grid(), u.grid());
  if (directions < 1) fail(ErrorKind::invalid_parameter, "need at least one test direction");
  const Grid& grid = fn.grid();
  const SobolevMetric metric(fn);
  const std::vector<double> g = fn.gradient(u.values());
  std::mt19937_64 rng(seed);
  const double span = std::min(grid.radius(), 4.0);
  std::uniform_real_distribution<double> centre(-0.5 * span, 0.5 * span);
  std::uniform_real_distribution<double> width(0.25, 2.0);
  WeakResidual out;
  out.directions = directions;
  std::vector<double> phi(grid.size());
  for (int d = 0; d < directions; ++d) {
    const double cx = centre(rng), cy = grid.kind() == GridKind::radial ? 0.0 : centre(rng);
    const double wx = width(rng);
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const Point p = grid.node(k);
      const double dx = grid.kind() == GridKind::radial ? p.x : p.x - cx;
      phi[k] = grid.active(k) ? std::exp(-(dx * dx + (p.y - cy) * (p.y - cy)) / (wx * wx)) : 0.0;
    }
    const double nrm = metric.norm(phi);
    if (!(nrm > 0.0)) continue;
    out.max_pairing = std::max(out.max_pairing, std::abs(dot(g, phi)) / nrm);
  }
  return out;
}

// ---------------------------------------------------------------------------

PsReport ps_diagnostics(const EnergyFunctional& fn, const std::vector<GridField>& trace,
                        double margin, int alpha_count) {
  if (trace.empty()) fail(ErrorKind::invalid_parameter, "ps_diagnostics needs a nonempty trace");
  PsReport rep;
  for (const GridField& u : trace) {
    require_same_grid(fn.grid(), u.grid());
    const EnergyBreakdown e = fn.energy(u.values());
    rep.sup_norm_V = std::max(rep.sup_norm_V, std::sqrt(2.0 * e.quadratic));
    rep.sup_frakF = std::max(rep.sup_frakF, std::abs(e.frakF));
    rep.sup_pairing = std::max(rep.sup_pairing, std::abs(fn.convolution_pairings(u.values()).first));
    rep.levels.push_back(e.total);
  }
  rep.level_limit = rep.levels.back();
  const double c = rep.level_limit;
  rep.alpha_window = c > 0.0 ? 1.0 / (2.0 * c) : std::numeric_limits<double>::infinity();
  const double top = c > 0.0 ? rep.alpha_window - margin : 2.0;
  if (top > 1.0) {
    for (int a = 0; a < alpha_count; ++a)
      rep.alphas.push_back(1.0 + (top - 1.0) * a / std::max(1, alpha_count));
  }
  const double probe = std::min(1.2, c > 0.0 ? 0.9 * rep.alpha_window : 1.2);
  if (std::find(rep.alphas.begin(), rep.alphas.end(), probe) == rep.alphas.end())
    rep.alphas.push_back(probe);
  std::sort(rep.alphas.begin(), rep.alphas.end());

  const auto w = fn.grid().weights();
  const auto cv = fn.c_values();
  const std::size_t tail_begin = trace.size() - std::max<std::size_t>(1, trace.size() / 4);
  for (double alpha : rep.alphas) {
    std::vector<double> vals;
    for (const GridField& u : trace) {
      double s = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= 0.0) continue;
        const double F = cv[k] * eval_F(fn.spec(), std::abs(u[k]));
        if (F > 0.0) s += w[k] * std::pow(F, alpha);
      }
      vals.push_back(s);
    }
    const auto [lo, hi] = std::minmax_element(vals.begin() + tail_begin, vals.end());
    rep.tail_spread.push_back(*lo > 0.0 ? *hi / *lo - 1.0 : (*hi > 0.0 ? HUGE_VAL : 0.0));
    rep.integrals.push_back(std::move(vals));
  }
  return rep;
}

VanishingReport vanishing_check(const GridField& u, double r) {
  if (!(r > 0.0)) fail(ErrorKind::invalid_parameter, "vanishing radius must be positive");
  const Grid& g = u.grid();
  const auto w = g.weights();
  const int span = static_cast<int>(std::floor(g.radius()));
  VanishingReport best;
  best.value = -1.0;
  for (int cx = -span; cx <= span; ++cx) {
    for (int cy = -span; cy <= span; ++cy) {
      if (cx * cx + cy * cy > g.radius() * g.radius()) continue;
      double mass = 0.0;
      if (g.kind() == GridKind::cartesian) {
        for (std::size_t k = 0; k < w.size(); ++k) {
          if (w[k] <= 0.0) continue;
          const Point p = g.node(k);
          if (std::hypot(p.x - cx, p.y - cy) <= r) mass += w[k] * u[k] * u[k];
        }
      } else {
        // fraction of the circle |x| = s inside B_r(y)
        const double d = std::hypot(double(cx), double(cy));
        const auto rad = g.radii();
        for (std::size_t k = 0; k < w.size(); ++k) {
          const double s = rad[k];
          double frac = 0.0;
          if (d == 0.0 || s == 0.0) {
            frac = std::max(s, d) <= r ? 1.0 : 0.0;
          } else {
            const double c = (s * s + d * d - r * r) / (2.0 * s * d);
            frac = std::acos(std::clamp(c, -1.0, 1.0)) / pi;
          }
          mass += frac * w[k] * u[k] * u[k];
        }
      }
      if (mass > best.value) best = {mass, {cx, cy}};
    }
  }
  return best;
}

RecenterResult shift_field(const GridField& u, std::array<int, 2> shift) {
  const Grid& g = u.grid();
  if (g.kind() != GridKind::cartesian) {
    if (shift[0] != 0 || shift[1] != 0)
      fail(ErrorKind::unsupported_grid, "radial profiles cannot be translated");
    return {u, shift, 0.0};
  }
  const double cells = 1.0 / g.spacing();
  if (std::abs(cells - std::round(cells)) > 1e-9)
    fail(ErrorKind::unsupported_grid, "integer shifts need an integral number of cells per unit");
  const int m = static_cast<int>(std::round(cells));
  const int n = g.resolution();
  const auto w = g.weights();
  std::vector<double> out(g.size(), 0.0);
  double total = 0.0, kept = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = g.index(i, j);
      total += w[k] * u[k] * u[k];
      const int ti = i + shift[0] * m;
      const int tj = j + shift[1] * m;
      if (ti < 0 || tj < 0 || ti >= n || tj >= n) continue;
      const std::size_t t = g.index(ti, tj);
      if (w[t] <= 0.0) continue;
      out[t] = u[k];
      kept += w[t] * u[k] * u[k];
    }
  }
  return {GridField(u.grid_ptr(), std::move(out)), shift, std::max(0.0, total - kept)};
}

RecenterResult recenter(const GridField& u) {
  if (u.grid().kind() == GridKind::radial) return {u, {0, 0}, 0.0};
  const VanishingReport peak = vanishing_check(u, 1.0);
  return shift_field(u, {-peak.center[0], -peak.center[1]});
}

}  // namespace choquard
