#include <choquard/commands.hpp>

#include <choquard/energy.hpp>
#include <choquard/errors.hpp>
#include <choquard/field_io.hpp>
#include <choquard/log_kernel.hpp>
#include <choquard/mountain_pass.hpp>
#include <choquard/nonlinearity.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace choquard {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::invalid_parameter:
    case ErrorKind::exponent_mismatch:
    case ErrorKind::negative_input:
    case ErrorKind::empty_family:
    case ErrorKind::unsupported_grid:
    case ErrorKind::grid_mismatch:
      return exit_validation;
    case ErrorKind::geometry_failure:
    case ErrorKind::no_interior_max:
    case ErrorKind::division_by_zero:
    case ErrorKind::domain_error:
      return exit_admissibility;
    case ErrorKind::non_convergence:
    case ErrorKind::quadrature_failure:
    case ErrorKind::resolution_failure:
      return exit_budget;
  }
  return exit_validation;
}

namespace {

constexpr double pi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunReport start(const RunConfig& config) {
  config.validate();
  RunReport r;
  r.command = std::string(to_string(config.command));
  r.config = to_json(config);
  r.results = json::object();
  r.diagnostics = json::object();
  return r;
}

void finish(RunReport& r, const RunConfig& config, const Stopwatch& clock) {
  if (config.timings) r.diagnostics["seconds"] = clock.seconds();
}

double v_half(const PeriodicProfile& v) { return v.max_on_disc(0.5); }

}  // namespace

std::vector<FamilyMember> embedding_family(double radius, int resolution,
                                           const std::vector<int>& moser_n) {
  const GridPtr grid = build_grid(GridKind::radial, radius, resolution);
  std::vector<FamilyMember> family;
  for (double s : {0.5, 1.0, 2.0}) {
    family.push_back({"gaussian", s, GridField::sample_radial(grid, [s](double r) {
                        return std::exp(-r * r / (s * s));
                      })});
  }
  for (double a : {0.5, 1.0, 2.0}) {
    family.push_back({"bump", a, GridField::sample_radial(grid, [a](double r) {
                        const double t = 1.0 - r * r / (a * a);
                        return t > 0.0 ? t * t : 0.0;
                      })});
  }
  for (int n : moser_n) {
    const GridPtr mg = moser_grid(n, 0.5, radius, resolution);
    family.push_back({"moser", double(n), moser_cap(n, 0.5, mg).field});
  }
  return family;
}

RunReport cmd_check_assumptions(const RunConfig& config) {
  const Stopwatch clock;
  RunReport r = start(config);
  ScanPlan plan = config.scan;
  plan.v_half = v_half(config.potential);
  const AssumptionReport a = check_assumptions(config.spec, plan);
  r.results = {
      {"f1_ok", a.f1_ok},
      {"f2_ok", a.f2_ok},
      {"f3_ok", a.f3_ok},
      {"f4_ok", a.f4_ok},
      {"ar_ok", a.ar_ok},
      {"envelope_ok", a.envelope_ok},
      {"lower_bound_ok", a.lower_bound_ok},
      {"estG_ok", a.estG_ok},
      {"beta_ok", a.beta_ok},
      {"small_s_exponent", a.small_s_exponent},
      {"growth_exponent", a.growth_exponent},
      {"ratio_min", a.ratio_min},
      {"ratio_max", a.ratio_max},
      {"delta_estimate", a.delta_estimate},
      {"C_estimate", a.C_estimate},
      {"f3_limit_estimate", a.f3_limit_estimate},
      {"f3_error", a.f3_error},
      {"f4_liminf_estimate", a.f4_liminf_estimate},
      {"f4_error", a.f4_error},
      {"f4_diverges", a.f4_diverges},
      {"envelope_constant", a.envelope_constant},
      {"envelope_s0", a.envelope_s0},
      {"epsilon", a.epsilon},
      {"s_epsilon", a.s_epsilon},
      {"script_V", a.script_V},
      {"script_V_argmin", a.script_V_argmin},
      {"v_half", plan.v_half},
      {"sample_range", {a.sample_range.first, a.sample_range.second}},
  };
  r.exit_code = a.all_ok() ? exit_success : exit_admissibility;
  finish(r, config, clock);
  return r;
}

RunReport cmd_verify_embedding(const RunConfig& config) {
  const Stopwatch clock;
  RunReport r = start(config);
  const EmbeddingBlock& e = config.embedding;
  const double q = config.spec.q;

  // pointwise bounds on T at log-spaced radii
  constexpr int points = 10000;
  int chain_a = 0, chain_b = 0;
  double round_trip = 0.0;
  for (int k = 0; k < points; ++k) {
    const double rr = std::pow(10.0, -6.0 + 12.0 * k / (points - 1));
    const double t = radial_map_T(rr), tp = radial_map_T_prime(rr);
    const double ratio = rr * rr / (t * t), inv = 1.0 / (tp * tp);
    if (!(ratio / 3.0 < inv && inv < ratio)) ++chain_a;
    const double ray = rr * rr * tp / t;
    if (!(rr < ray && ray < 2.0 * rr)) ++chain_b;
    round_trip = std::max(round_trip, std::abs(radial_map_T_inverse(t) - rr) / std::max(1.0, rr));
  }
  r.results["transform"] = {{"points", points},
                            {"derivative_chain_violations", chain_a},
                            {"ray_chain_violations", chain_b},
                            {"inverse_round_trip_error", round_trip}};

  const auto family = embedding_family(e.radius, e.resolution, e.moser_n);
  json rows = json::array();
  bool sandwich_ok = true;
  constexpr double slack = 0.02;
  for (const FamilyMember& m : family) {
    const double w0 = norm_w0_sq(m.field);
    const GridField v = transform_to_unweighted(m.field);
    const double h1 = dirichlet_energy(v) + integrate(v, [](double x) { return x * x; });
    const double ratio = h1 / w0;
    const bool ok = ratio > (1.0 - slack) / 3.0 && ratio < 2.0 * (1.0 + slack);
    sandwich_ok = sandwich_ok && ok;
    rows.push_back({{"label", m.label}, {"parameter", m.parameter}, {"w0_sq", w0},
                    {"h1_sq", h1}, {"ratio", ratio}, {"ok", ok}});
  }
  r.results["sandwich"] = rows;

  bool saturated = false;
  json tm = json::array();
  if (q == 2.0) {
    for (double alpha : e.alphas) {
      const SupSearchResult s = tm_sup_search(family, alpha, NormConstraint::w0, true);
      for (bool b : s.saturated) saturated = saturated || b;
      tm.push_back({{"alpha", alpha},
                    {"best_value", s.best_value},
                    {"best_label", s.best_label},
                    {"best_parameter", s.best_parameter},
                    {"values", s.values}});
    }
  } else {
    // q > 2: int F(alpha |u|) log(e + |x|) on the unit w0 sphere, alpha = 1/sqrt(q)
    const double alpha = 1.0 / std::sqrt(q);
    const auto growth = [&](double s) { return eval_F(config.spec, s); };
    std::vector<double> values;
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < family.size(); ++k) {
      const double n2 = norm_w0_sq(family[k].field, q);
      double val = 0.0;
      if (n2 > 0.0) {
        const TmValue t = tm_functional_q(family[k].field.scaled(1.0 / std::sqrt(n2)), alpha, growth);
        saturated = saturated || t.saturated;
        val = t.value;
      }
      values.push_back(val);
      if (val > best) best = val, arg = k;
    }
    tm.push_back({{"alpha", alpha},
                  {"best_value", best},
                  {"best_label", family[arg].label},
                  {"best_parameter", family[arg].parameter},
                  {"values", values}});
  }
  r.results["tm"] = tm;
  r.results["q"] = q;
  const bool ok = chain_a == 0 && chain_b == 0 && round_trip <= 1e-10 && sandwich_ok;
  r.results["all_ok"] = ok;
  r.diagnostics["saturated"] = saturated;
  r.exit_code = ok ? exit_success : exit_admissibility;
  finish(r, config, clock);
  return r;
}

RunReport cmd_moser_scan(const RunConfig& config) {
  const Stopwatch clock;
  RunReport r = start(config);
  const MoserBlock& m = config.moser;
  json rows = json::array();
  std::vector<GridField> family;
  bool saturated = false;
  for (double rho : m.rho) {
    for (int n : m.n) {
      const MoserDelta d = moser_delta_n(n, rho, config.spec.q, config.potential, m.resolution);
      const GridPtr grid = moser_grid(n, rho, rho, m.resolution);
      MoserField cap = moser_cap(n, rho, grid, true, config.spec.q, config.potential);
      json row{{"n", n},
               {"rho", rho},
               {"delta_n", d.delta_n},
               {"v_rho", d.v_rho},
               {"norm_sq", d.norm_sq},
               {"excess", d.excess},
               {"band_upper", d.band_upper},
               {"in_band", d.in_band}};
      try {
        const RayAnalysis ray = ray_analysis(cap.field, config.spec, config.potential, m.t_max, m.samples);
        saturated = saturated || ray.saturated;
        row["t_star"] = ray.t_star;
        row["ray_max"] = ray.max_value;
        row["identity_eq_residual"] = ray.identity_eq_residual;
        row["identity_ge_residual"] = ray.identity_ge_residual;
        row["below_half"] = ray.max_value < 0.5;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::no_interior_max) throw;
        row["ray_max"] = nullptr;
        row["below_half"] = false;
      }
      rows.push_back(std::move(row));
      family.push_back(std::move(cap.field));
    }
  }
  r.results["rows"] = rows;
  try {
    const LevelBound b = mp_level_upper_bound(family, config.spec, config.potential, m.t_max, m.samples);
    r.results["level_bound"] = b.bound;
    r.results["witness"] = rows[b.witness];
    r.exit_code = exit_success;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::no_interior_max) throw;
    r.results["level_bound"] = nullptr;
    r.exit_code = exit_admissibility;
  }
  r.diagnostics["saturated"] = saturated;
  finish(r, config, clock);
  return r;
}

RunReport cmd_solve(const RunConfig& config) {
  const Stopwatch clock;
  RunReport r = start(config);
  SolverConfig sc;
  sc.grid_kind = config.grid.kind;
  sc.domain_radius = config.grid.radius;
  sc.resolution = config.grid.resolution;
  sc.spec = config.spec;
  sc.potential = config.potential;
  sc.path_nodes = config.solver.path_nodes;
  sc.descent_step = config.solver.descent_step;
  sc.max_iterations = config.solver.max_iterations;
  sc.residual_tolerance = config.solver.tolerance;
  sc.rho_sphere = config.solver.rho_sphere;
  sc.seed = config.seed;

  const GridPtr grid = build_grid(sc.grid_kind, sc.domain_radius, sc.resolution);
  const EnergyFunctional fn(grid, sc.spec, sc.potential);
  const SolverResult s = solve_mountain_pass(fn, sc);

  json trace = json::array();
  for (const TracePoint& p : s.ps_trace) trace.push_back({p.level, p.residual, p.step});
  const PsReport ps = ps_diagnostics(fn, s.fields);
  const WeakResidual weak = weak_residual_check(fn, s.field, 20, config.seed);
  double umin = 0.0;
  for (double v : s.field.values()) umin = std::min(umin, v);

  r.results = {
      {"status", to_string(s.status)},
      {"level", s.level},
      {"residual", s.residual},
      {"iterations", s.iterations},
      {"geometry",
       {{"rho_sphere", s.geometry.rho_sphere},
        {"delta0", s.geometry.delta0},
        {"probes", s.geometry.probes},
        {"e_energy", s.geometry.e_energy},
        {"e_norm", s.geometry.e_norm}}},
      {"trace", trace},
      {"ps",
       {{"sup_norm_V", ps.sup_norm_V},
        {"sup_frakF", ps.sup_frakF},
        {"sup_pairing", ps.sup_pairing},
        {"alpha_window", ps.alpha_window},
        {"alphas", ps.alphas},
        {"tail_spread", ps.tail_spread}}},
      {"weak_residual", weak.max_pairing},
      {"min_value", umin},
      {"vanishing_indicator", s.vanishing_indicator},
      {"recentering_shift", s.recentering_shift},
  };
  if (grid->kind() == GridKind::cartesian && (s.recentering_shift[0] || s.recentering_shift[1])) {
    const RecenterResult rc = shift_field(s.field, s.recentering_shift);
    r.results["recentered_level"] = fn.energy(rc.field.values()).total;
    r.results["truncated_mass"] = rc.truncated_mass;
  }
  if (!config.field_output.empty()) {
    save_field(s.field, config.field_output);
    r.results["field_file"] = config.field_output;
  }
  r.diagnostics["saturated"] = s.saturated;
  r.exit_code = s.status == SolverStatus::converged            ? exit_success
                : s.status == SolverStatus::level_out_of_window ? exit_admissibility
                                                                 : exit_budget;
  finish(r, config, clock);
  return r;
}

RunReport cmd_kernel_bench(const RunConfig& config) {
  const Stopwatch clock;
  RunReport r = start(config);
  std::mt19937_64 rng(config.seed);
  json rows = json::array();
  for (int n : config.bench.sizes) {
    const GridPtr grid = build_grid(GridKind::cartesian, config.grid.radius, n);
    const double span = 0.5 * config.grid.radius;
    std::uniform_real_distribution<double> centre(-0.5 * span, 0.5 * span);
    std::uniform_real_distribution<double> width(0.2 * span, 0.6 * span);
    auto smooth = [&] {
      const double cx = centre(rng), cy = centre(rng), w = width(rng);
      return GridField::sample(grid, [=](Point p) {
        return std::exp(-((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy)) / (w * w));
      });
    };
    const GridField zero = GridField::zeros(grid);
    const KernelForm z = bilinear_checked(zero, zero);

    double err = 0.0, t_direct = 0.0, t_fast = 0.0;
    for (int k = 0; k < config.bench.pairs; ++k) {
      const GridField u = smooth(), v = smooth();
      const Stopwatch a;
      const KernelForm d = bilinear_direct(u, v);
      t_direct += a.seconds();
      const Stopwatch b;
      const KernelForm f = bilinear_fast(u, v);
      t_fast += b.seconds();
      for (FormKind which : {FormKind::B0, FormKind::B1, FormKind::B2}) {
        const double dv = d.value(which);
        err = std::max(err, std::abs(f.value(which) - dv) / (1.0 + std::abs(dv)));
      }
    }
    rows.push_back({{"resolution", n},
                    {"nodes", grid->size()},
                    {"pairs", config.bench.pairs},
                    {"max_error", err},
                    {"zero_pair_error", z.error_vs_direct.value_or(0.0)},
                    {"direct_seconds", t_direct / config.bench.pairs},
                    {"fast_seconds", t_fast / config.bench.pairs}});
  }
  r.results["rows"] = rows;
  r.exit_code = exit_success;
  finish(r, config, clock);
  return r;
}

RunReport run_command(const RunConfig& config) {
  config.validate();
  try {
    switch (config.command) {
      case Command::check_assumptions: return cmd_check_assumptions(config);
      case Command::verify_embedding: return cmd_verify_embedding(config);
      case Command::moser_scan: return cmd_moser_scan(config);
      case Command::solve: return cmd_solve(config);
      case Command::kernel_bench: return cmd_kernel_bench(config);
    }
  } catch (const Error& err) {
    const int code = exit_code_for(err.kind());
    if (code == exit_validation) throw;
    RunReport r;
    r.command = std::string(to_string(config.command));
    r.config = to_json(config);
    r.results = {{"error", to_string(err.kind())}, {"message", err.what()}};
    r.diagnostics = json::object();
    r.exit_code = code;
    return r;
  }
  fail(ErrorKind::validation, "unknown command");
}

}  // namespace choquard
