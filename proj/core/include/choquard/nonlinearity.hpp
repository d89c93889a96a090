#pragma once

#include <choquard/periodic_profile.hpp>

#include <functional>
#include <string_view>
#include <utility>

namespace choquard {

enum class NonlinearityKind {
  exp_minus_one,  // F = e^{4 pi s^2} - 1
  power_exp,      // F = s^p e^{4 pi s^2}
  piecewise,      // F = s^q for s <= s0, c s^p e^{4 pi s^2} beyond
  custom,         // user f and f'; F by quadrature
  zero,           // f = F = 0
};

std::string_view to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(std::string_view name);

/**
 * f(x, s) = c(x) f(s) with f(s) = 0 for s <= 0 and F the primitive of f
 * vanishing at 0. q is the small-s exponent (f ~ s^{q-1}), p the growth
 * parameter of the built-in families, beta the liminf parameter of the
 * growth-floor condition.
 */
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::exp_minus_one;
  double p = 1.0;
  double q = 2.0;
  double s0 = 1.0;
  double beta = 1.0;
  PeriodicProfile c_profile;
  std::function<double(double)> custom_f;
  std::function<double(double)> custom_f_prime;

  static NonlinearitySpec exp_minus_one();
  static NonlinearitySpec power_exp(double p);
  static NonlinearitySpec piecewise(double q, double p, double s0);
  static NonlinearitySpec custom(std::function<double(double)> f,
                                 std::function<double(double)> f_prime, double q);
  static NonlinearitySpec zero();

  /// Continuity constant of the piecewise family, s0^{q-p} e^{-4 pi s0^2}.
  double splice_constant() const;

  void validate() const;
};

/// Values of f, F, f' with the factor e^{4 pi s^2} removed. These never
/// overflow and are what the assumption checks work with.
struct ScaledValues {
  double F = 0.0;
  double f = 0.0;
  double f_prime = 0.0;
};
ScaledValues eval_scaled(const NonlinearitySpec& spec, double s);

/// 4 pi s^2 > 700: the exponential factor is capped in eval_f/eval_F/eval_f_prime.
bool saturates(double s);

double eval_f(const NonlinearitySpec& spec, double s);
double eval_F(const NonlinearitySpec& spec, double s);
double eval_f_prime(const NonlinearitySpec& spec, double s);

/// F f' / f^2; throws division-by-zero where f vanishes.
double ratio_Ffprime_f2(const NonlinearitySpec& spec, double s);

/// s^3 f(s) F(s) e^{-8 pi s^2}.
double growth_floor_quantity(const NonlinearitySpec& spec, double s);

/// G(t) = int_0^t sqrt(F f') / f ds.
double G_auxiliary(const NonlinearitySpec& spec, double t);

struct ScanPlan {
  double s_min = 1e-3;
  double s_max = 10.0;
  int samples = 4000;
  double epsilon = 0.05;  // tail tolerance for the lower bound of F f'/f^2
  double v_half = 1.0;    // max of V on the disc of radius 1/2
};

struct AssumptionReport {
  bool f1_ok = false;
  bool f2_ok = false;
  bool f3_ok = false;
  bool f4_ok = false;
  bool ar_ok = false;        // F <= (1 - delta) s f
  bool envelope_ok = false;  // F <= C s^q near 0 and C s^{p-1} e^{4 pi s^2} beyond
  bool lower_bound_ok = false;
  bool estG_ok = false;
  bool beta_ok = false;      // liminf >= beta

  double small_s_exponent = 0.0;  // fitted, compare q - 1
  double growth_exponent = 0.0;   // fitted p with f <= C s^p e^{4 pi s^2}
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double delta_estimate = 0.0;
  double C_estimate = 0.0;
  double f3_limit_estimate = 0.0;
  double f3_error = 0.0;
  double f4_liminf_estimate = 0.0;
  double f4_error = 0.0;
  bool f4_diverges = false;
  double envelope_constant = 0.0;
  double envelope_s0 = 0.0;
  double epsilon = 0.0;
  double s_epsilon = 0.0;
  double script_V = 0.0;
  double script_V_argmin = 0.0;
  std::pair<double, double> sample_range{0.0, 0.0};

  bool all_ok() const { return f1_ok && f2_ok && f3_ok && f4_ok; }
};

AssumptionReport check_assumptions(const NonlinearitySpec& spec, const ScanPlan& plan = {});

struct ScriptV {
  double value = 0.0;
  double argmin_rho = 0.0;
};

/// inf over 0 < rho <= 1/2 of
///   pi^{-3} rho^{-4} exp(rho^2 (V_half + (2 pi)^{2/q-1} log^{2/q}(1+rho)
///                        [q]!/2^{[q]-1} (1 + ([q]+1)/2))).
ScriptV compute_script_V(double q, double v_half);

/// The function minimized by compute_script_V.
double script_V_integrand(double q, double v_half, double rho);

}  // namespace choquard
