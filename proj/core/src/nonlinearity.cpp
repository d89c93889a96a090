#include <choquard/nonlinearity.hpp>

#include <choquard/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace choquard {

namespace {

constexpr double pi = std::numbers::pi;

double exponent(double s) { return 4.0 * pi * s * s; }

double custom_primitive(const NonlinearitySpec& spec, double s) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      spec.custom_f, 0.0, s, 15, 1e-10, &err);
  if (!std::isfinite(v)) fail(ErrorKind::quadrature_failure, "primitive of custom f is not finite");
  return v;
}

// F2 with the exponential removed, optionally scaled.
ScaledValues power_exp_scaled(double p, double s, double scale) {
  const double s2 = s * s;
  return {scale * std::pow(s, p), scale * std::pow(s, p - 1.0) * (p + 8.0 * pi * s2),
          scale * std::pow(s, p - 2.0) *
              (p * (p - 1.0) + 8.0 * pi * (2.0 * p + 1.0) * s2 + 64.0 * pi * pi * s2 * s2)};
}

double power_exp_ratio(double p, double s) {
  const double s2 = s * s;
  const double d = p + 8.0 * pi * s2;
  return (p * (p - 1.0) + 8.0 * pi * (2.0 * p + 1.0) * s2 + 64.0 * pi * pi * s2 * s2) / (d * d);
}

double richardson(double s1, double v1, double s2, double v2) {
  // v(s) = L + c / s^2
  return (s2 * s2 * v2 - s1 * s1 * v1) / (s2 * s2 - s1 * s1);
}

}  // namespace

std::string_view to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::exp_minus_one: return "exp_minus_one";
    case NonlinearityKind::power_exp: return "power_exp";
    case NonlinearityKind::piecewise: return "piecewise";
    case NonlinearityKind::custom: return "custom";
    case NonlinearityKind::zero: return "zero";
  }
  return "unknown";
}

NonlinearityKind nonlinearity_kind_from_string(std::string_view name) {
  for (auto k : {NonlinearityKind::exp_minus_one, NonlinearityKind::power_exp,
                 NonlinearityKind::piecewise, NonlinearityKind::custom, NonlinearityKind::zero})
    if (to_string(k) == name) return k;
  fail(ErrorKind::invalid_parameter, "unknown nonlinearity kind '" + std::string(name) + "'");
}

NonlinearitySpec NonlinearitySpec::exp_minus_one() {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::exp_minus_one;
  s.p = 1.0;
  s.q = 2.0;
  return s;
}

NonlinearitySpec NonlinearitySpec::power_exp(double p) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::power_exp;
  s.p = p;
  s.q = p;
  return s;
}

NonlinearitySpec NonlinearitySpec::piecewise(double q, double p, double s0) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::piecewise;
  s.p = p;
  s.q = q;
  s.s0 = s0;
  return s;
}

NonlinearitySpec NonlinearitySpec::custom(std::function<double(double)> f,
                                          std::function<double(double)> f_prime, double q) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::custom;
  s.q = q;
  s.custom_f = std::move(f);
  s.custom_f_prime = std::move(f_prime);
  return s;
}

NonlinearitySpec NonlinearitySpec::zero() {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::zero;
  return s;
}

double NonlinearitySpec::splice_constant() const {
  return std::pow(s0, q - p) * std::exp(-exponent(s0));
}

void NonlinearitySpec::validate() const {
  auto bad = [](const char* what) { fail(ErrorKind::invalid_parameter, what); };
  if (!(q >= 2.0) || !std::isfinite(q)) bad("q must be at least 2");
  if (!(p > 0.0) || !std::isfinite(p)) bad("p must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) bad("beta must be positive");
  c_profile.validate("c(x)");
  switch (kind) {
    case NonlinearityKind::exp_minus_one:
      if (q != 2.0) bad("exp_minus_one behaves like s^2 near 0, so q must be 2");
      break;
    case NonlinearityKind::power_exp:
      if (p < 2.0) bad("power_exp needs p >= 2");
      if (q != p) bad("power_exp behaves like s^p near 0, so q must equal p");
      break;
    case NonlinearityKind::piecewise:
      if (!(p > 1.0)) bad("piecewise needs p > 1");
      if (!(s0 > 0.0) || !std::isfinite(s0)) bad("piecewise needs s0 > 0");
      break;
    case NonlinearityKind::custom:
      if (!custom_f || !custom_f_prime) bad("custom nonlinearity needs f and f'");
      break;
    case NonlinearityKind::zero:
      break;
  }
}

bool saturates(double s) { return exponent(s) > 700.0; }

ScaledValues eval_scaled(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) return {};
  const double a = exponent(s);
  switch (spec.kind) {
    case NonlinearityKind::exp_minus_one:
      return {-std::expm1(-a), 8.0 * pi * s, 8.0 * pi * (1.0 + 2.0 * a)};
    case NonlinearityKind::power_exp:
      return power_exp_scaled(spec.p, s, 1.0);
    case NonlinearityKind::piecewise: {
      if (s > spec.s0) return power_exp_scaled(spec.p, s, spec.splice_constant());
      const double q = spec.q;
      const double damp = std::exp(-a);
      return {damp * std::pow(s, q), damp * q * std::pow(s, q - 1.0),
              damp * q * (q - 1.0) * std::pow(s, q - 2.0)};
    }
    case NonlinearityKind::custom: {
      const double damp = std::exp(-a);
      return {damp * custom_primitive(spec, s), damp * spec.custom_f(s),
              damp * spec.custom_f_prime(s)};
    }
    case NonlinearityKind::zero:
      return {};
  }
  return {};
}

double eval_f(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) return 0.0;
  if (spec.kind == NonlinearityKind::custom) return spec.custom_f(s);
  return eval_scaled(spec, s).f * std::exp(std::min(exponent(s), 700.0));
}

double eval_F(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) return 0.0;
  switch (spec.kind) {
    case NonlinearityKind::exp_minus_one: return std::expm1(std::min(exponent(s), 700.0));
    case NonlinearityKind::custom: return custom_primitive(spec, s);
    default: return eval_scaled(spec, s).F * std::exp(std::min(exponent(s), 700.0));
  }
}

double eval_f_prime(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) return 0.0;
  if (spec.kind == NonlinearityKind::custom) return spec.custom_f_prime(s);
  return eval_scaled(spec, s).f_prime * std::exp(std::min(exponent(s), 700.0));
}

double ratio_Ffprime_f2(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) fail(ErrorKind::division_by_zero, "f vanishes for s <= 0");
  switch (spec.kind) {
    case NonlinearityKind::exp_minus_one: {
      const double a = exponent(s);
      return -std::expm1(-a) * (1.0 + 2.0 * a) / (2.0 * a);
    }
    case NonlinearityKind::power_exp:
      return power_exp_ratio(spec.p, s);
    case NonlinearityKind::piecewise:
      return s > spec.s0 ? power_exp_ratio(spec.p, s) : (spec.q - 1.0) / spec.q;
    case NonlinearityKind::custom: {
      const double f = spec.custom_f(s);
      if (f == 0.0) fail(ErrorKind::division_by_zero, "f vanishes at the requested point");
      return custom_primitive(spec, s) * spec.custom_f_prime(s) / (f * f);
    }
    case NonlinearityKind::zero:
      fail(ErrorKind::division_by_zero, "f vanishes identically");
  }
  return 0.0;
}

double growth_floor_quantity(const NonlinearitySpec& spec, double s) {
  if (!(s > 0.0)) return 0.0;
  if (spec.kind == NonlinearityKind::exp_minus_one) {
    const double a = exponent(s);
    return 8.0 * pi * s * s * s * s * -std::expm1(-a);
  }
  const ScaledValues v = eval_scaled(spec, s);
  return s * s * s * v.f * v.F;
}

double G_auxiliary(const NonlinearitySpec& spec, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::invalid_parameter, "G needs t >= 0");
  if (t == 0.0) return 0.0;
  // sqrt(F f') / f = sqrt(F f' / f^2)
  auto integrand = [&](double s) {
    const double r = ratio_Ffprime_f2(spec, s);
    if (!std::isfinite(r) || r < 0.0)
      fail(ErrorKind::quadrature_failure, "G integrand is not finite");
    return std::sqrt(r);
  };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, t, 15, 1e-12, &err);
  if (!std::isfinite(v)) fail(ErrorKind::quadrature_failure, "G did not converge");
  return v;
}

double script_V_integrand(double q, double v_half, double rho) {
  const double fq = std::floor(q);
  const double combinatorial = std::tgamma(fq + 1.0) / std::pow(2.0, fq - 1.0) * (1.0 + (fq + 1.0) / 2.0);
  const double bracket = v_half + std::pow(2.0 * pi, 2.0 / q - 1.0) *
                                      std::pow(std::log1p(rho), 2.0 / q) * combinatorial;
  return std::exp(rho * rho * bracket) / (pi * pi * pi * std::pow(rho, 4.0));
}

ScriptV compute_script_V(double q, double v_half) {
  if (!(q >= 2.0)) fail(ErrorKind::invalid_parameter, "q must be at least 2");
  if (!(v_half > 0.0)) fail(ErrorKind::invalid_parameter, "V_half must be positive");
  constexpr int n = 10000;
  int best = n;
  double best_value = script_V_integrand(q, v_half, 0.5);
  for (int k = 1; k < n; ++k) {
    const double v = script_V_integrand(q, v_half, 0.5 * k / n);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  if (best == n) return {best_value, 0.5};
  const double lo = 0.5 * (best - 1) / n;
  const double hi = 0.5 * (best + 1) / n;
  auto [rho, value] = boost::math::tools::brent_find_minima(
      [&](double r) { return script_V_integrand(q, v_half, r); }, lo, hi, 52);
  if (value < best_value) return {value, rho};
  return {best_value, 0.5 * best / n};
}

AssumptionReport check_assumptions(const NonlinearitySpec& spec, const ScanPlan& plan) {
  spec.validate();
  if (!(plan.s_min > 0.0) || !(plan.s_max > plan.s_min) || plan.samples < 16)
    fail(ErrorKind::invalid_parameter, "scan needs 0 < s_min < s_max and at least 16 samples");
  AssumptionReport rep;
  rep.sample_range = {plan.s_min, plan.s_max};
  rep.epsilon = plan.epsilon;
  const auto sv = compute_script_V(spec.q, plan.v_half);
  rep.script_V = sv.value;
  rep.script_V_argmin = sv.argmin_rho;
  if (spec.kind == NonlinearityKind::zero) return rep;

  const int n = plan.samples;
  std::vector<double> s(n);
  const double step = std::log(plan.s_max / plan.s_min) / (n - 1);
  for (int k = 0; k < n; ++k) s[k] = plan.s_min * std::exp(step * k);
  s.back() = plan.s_max;

  std::vector<ScaledValues> val(n);
  std::vector<double> ratio(n);
  bool nonnegative = true;
  for (int k = 0; k < n; ++k) {
    val[k] = eval_scaled(spec, s[k]);
    ratio[k] = ratio_Ffprime_f2(spec, s[k]);
    if (val[k].f < 0.0 || val[k].F < 0.0) nonnegative = false;
  }

  // f1: sign, small-s exponent, exponential growth rate
  {
    const double a = s[0];
    const double b = 2.0 * s[0];
    rep.small_s_exponent = std::log(eval_f(spec, b) / eval_f(spec, a)) / std::log(2.0);
    const double hi = plan.s_max;
    const double lo = 0.5 * plan.s_max;
    rep.growth_exponent =
        std::log(eval_scaled(spec, hi).f / eval_scaled(spec, lo).f) / std::log(hi / lo);
    rep.f1_ok = nonnegative && std::isfinite(rep.growth_exponent) &&
                std::abs(rep.small_s_exponent - (spec.q - 1.0)) <= 0.05;
  }

  // f2
  rep.ratio_min = *std::min_element(ratio.begin(), ratio.end());
  rep.ratio_max = *std::max_element(ratio.begin(), ratio.end());
  rep.delta_estimate = 0.99 * rep.ratio_min;
  rep.C_estimate = 1.01 * rep.ratio_max;
  rep.f2_ok = rep.ratio_min > 0.0 && std::isfinite(rep.ratio_max) &&
              rep.C_estimate > rep.delta_estimate;

  // f3: ratio = L + c / s^2 on the tail
  {
    const double s1 = 0.5 * plan.s_max;
    const double s2 = plan.s_max;
    const double r2 = ratio_Ffprime_f2(spec, s2);
    rep.f3_limit_estimate = richardson(s1, ratio_Ffprime_f2(spec, s1), s2, r2);
    rep.f3_error = std::abs(rep.f3_limit_estimate - r2);
    rep.f3_ok = std::abs(rep.f3_limit_estimate - 1.0) <= std::max(1e-3, rep.f3_error);
  }

  // f4
  {
    const double s1 = 0.5 * plan.s_max;
    const double s2 = plan.s_max;
    const double q1 = growth_floor_quantity(spec, s1);
    const double q2 = growth_floor_quantity(spec, s2);
    rep.f4_diverges = q2 > 1.5 * q1;
    if (rep.f4_diverges) {
      rep.f4_liminf_estimate = q2;
      rep.f4_error = q2 - q1;
    } else {
      rep.f4_liminf_estimate = richardson(s1, q1, s2, q2);
      rep.f4_error = std::abs(rep.f4_liminf_estimate - q2);
    }
    rep.f4_ok = rep.f4_liminf_estimate > rep.script_V;
    rep.beta_ok = rep.f4_diverges || rep.f4_liminf_estimate >= spec.beta;
  }

  // F <= (1 - delta) s f
  rep.ar_ok = rep.f2_ok;
  for (int k = 0; k < n && rep.ar_ok; ++k)
    if (val[k].F > (1.0 - rep.delta_estimate) * s[k] * val[k].f * (1.0 + 1e-12)) rep.ar_ok = false;

  // envelope F <= C s^q (s <= s0), C s^{p-1} e^{4 pi s^2} (s > s0), s0 > 1
  {
    rep.envelope_s0 = spec.kind == NonlinearityKind::piecewise ? std::max(spec.s0, 2.0) : 2.0;
    double c = 0.0;
    for (int k = 0; k < n; ++k) {
      double bound = 0.0;
      if (s[k] <= rep.envelope_s0)
        bound = eval_F(spec, s[k]) / std::pow(s[k], spec.q);
      else
        bound = val[k].F / std::pow(s[k], rep.growth_exponent - 1.0);
      c = std::max(c, bound);
    }
    rep.envelope_constant = c;
    rep.envelope_ok = std::isfinite(c) && c > 0.0;
  }

  // F f'/f^2 >= delta up to s_eps and >= 1 - eps beyond
  {
    int first_tail = n;
    for (int k = n - 1; k >= 0 && ratio[k] >= 1.0 - plan.epsilon; --k) first_tail = k;
    rep.s_epsilon = first_tail < n ? s[first_tail] : plan.s_max;
    rep.lower_bound_ok = first_tail < n;
    for (int k = 0; k < first_tail; ++k)
      if (ratio[k] < rep.delta_estimate) rep.lower_bound_ok = false;
  }

  // G nondecreasing and G^2 <= t^2 - t F / f on 1000 points
  {
    constexpr int m = 1000;
    rep.estG_ok = true;
    double g = 0.0;
    double prev_t = 0.0;
    for (int k = 1; k <= m && rep.estG_ok; ++k) {
      const double t = plan.s_max * k / m;
      double err = 0.0;
      const double inc = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double x) { return std::sqrt(ratio_Ffprime_f2(spec, x)); }, prev_t, t, 10, 1e-13,
          &err);
      if (!(inc >= 0.0)) rep.estG_ok = false;
      g += inc;
      prev_t = t;
      const ScaledValues v = eval_scaled(spec, t);
      const double rhs = t * t - t * v.F / v.f;
      if (g * g > rhs + 1e-10 * t * t) rep.estG_ok = false;
    }
  }
  return rep;
}

}  // namespace choquard
