#include <choquard/errors.hpp>
#include <choquard/nonlinearity.hpp>

#include <doctest.h>
#include <oracles.hpp>

#include <cmath>
#include <numbers>

using namespace choquard;
using std::numbers::pi;

namespace {
const NonlinearitySpec F1 = NonlinearitySpec::exp_minus_one();
}

TEST_CASE("values at zero and negative arguments") {
  for (const auto& spec : {F1, NonlinearitySpec::power_exp(2.0), NonlinearitySpec::piecewise(3.0, 2.0, 0.5)}) {
    CHECK(eval_F(spec, 0.0) == 0.0);
    CHECK(eval_f(spec, 0.0) == 0.0);
    CHECK(eval_f(spec, -1.0) == 0.0);
    CHECK(eval_F(spec, -1.0) == 0.0);
  }
}

TEST_CASE("closed forms") {
  CHECK(eval_F(F1, 0.5) == doctest::Approx(oracle::F1_at_half).epsilon(1e-14));
  CHECK(eval_f(F1, 0.5) == doctest::Approx(8 * pi * 0.5 * std::exp(pi)).epsilon(1e-14));
  const auto F2 = NonlinearitySpec::power_exp(3.0);
  CHECK(eval_F(F2, 0.7) == doctest::Approx(std::pow(0.7, 3) * std::exp(4 * pi * 0.49)).epsilon(1e-14));
}

TEST_CASE("F is the primitive of f and f' the derivative") {
  for (const auto& spec : {F1, NonlinearitySpec::power_exp(2.0), NonlinearitySpec::power_exp(2.5),
                           NonlinearitySpec::piecewise(3.0, 2.0, 0.6)}) {
    for (double s : {0.1, 0.4, 0.55, 0.9, 1.7}) {
      if (spec.kind == NonlinearityKind::piecewise && std::abs(s - spec.s0) < 1e-2) continue;
      const double h = 1e-6;
      const double dF = (eval_F(spec, s + h) - eval_F(spec, s - h)) / (2 * h);
      CHECK(eval_f(spec, s) == doctest::Approx(dF).epsilon(1e-6));
      const double df = (eval_f(spec, s + h) - eval_f(spec, s - h)) / (2 * h);
      CHECK(eval_f_prime(spec, s) == doctest::Approx(df).epsilon(1e-6));
    }
  }
}

TEST_CASE("piecewise family is continuous at the splice") {
  const auto F3 = NonlinearitySpec::piecewise(3.0, 2.0, 0.6);
  const double s0 = 0.6, e = 1e-12;
  CHECK(eval_F(F3, s0 - e) == doctest::Approx(eval_F(F3, s0 + e)).epsilon(1e-9));
  CHECK(F3.splice_constant() ==
        doctest::Approx(std::pow(0.6, 1.0) * std::exp(-4 * pi * 0.36)).epsilon(1e-14));
}

TEST_CASE("custom nonlinearity integrates f") {
  const auto spec = NonlinearitySpec::custom([](double s) { return 3 * s * s; },
                                             [](double s) { return 6 * s; }, 3.0);
  CHECK(eval_F(spec, 1.3) == doctest::Approx(std::pow(1.3, 3)).epsilon(1e-10));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(NonlinearitySpec::power_exp(1.0).validate(), Error);
  auto bad = F1;
  bad.q = 3.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(NonlinearitySpec::piecewise(3.0, 1.0, 0.5).validate(), Error);
  CHECK_NOTHROW(NonlinearitySpec::zero().validate());
}

TEST_CASE("ratio F f' / f^2") {
  CHECK(ratio_Ffprime_f2(F1, 1e-6) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(ratio_Ffprime_f2(F1, 10.0) - 1.0) <= 1e-3);
  CHECK_THROWS_AS(ratio_Ffprime_f2(NonlinearitySpec::zero(), 1.0), Error);
  // series oracle near 0: (1 - e^{-a})(1 + 2a) / (2a), a = 4 pi s^2
  const double s = 0.3, a = 4 * pi * s * s;
  CHECK(ratio_Ffprime_f2(F1, s) == doctest::Approx(-std::expm1(-a) * (1 + 2 * a) / (2 * a)).epsilon(1e-13));
}

TEST_CASE("saturation threshold") {
  CHECK_FALSE(saturates(7.0));
  CHECK(saturates(8.0));
  CHECK(std::isfinite(eval_F(F1, 20.0)));
}

TEST_CASE("auxiliary G") {
  CHECK(G_auxiliary(F1, 0.0) == 0.0);
  const double g1 = G_auxiliary(F1, 1.0);
  CHECK(g1 * g1 <= 1.0 - eval_F(F1, 1.0) / eval_f(F1, 1.0));
  CHECK(G_auxiliary(F1, 2.0) >= g1);
  for (double t : {0.2, 0.8, 1.5, 3.0}) {
    const double g = G_auxiliary(F1, t);
    CHECK(g * g <= t * t - t * eval_F(F1, t) / eval_f(F1, t) + 1e-10);
  }
}

TEST_CASE("assumption report for the exponential family") {
  const auto r = check_assumptions(F1);
  CHECK(r.f1_ok);
  CHECK(r.f2_ok);
  CHECK(r.f3_ok);
  CHECK(r.ar_ok);
  CHECK(r.estG_ok);
  CHECK(r.envelope_ok);
  CHECK(r.lower_bound_ok);
  CHECK(r.delta_estimate == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::abs(r.f3_limit_estimate - 1.0) <= 1e-3);
  CHECK(r.delta_estimate > 0.0);
  CHECK(r.delta_estimate <= r.C_estimate);
  CHECK(r.f4_ok == (r.f4_liminf_estimate > r.script_V));
}

TEST_CASE("ratio lies between delta and C on the scan") {
  for (const auto& spec : {F1, NonlinearitySpec::power_exp(2.0), NonlinearitySpec::piecewise(3.0, 2.0, 0.6)}) {
    const ScanPlan plan;
    const auto r = check_assumptions(spec, plan);
    REQUIRE(r.f2_ok);
    for (int k = 0; k < 500; ++k) {
      const double s = plan.s_min * std::pow(plan.s_max / plan.s_min, k / 499.0);
      const double q = ratio_Ffprime_f2(spec, s);
      CHECK(q >= r.delta_estimate);
      CHECK(q <= r.C_estimate);
      // F <= (1 - delta) s f
      CHECK(eval_scaled(spec, s).F <= (1.0 - r.delta_estimate) * s * eval_scaled(spec, s).f * (1 + 1e-12));
    }
  }
}

TEST_CASE("power family passes the growth floor for every beta") {
  for (double beta : {0.1, 1.0, 10.0, 1e6}) {
    auto spec = NonlinearitySpec::power_exp(2.0);
    spec.beta = beta;
    const auto r = check_assumptions(spec);
    CHECK(r.f4_ok);
    CHECK(r.f4_diverges);
  }
}

TEST_CASE("script V") {
  const auto v = compute_script_V(2.0, 1.0);
  CHECK(v.value == doctest::Approx(oracle::script_V_q2_v1).epsilon(1e-12));
  CHECK(v.argmin_rho == doctest::Approx(0.5));
  CHECK(compute_script_V(2.0, 1.5).value > v.value);
  const auto half = compute_script_V(2.5, 1.0);
  CHECK(half.argmin_rho > 0.0);
  CHECK(half.argmin_rho <= 0.5);
  // rho -> 0 blows up like rho^{-4}
  CHECK(script_V_integrand(2.0, 1.0, 1e-3) > 1e10);
}

TEST_CASE("kind names round trip") {
  for (auto k : {NonlinearityKind::exp_minus_one, NonlinearityKind::power_exp, NonlinearityKind::piecewise,
                 NonlinearityKind::custom, NonlinearityKind::zero})
    CHECK(nonlinearity_kind_from_string(to_string(k)) == k);
}
