#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <algorithm>

#include "shortc2/io.hpp"
#include "shortc2/oscillation.hpp"
#include "shortc2/sampling.hpp"

using namespace shortc2;

namespace {

const Precision kPrec = Precision::standard();
const Rational kHalf(1, 2);

BigComplexPoint pt(double z, double w) { return {z, 0, w, 0, kPrec}; }
BigReal identity_tol() { return BigReal::pow2(16 - kPrec.bits(), kPrec); }

OscillationPlan toy_a() {
  return json_plan(read_json_file(std::string(SHORTC2_FIXTURES) + "/toy-a.json"));
}

Polynomial poly(std::initializer_list<double> re) {
  std::vector<BigComplex> c;
  for (double x : re) c.emplace_back(x, 0.0, kPrec);
  return Polynomial(std::move(c));
}

// F^(-1)(z, w) = (w / a, (z - f(w / a)) / a), written out directly.
BigComplexPoint henon_inverse(const Polynomial& f, const BigReal& a, BigComplexPoint p, std::int64_t j) {
  for (std::int64_t i = 0; i < j; ++i) {
    BigComplex x = p.w / a;
    p = BigComplexPoint(x, (p.z - f(x)) / a);
  }
  return p;
}

bool has_condition(const std::vector<PlanViolation>& vs, const std::string& name) {
  return std::any_of(vs.begin(), vs.end(), [&](const PlanViolation& v) { return v.condition == name; });
}

OscillationPlan one_stage(int d, std::int64_t q) {
  OscillationPlan plan;
  plan.a = kHalf;
  plan.ell0 = 1;
  plan.stages.push_back({d, 2, 3, q, Rational(4), 1});
  return plan;
}

}  // namespace

TEST_CASE("shipped plans are valid") {
  CHECK(validate_plan(toy_a()).empty());
  CHECK(validate_plan(json_plan(read_json_file(std::string(SHORTC2_FIXTURES) + "/toy-b.json"))).empty());
}

TEST_CASE("parity") {
  OscillationPlan odd = toy_a();
  odd.stages[0].d = 3;
  odd.stages[1].d = 3;
  CHECK_FALSE(has_condition(validate_plan(odd), "parity"));

  OscillationPlan even = toy_a();
  even.stages[0].d = 2;
  even.stages[1].d = 3;
  auto vs = validate_plan(even);
  REQUIRE(has_condition(vs, "parity"));
  auto it = std::find_if(vs.begin(), vs.end(), [](const PlanViolation& v) { return v.condition == "parity"; });
  CHECK(it->stage == 1);
  CHECK(it->message.find("product must be odd") != std::string::npos);
}

TEST_CASE("condition (f)") {
  // q_1 = 3 gives |log β_{n_1}| = 6 log 2 ≈ 4.159.
  CHECK(has_condition(validate_plan(one_stage(3, 3)), "(f)"));
  CHECK_FALSE(has_condition(validate_plan(one_stage(5, 3)), "(f)"));
  CHECK(validate_plan(one_stage(5, 3)).empty());
}

TEST_CASE("other plan conditions") {
  OscillationPlan p = toy_a();
  p.stages[1].q = 2;
  CHECK(has_condition(validate_plan(p), "q-bound"));
  p = toy_a();
  p.stages[0].N = 5;
  CHECK(has_condition(validate_plan(p), "degree-bound"));
  p = toy_a();
  p.stages[1].R = Rational(3);
  CHECK(has_condition(validate_plan(p), "monotone-R"));
  p = toy_a();
  p.stages[1].n = 2;
  CHECK(has_condition(validate_plan(p), "monotone-n"));
  p = toy_a();
  p.a = Rational(3, 2);
  CHECK(has_condition(validate_plan(p), "(e)"));
}

TEST_CASE("beta schedule") {
  OscillationPlan plan = toy_a();
  CHECK(plan_beta(plan, 1, kPrec) == BigReal(1L, kPrec));
  CHECK(plan_beta(plan, 2, kPrec) == BigReal::pow2(-6, kPrec));
  CHECK(plan_beta(plan, 3, kPrec) == BigReal(0.5, kPrec));
  CHECK(plan_beta(plan, 6, kPrec) == BigReal::pow2(-6, kPrec));
  CHECK(even_power_exponent(BigReal::pow2(-6, kPrec), kHalf) == 3);
  CHECK_THROWS_AS(even_power_exponent(BigReal::pow2(-3, kPrec), kHalf), PreconditionError);
  CHECK_THROWS_AS(even_power_exponent(BigReal(1L, kPrec) / BigReal(3L, kPrec), kHalf), PreconditionError);
}

TEST_CASE("inverse iterate example") {
  InverseIterateWords w = factor_inverse_iterate(poly({0, 1}), kHalf, 1, kPrec);
  CHECK(w.tilde_form.size() == 4);
  CHECK(relative_error(shortc2::apply(w.tilde_form, pt(1, 0)), pt(0, 2)) <= identity_tol());
  CHECK(relative_error(shortc2::apply(w.hat_form, pt(1, 0)), pt(0, 2)) <= identity_tol());
  InverseIterateWords id = factor_inverse_iterate(poly({0, 1}), kHalf, 0, kPrec);
  CHECK(relative_error(shortc2::apply(id.tilde_form, pt(0.3, 0.7)), pt(0.3, 0.7)) <= identity_tol());
}

TEST_CASE("inverse iterates against the closed-form inverse") {
  Sampler sampler(8);
  std::vector<Polynomial> fs{poly({0, 1}), poly({0, 1, 1}), poly({0, 1, 0, 0.3})};
  BigReal a = to_big(kHalf, kPrec);
  BigReal worst(kPrec);
  BigReal worst_round_trip(kPrec);
  int round_trips = 0;
  for (const auto& f : fs) {
    for (std::int64_t j = 1; j <= 8; ++j) {
      InverseIterateWords w = factor_inverse_iterate(f, kHalf, j, kPrec);
      for (int i = 0; i < 25; ++i) {
        BigComplexPoint p = sampler.ball_point(1.0, kPrec);
        BigComplexPoint expected = henon_inverse(f, a, p, j);
        worst = max(worst, relative_error(shortc2::apply(w.tilde_form, p), expected));
        worst = max(worst, relative_error(shortc2::apply(w.hat_form, p), expected));
        // The round trip through F^j inherits the conditioning of F^(-j): the
        // rounding of F^j(p) is amplified by ‖D F^(-j)‖ at the image.
        BigComplexPoint image = p;
        bool bounded = true;
        for (std::int64_t i = 0; i < j && bounded; ++i) {
          image = shortc2::apply(Shear{f, kHalf}, image);
          bounded = image.euclidean_norm() <= BigReal(2L, kPrec);
        }
        if (bounded) {
          BigReal amplification = max(differential(w.tilde_form, image).operator_norm(), BigReal(1L, kPrec));
          worst_round_trip = max(worst_round_trip,
                                 mixed_relative_error(shortc2::apply(w.tilde_form, image), p) / amplification);
          ++round_trips;
        }
      }
    }
  }
  CHECK(worst <= identity_tol());
  CHECK(worst_round_trip <= identity_tol());
  CHECK(round_trips >= 300);
}

TEST_CASE("commutation relations") {
  Sampler sampler(9);
  Polynomial f = poly({0.1, 1, 0, 0.3});
  Shear lambda{-f, kHalf};
  for (std::int64_t j = 1; j <= 5; ++j) {
    TauPower down{kHalf, -2 * j};
    MapWord lhs1{down, lambda}, rhs1{lambda_tilde(f, kHalf, j, kPrec), down};
    MapWord lhs2{lambda, down}, rhs2{down, lambda_hat(f, kHalf, j, kPrec)};
    for (int i = 0; i < 20; ++i) {
      BigComplexPoint p = sampler.ball_point(1.0, kPrec);
      CHECK(relative_error(shortc2::apply(lhs1, p), shortc2::apply(rhs1, p)) <= identity_tol());
      CHECK(relative_error(shortc2::apply(lhs2, p), shortc2::apply(rhs2, p)) <= identity_tol());
    }
  }
}

TEST_CASE("model split") {
  MapWord split = factor_model_split(kHalf, 3, 3);
  Model h{kHalf, 3, 3};
  CHECK(relative_error(shortc2::apply(split, pt(1, 1)), shortc2::apply(h, pt(1, 1))) <= identity_tol());
  CHECK(shortc2::apply(split, pt(0, 0)).euclidean_norm().is_zero());
  Sampler sampler(10);
  for (int i = 0; i < 20; ++i) {
    BigComplexPoint p = sampler.ball_point(2.0, kPrec);
    CHECK(relative_error(shortc2::apply(factor_model_split(kHalf, 5, 15), p),
                         shortc2::apply(Model{kHalf, 5, 15}, p)) <= identity_tol());
  }
  CHECK_THROWS_AS(factor_model_split(kHalf, 3, 6), PreconditionError);
  OscillationPlan even = toy_a();
  even.stages[0].d = 4;
  CHECK_THROWS_AS(factor_model_split(even, 0), PreconditionError);
}

TEST_CASE("affine factors") {
  Sampler sampler(11);
  BigReal beta = BigReal::pow2(-6, kPrec);
  BigReal s = BigReal::pow2(-4, kPrec);
  BigComplexPoint origin(kPrec);

  AffineFactors centered = factor_affine(kHalf, origin, s, origin, beta);
  for (const Factor& f : centered.inverse.factors())
    if (const auto* sh = std::get_if<Shear>(&f.map)) {
      auto c = sh->phi.coefficients();
      CHECK((c.empty() || c[0].is_zero()));
    }
  BigReal worst(kPrec);
  for (int i = 0; i < 10; ++i) {
    BigComplexPoint p = sampler.ball_point(1.0, kPrec);
    worst = max(worst, relative_error(shortc2::apply(centered.inverse, p), (BigReal(1L, kPrec) / beta) * p));
  }

  BigComplexPoint Q = sampler.ball_point(3.0, kPrec);
  BigComplexPoint c = sampler.ball_point(3.0, kPrec);
  AffineFactors general = factor_affine(kHalf, Q, s, c, beta);
  for (int i = 0; i < 10; ++i) {
    BigComplexPoint p = sampler.ball_point(1.0, kPrec);
    worst = max(worst, mixed_relative_error(shortc2::apply(general.forward, p), Q + s * p));
    worst = max(worst, mixed_relative_error(shortc2::apply(general.inverse, p), (BigReal(1L, kPrec) / beta) * (p - c)));
  }
  CHECK(worst <= identity_tol());
  CHECK_THROWS_AS(factor_affine(kHalf, Q, s, c, BigReal(1L, kPrec) / BigReal(3L, kPrec)), PreconditionError);
  CHECK_THROWS_AS(factor_affine(kHalf, Q, BigReal::pow2(-3, kPrec), c, beta), PreconditionError);
}

TEST_CASE("transition factorization on the toy plan") {
  OscillationPlan plan = toy_a();
  for (const Polynomial& f : {poly({0, 1}), poly({0, 1, 0, 0.3})}) {
    for (std::size_t k = 0; k < plan.size(); ++k) {
      PlanStage st = plan.stage(k);
      std::int64_t ell = plan.detour(k).value_or(1);
      TransitionOrbit orbit = consistent_orbit(f, plan.a, st.N - st.n, ell, BigComplexPoint(0.2, 0.1, -0.3, 0.05, kPrec),
                                               BigComplexPoint(0.4, -0.2, 0.1, 0.3, kPrec));
      MapWord F = MapWord::repeated(Shear{f, plan.a}, static_cast<std::size_t>(st.N - st.n));
      CHECK(relative_error(orbit.P_N, shortc2::apply(F, orbit.P_n)) <= identity_tol());

      TransitionFactorization tf = factor_transition(plan, k, f, orbit, kPrec);
      if (k == 0) {
        CHECK(tf.tau_middle == 0);
        CHECK(tf.tau_detour == 1);
      }
      Sampler sampler(100 + k);
      BigReal radius = plan_beta(plan, st.N, kPrec);
      std::vector<BigComplexPoint> pts;
      for (int i = 0; i < 10; ++i) pts.push_back(orbit.P_N + radius * sampler.ball_point(1.0, kPrec));
      CHECK(max_identity_residual(tf.word, tf.target, pts) <= identity_tol());
      CHECK(max_identity_residual(tf.shear_word(), tf.target, pts) <= identity_tol());
      CHECK(max_identity_residual(tf.conjugated_word(), tf.target, pts) <= identity_tol());

      for (const MapWord& w : {tf.shear_word(), tf.conjugated_word()})
        for (const Factor& fac : w.factors()) {
          REQUIRE(has_shear_kind(fac.map));
          CHECK(shear_form_residual(fac, plan.a, 16, 5, kPrec) <= identity_tol());
        }
      REQUIRE(tf.T.size() == tf.conjugated.size() + 1);
      CHECK(relative_error(tf.T.front(), orbit.P_N).is_zero());
      for (std::size_t n = 1; n < tf.T.size(); ++n)
        CHECK(relative_error(shortc2::apply(ElementaryMap(tf.conjugated[n - 1]), tf.T[n - 1]), tf.T[n]) <=
              identity_tol());
    }
  }
}

TEST_CASE("transition needs a nonnegative middle exponent") {
  OscillationPlan plan = one_stage(3, 3);
  TransitionOrbit orbit = consistent_orbit(poly({0, 1}), kHalf, 1, 1, pt(0.1, 0.2), pt(0.3, 0.1));
  CHECK_THROWS_AS(factor_transition(plan, 0, poly({0, 1}), orbit, kPrec), PreconditionError);
}

TEST_CASE("wandering potential") {
  OscillationPlan plan = toy_a();
  Polynomial f = poly({0, 1, 0, 0.3});
  MapWord forward = MapWord::repeated(Shear{f, plan.a}, 2);  // F^(n_1), n_1 = 2
  BigComplexPoint P0(0.2, 0.1, -0.3, 0.05, kPrec);
  BigComplexPoint Pn = shortc2::apply(forward, P0);
  BigReal log2e = BigReal::log2_constant(kPrec);
  // β_{n_1} = 2^-6, η_1 = 2^-5, D_1 = 5: log(β η) / D = -11/5 log 2 = log β / D - log 2.
  BigReal on_orbit = wandering_potential(plan, 1, forward, Pn, P0);
  BigReal expected = BigReal(-11L, kPrec) * log2e / BigReal(5L, kPrec);
  CHECK(abs(on_orbit - expected) <= BigReal::pow2(-200, kPrec));
  BigReal floor_value = BigReal(-6L, kPrec) * log2e / BigReal(5L, kPrec);
  CHECK(wandering_potential(plan, 1, forward, Pn, pt(3, 0)) >= floor_value);
  CHECK(wandering_potential(plan, 1, forward, Pn, P0 + BigComplexPoint(1e-30, 0, 0, 0, kPrec)) == on_orbit);
}

TEST_CASE("theta recursion") {
  ModelSequence seq(kHalf, {2});
  const std::size_t k_max = 10;
  std::vector<MapWord> exact, perturbed, too_far;
  for (std::size_t k = 1; k <= k_max; ++k) {
    exact.push_back(MapWord{seq.level(k)});
    BigReal half = seq.eta(k, kPrec);
    half.scale2(-1);
    perturbed.push_back(MapWord{Translation{BigComplexPoint(BigComplex(half), BigComplex(kPrec))}, seq.level(k)});
    BigReal twice = seq.eta(k, kPrec);
    twice.scale2(1);
    too_far.push_back(MapWord{Translation{BigComplexPoint(BigComplex(twice), BigComplex(kPrec))}, seq.level(k)});
  }
  std::vector<BigComplexPoint> origin{pt(0, 0)};
  ThetaReport at_zero = theta_recursion_check(seq, exact, origin, k_max, 50, 1);
  CHECK(at_zero.max_ratio == BigReal(1L, kPrec));

  Sampler sampler(12);
  std::vector<BigComplexPoint> ws;
  for (int i = 0; i < 200; ++i) ws.push_back(sampler.ball_point(1.0, kPrec));
  CHECK(theta_recursion_check(seq, exact, ws, k_max, 50, 1).max_ratio <= BigReal(3L, kPrec));
  ThetaReport pert = theta_recursion_check(seq, perturbed, ws, k_max, 50, 1);
  CHECK(pert.max_ratio <= BigReal(3L, kPrec));
  CHECK(pert.level_max.size() == k_max);
  CHECK_THROWS_AS(theta_recursion_check(seq, too_far, ws, k_max, 50, 1), PreconditionError);
}
