#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cmath>

#include "shortc2/equivalence.hpp"
#include "shortc2/shortbasin.hpp"

using namespace shortc2;

namespace {

const Precision kPrec = Precision::standard();
const Rational kHalf(1, 2);

BigComplexPoint pt(double z, double w) { return {z, 0, w, 0, kPrec}; }
BigReal real(const char* s) { return BigReal::parse(s, kPrec); }

std::vector<MapWord> model_levels(const ModelSequence& seq, std::size_t n) {
  std::vector<MapWord> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(MapWord{seq.level(k)});
  return out;
}

std::vector<MapWord> translated(const ModelSequence& seq, std::size_t n, const BigReal& c) {
  std::vector<MapWord> out;
  for (std::size_t k = 1; k <= n; ++k)
    out.push_back(MapWord{Translation{BigComplexPoint(BigComplex(c), BigComplex(c.precision()))}, seq.level(k)});
  return out;
}

// Largest singular value of [[c, 1/4], [1/4, 0]] over |c| ≤ 1/2, by grid in double.
double model_norm_oracle() {
  double best = 0;
  for (int i = 0; i <= 400; ++i) {
    double r = 0.5 * i / 400;
    for (int t = 0; t <= 64; ++t) {
      double th = 6.283185307179586 * t / 64;
      double cr = r * std::cos(th), ci = r * std::sin(th);
      // M^* M for M = [[c, b], [b, 0]], b = 1/4.
      double b = 0.25;
      double a11 = cr * cr + ci * ci + b * b, a22 = b * b;
      double a12r = cr * b, a12i = -ci * b;
      double tr = a11 + a22, det = a11 * a22 - (a12r * a12r + a12i * a12i);
      best = std::max(best, std::sqrt((tr + std::sqrt(tr * tr - 4 * det)) / 2));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("Lipschitz constants of simple maps") {
  SampledDomain ball = SampledDomain::unit_ball(kPrec);
  LipschitzEstimate tau = lipschitz_constant(MapWord{TauPower{kHalf, 1}}, ball, 5);
  CHECK(abs(tau.constant - real("0.55")) <= BigReal::pow2(-200, kPrec));
  LipschitzEstimate id = lipschitz_constant(MapWord{}, ball, 5);
  CHECK(abs(id.constant - real("1.1")) <= BigReal::pow2(-200, kPrec));
  CHECK(id.sampled_sup == BigReal(1L, kPrec));

  LipschitzEstimate model = refined_lipschitz_constant(MapWord{Model{kHalf, 2, 2}}, ball, 13);
  double oracle = model_norm_oracle();
  CHECK(oracle == doctest::Approx(0.6036).epsilon(1e-3));
  CHECK(model.constant.to_double() == doctest::Approx(0.66).epsilon(0.03 / 0.66));
  CHECK(model.sampled_sup.to_double() <= oracle + 1e-12);
  CHECK(model.sampled_sup.to_double() >= 0.95 * oracle);
  CHECK(model.converged);

  // Worker count does not change the estimate.
  LipschitzEstimate par = refined_lipschitz_constant(MapWord{Model{kHalf, 2, 2}}, ball, 13, 4);
  CHECK(par.constant == model.constant);
}

TEST_CASE("sampled sups") {
  // Sphere samples are normalized in double precision.
  CHECK(abs(boundary_sup(MapWord{TauPower{kHalf, 1}}, 200, 1, kPrec) - real("0.5")) <= real("1e-15"));
  BigComplexPoint v = pt(3e-5, -4e-5);
  BigReal dev = sampled_deviation(MapWord{Translation{v}, Model{kHalf, 2, 2}}, MapWord{Model{kHalf, 2, 2}}, 200, 2,
                                  kPrec);
  CHECK(relative_error(dev, v.euclidean_norm()) <= BigReal::pow2(-100, kPrec));
}

TEST_CASE("composite order") {
  std::vector<MapWord> levels{MapWord{Translation{pt(1, 0)}}, MapWord{TauPower{kHalf, 1}}};
  // H_2 o H_1 (x) = τ(x + (1, 0)).
  BigComplexPoint got = shortc2::apply(composite(levels, 2), pt(1, 2));
  CHECK(relative_error(got, pt(1, 1)).is_zero());
  CHECK(composite(levels, 0).empty());
}

TEST_CASE("epsilon schedule for one model level") {
  ModelSequence seq(kHalf, {2});
  auto H = model_levels(seq, 1);
  EpsilonSchedule s = epsilon_schedule(H, 1, kPrec);
  REQUIRE(s.levels.size() == 1);
  const ScheduleLevel& lv = s.levels[0];
  CHECK(s.delta_tilde == real("0.25"));
  CHECK(lv.M.constant.sign() > 0);
  CHECK(lv.N.constant.sign() > 0);
  CHECK(lv.delta.sign() > 0);
  BigReal expected = min(s.delta_tilde, lv.delta) / (BigReal(2L, kPrec) * lv.M.constant * lv.N.constant);
  CHECK(relative_error(lv.epsilon, expected) <= BigReal::pow2(8 - kPrec.bits(), kPrec));
  CHECK(lv.containment_sup < BigReal(1L, kPrec));
}

TEST_CASE("epsilon schedule rejects maps that leave the ball") {
  std::vector<MapWord> H{MapWord{Model{Rational(2), 2, 1}}};
  CHECK_THROWS_AS(epsilon_schedule(H, 1, kPrec), PreconditionError);
}

TEST_CASE("epsilon schedule shrinks at least geometrically") {
  ModelSequence seq(kHalf, {2});
  auto H = model_levels(seq, 5);
  EpsilonSchedule s = epsilon_schedule(H, 5, kPrec);
  REQUIRE(s.levels.size() == 5);
  for (std::size_t n = 1; n < 5; ++n) {
    BigReal half = s.levels[n - 1].epsilon;
    half.scale2(-1);
    CHECK(s.levels[n].epsilon <= half);
  }
}

TEST_CASE("conjugacy is the identity for identical sequences") {
  ModelSequence seq(kHalf, {2});
  auto H = model_levels(seq, 4);
  for (const auto& p : {pt(0, 0), pt(0.5, -0.3), BigComplexPoint(0.2, 0.4, -0.6, 0.1, kPrec)}) {
    ConjugacyTrace t = build_conjugacy(H, H, p, 4);
    CHECK(t.entry_level == 0);
    REQUIRE(t.steps.size() == 4);
    for (const auto& step : t.steps) {
      CHECK(step.increment.is_zero());
      CHECK(relative_error(step.phi, p).is_zero());
    }
  }
}

TEST_CASE("conjugacy under a small perturbation of the constant term") {
  ModelSequence seq(kHalf, {2});
  const std::size_t levels = 4;
  auto H = model_levels(seq, levels);
  EpsilonSchedule s = epsilon_schedule(H, levels, kPrec);
  BigReal c = real("1e-9");
  auto G = translated(seq, levels, c);
  ConjugacyTrace t = build_conjugacy(H, G, pt(0, 0), levels);
  REQUIRE(t.steps.size() == levels);
  for (const auto& step : t.steps) {
    const ScheduleLevel& lv = s.levels[step.n - 1];
    BigReal deviation = sampled_deviation(H[step.n - 1], G[step.n - 1], 100, 3, kPrec);
    CHECK(relative_error(deviation, c) <= BigReal::pow2(-100, kPrec));
    CHECK(step.increment <= lv.M.constant * lv.N.constant * deviation);
  }
  CHECK(t.steps.front().increment.sign() > 0);
}

TEST_CASE("conjugacy rejects points outside the basin") {
  ModelSequence seq(kHalf, {2});
  auto H = model_levels(seq, 4);
  CHECK_THROWS_AS(build_conjugacy(H, H, pt(8, 0), 4), PreconditionError);
}

TEST_CASE("points entering the ball late converge under shrinking perturbations") {
  ModelSequence seq(kHalf, {2});
  const std::size_t levels = 5;
  auto H = model_levels(seq, levels);
  // c_n = 2^(-64 n) shrinks like an ε-schedule.
  std::vector<MapWord> G;
  for (std::size_t n = 1; n <= levels; ++n) {
    BigComplexPoint v(BigComplex(BigReal::pow2(-64 * static_cast<std::int64_t>(n), kPrec)), BigComplex(kPrec));
    G.push_back(MapWord{Translation{v}, seq.level(n)});
  }
  ConjugacyTrace t = build_conjugacy(H, G, pt(3, 0), levels);
  CHECK(t.entry_level >= 1);
  CHECK(t.converged);
  for (std::size_t i = 1; i < t.steps.size(); ++i) CHECK(t.steps[i].increment < t.steps[i - 1].increment);
}
