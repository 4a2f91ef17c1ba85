#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cmath>

#include "shortc2/calibrated.hpp"
#include "shortc2/io.hpp"
#include "shortc2/sampling.hpp"

using namespace shortc2;

namespace {

const Precision kPrec = Precision::standard();
const Rational kHalf(1, 2);

BigComplexPoint pt(double z, double w) { return {z, 0, w, 0, kPrec}; }
BigReal real(const char* s) { return BigReal::parse(s, kPrec); }

MapWord halving() { return MapWord{AffineScale{BigComplexPoint(kPrec), real("0.5")}}; }

AttractingSystem linear_system() {
  AttractingSystem s;
  s.maps = {halving()};
  s.r = RadiusSchedule::geometric(BigReal(1L, kPrec), real("0.5"));
  s.constants = {{BigReal(1L, kPrec), real("0.5")}};
  return s;
}

}  // namespace

TEST_CASE("contraction estimates for linear maps") {
  ContractionEstimate half = estimate_contraction(halving(), BigReal(1L, kPrec), 20, 200);
  CHECK(half.spectral_radius == real("0.5"));
  CHECK(half.mu == real("0.75"));
  CHECK(half.C <= real("1.1"));
  CHECK(half.C >= BigReal(1L, kPrec));

  ContractionEstimate tau = estimate_contraction(MapWord{TauPower{kHalf, 1}}, BigReal(1L, kPrec), 20, 200);
  CHECK(tau.mu == real("0.75"));
  CHECK(tau.C <= real("1.1"));

  MapWord neutral{AffineScale{BigComplexPoint(kPrec), BigReal(1L, kPrec)}};
  CHECK_THROWS_AS(estimate_contraction(neutral, BigReal(1L, kPrec), 20, 200), PreconditionError);
  MapWord moved{Translation{pt(0.1, 0)}, AffineScale{BigComplexPoint(kPrec), real("0.5")}};
  CHECK_THROWS_AS(estimate_contraction(moved, BigReal(1L, kPrec), 20, 200), PreconditionError);
}

TEST_CASE("radius schedules") {
  RadiusSchedule g = RadiusSchedule::geometric(BigReal(1L, kPrec), real("0.5"));
  CHECK(g.at(0) == BigReal(1L, kPrec));
  CHECK(g.at(5) == BigReal::pow2(-5, kPrec));
  RadiusSchedule listed{{real("2"), real("1")}, std::nullopt};
  CHECK(listed.at(1) == BigReal(1L, kPrec));
  CHECK_THROWS_AS(listed.at(2), PreconditionError);
  RadiusSchedule continued{{real("2"), real("1")}, real("0.25")};
  CHECK(continued.at(3) == real("0.0625"));
}

TEST_CASE("iterates for the linear half-contraction") {
  CalibratedBasin b = choose_iterates(linear_system(), 10, kPrec);
  REQUIRE(b.depth() == 11);
  CHECK(b.n[0] == 1);
  for (std::int64_t j = 1; j <= 10; ++j) CHECK(b.n[static_cast<std::size_t>(j)] == j * (j + 1));
  for (std::size_t j = 0; j <= 10; ++j) {
    CHECK(rate_ratio(b, j) <= BigReal(1L, kPrec) / BigReal(static_cast<long>(j + 1), kPrec) + BigReal::pow2(-200, kPrec));
    // Nesting: C μ^n r_j ≤ r_{j+1}.
    CHECK(b.constants[j].C * pow(b.constants[j].mu, b.n[j]) * b.r[j] <= b.r[j + 1]);
  }
}

TEST_CASE("radii must decrease") {
  AttractingSystem s = linear_system();
  s.r = RadiusSchedule{{real("1")}, real("1")};
  CHECK_THROWS_AS(choose_iterates(s, 3, kPrec), PreconditionError);
}

TEST_CASE("slow contraction needs many iterates") {
  AttractingSystem s = linear_system();
  s.constants = {{BigReal(1L, kPrec), real("0.999")}};
  CalibratedBasin b = choose_iterates(s, 3, kPrec);
  // r_0 = 1 leaves only nesting: n_0 = ceil(log 2 / |log 0.999|).
  CHECK(b.n[0] == static_cast<std::int64_t>(std::ceil(std::log(2.0) / -std::log(0.999))));
  for (std::size_t j = 1; j <= 3; ++j) {
    double nesting = std::log(2.0) / -std::log(0.999);
    double rate = (j + 1) * j * std::log(2.0) / -std::log(0.999);
    CHECK(b.n[j] == static_cast<std::int64_t>(std::ceil(std::max(nesting, rate) - 1e-9)));
  }
}

TEST_CASE("membership") {
  CalibratedBasin b = choose_iterates(linear_system(), 12, kPrec);
  Membership m = calibrated_membership(b, pt(0.1, 0), 12);
  CHECK(m.inside);
  CHECK(m.j == 0);
  CHECK(calibrated_membership(b, pt(0, 0), 12).j == 0);
  Membership far = calibrated_membership(b, pt(1e6, 0), 12);
  CHECK(far.inside);
  CHECK(far.j >= 1);
  CHECK(far.j <= 12);
  // Beyond reach at this depth: ‖P‖ = 2^4000.
  BigComplexPoint huge(BigComplex(BigReal::pow2(4000, kPrec)), BigComplex(kPrec));
  Membership unknown = calibrated_membership(b, huge, 3);
  CHECK_FALSE(unknown.inside);
  CHECK(unknown.j == 3);

  std::vector<BigComplexPoint> pts{pt(0.1, 0), pt(1e6, 0), pt(3, -2), huge};
  auto serial = calibrated_membership(b, pts, 12, 1);
  auto parallel = calibrated_membership(b, pts, 12, 4);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(serial[i].inside == parallel[i].inside);
    CHECK(serial[i].j == parallel[i].j);
  }
}

TEST_CASE("potential of the linear system with n = (1, 4)") {
  CalibratedBasin b;
  b.maps = {halving(), halving()};
  b.r = {BigReal(1L, kPrec), real("0.5"), real("0.25")};
  b.constants = {{BigReal(1L, kPrec), real("0.5")}, {BigReal(1L, kPrec), real("0.5")}};
  b.n = {1, 4};
  auto g = appendix_potential(b, pt(0.1, 0), 1);
  REQUIRE(g);
  double closed = (std::log(0.1) - 5 * std::log(2.0)) / (4 * std::log(2.0));
  CHECK(g->to_double() == doctest::Approx(closed).epsilon(1e-14));
  CHECK(g->to_double() == doctest::Approx(-2.0806).epsilon(1e-3 / 2.0806));
  CHECK_FALSE(appendix_potential(b, pt(0, 0), 1));
}

TEST_CASE("potential limit on in-basin samples") {
  CalibratedBasin b = choose_iterates(linear_system(), 12, kPrec);
  Sampler sampler(4);
  BigReal limit = real("-0.9");
  for (int i = 0; i < 100; ++i) {
    BigComplexPoint p = sampler.ball_point(50.0, kPrec);
    if (p.euclidean_norm().is_zero()) continue;
    for (std::size_t j = 8; j <= 12; ++j) CHECK(*appendix_potential(b, p, j) <= limit);
  }
}

TEST_CASE("observed nesting on an estimated system") {
  AttractingSystem s = json_system(read_json_file(std::string(SHORTC2_FIXTURES) + "/calibrated-estimated.json"), kPrec);
  REQUIRE(s.constants.empty());
  CalibratedBasin b = choose_iterates(s, 4, kPrec);
  for (std::size_t j = 0; j <= 4; ++j) {
    CHECK(observed_nesting(b, j, 1000, 9) < BigReal(1L, kPrec));
    CHECK(rate_ratio(b, j) <= BigReal(1L, kPrec) / BigReal(static_cast<long>(j + 1), kPrec) + BigReal::pow2(-200, kPrec));
  }
}
