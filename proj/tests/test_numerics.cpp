#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "shortc2/numerics.hpp"

using namespace shortc2;

namespace {

const Precision kPrec = Precision::standard();

BigReal tol_bits(std::int64_t e) { return BigReal::pow2(e, kPrec); }

}  // namespace

TEST_CASE("precision bounds") {
  CHECK(set_precision(256).bits() == 256);
  CHECK(Precision::bits(64).bits() == 64);
  CHECK_THROWS_AS(set_precision(32), PreconditionError);
  CHECK_THROWS_AS(Precision::bits(Precision::kMaxBits + 1), PreconditionError);
  CHECK(Precision::bits(100).doubled().bits() == 200);
  CHECK(BigReal(1L, Precision::bits(100)).precision() == Precision::bits(100));
}

TEST_CASE("tiny powers of two stay finite") {
  Precision p64 = Precision::bits(64);
  BigReal x = BigReal::pow2(-1024, p64);
  CHECK_FALSE(x.is_zero());
  CHECK(log2(x) == BigReal(-1024L, p64));
  BigReal deep = BigReal::pow2(-(std::int64_t{1} << 40), p64);
  CHECK_FALSE(deep.is_zero());
  CHECK(deep.exponent() == -(std::int64_t{1} << 40) + 1);
}

TEST_CASE("pow2_neg examples") {
  CHECK(pow2_neg(0, kPrec) == BigReal(1L, kPrec));
  CHECK(pow2_neg(4, kPrec) == BigReal::parse("0.0625", kPrec));
  CHECK(log2(pow2_neg(1024, kPrec)) == BigReal(-1024L, kPrec));
}

TEST_CASE("pow2_neg times 2^E is exactly one") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> dist(0, 1000000);
  BigReal one(1L, kPrec);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t E = i == 0 ? 1000000 : dist(rng);
    CHECK(pow2_neg(E, kPrec) * BigReal::pow2(static_cast<std::int64_t>(E), kPrec) == one);
  }
}

TEST_CASE("parse") {
  CHECK(BigReal::parse("3/8", kPrec) == BigReal(0.375, kPrec));
  CHECK(BigReal::parse("-1.5e-7", kPrec).to_double() == doctest::Approx(-1.5e-7).epsilon(1e-15));
  CHECK(BigReal::parse("42", kPrec) == BigReal(42L, kPrec));
  CHECK_THROWS_AS(BigReal::parse("abc", kPrec), PreconditionError);
  CHECK_THROWS_AS(BigReal::parse("1/0", kPrec), PreconditionError);
  CHECK_THROWS_AS(BigReal::parse("", kPrec), PreconditionError);
}

TEST_CASE("domain and overflow errors") {
  BigReal zero(kPrec);
  BigReal one(1L, kPrec);
  CHECK_THROWS_AS(log(zero), DomainError);
  CHECK_THROWS_AS(one / zero, DomainError);
  CHECK_THROWS_AS(sqrt(-one), DomainError);
  CHECK_THROWS_AS(log_abs(BigComplex(kPrec)), DomainError);
  BigReal huge = BigReal::pow2(std::int64_t{1} << 60, kPrec);
  CHECK_THROWS_AS(pow(huge, 16), OverflowError);
  CHECK_THROWS_AS(exp(huge), OverflowError);
}

TEST_CASE("mixed precision takes the wider operand") {
  BigReal a(1L, Precision::bits(80));
  BigReal b(3L, Precision::bits(300));
  CHECK((a / b).precision().bits() == 300);
  CHECK((b / a).precision().bits() == 300);
}

TEST_CASE("elementary functions against long double") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    double xr = u(rng), xi = u(rng);
    std::complex<long double> ref(xr, xi);
    BigComplex x(xr, xi, kPrec);
    auto near = [](const BigComplex& got, std::complex<long double> want) {
      long double err = std::abs(std::complex<long double>(got.re.to_double(), got.im.to_double()) - want);
      return err <= 1e-13L * std::max<long double>(1, std::abs(want));
    };
    CHECK(near(exp(x), std::exp(ref)));
    CHECK(near(log(x), std::log(ref)));
    CHECK(near(sqrt(x), std::sqrt(ref)));
    CHECK(near(pow(x, 5), std::pow(ref, 5)));
    CHECK(near(pow(x, -3), std::pow(ref, -3)));
    CHECK(abs(x).to_double() == doctest::Approx(static_cast<double>(std::abs(ref))).epsilon(1e-14));
  }
}

TEST_CASE("exp(log x) round-trips over a wide exponent range") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<std::int64_t> expo(-99990, 99990);
  BigReal tol = tol_bits(8 - kPrec.bits());
  BigReal worst(kPrec);
  for (int i = 0; i < 10000; ++i) {
    double re = mant(rng), im = mant(rng);
    if (re == 0 && im == 0) continue;
    BigComplex x(re, im, kPrec);
    x.scale2(expo(rng));
    worst = max(worst, relative_error(exp(log(x)), x));
  }
  CHECK(worst <= tol);
}

TEST_CASE("doubling the precision changes results by at most 2^(-p/2)") {
  auto pipeline = [](Precision p) {
    BigComplex x(BigReal::parse("7/3", p), BigReal::parse("-2/9", p));
    BigComplex acc = x;
    for (int i = 0; i < 20; ++i) acc = sqrt(exp(acc) + pow(x, 3)) / (acc + x);
    return acc;
  };
  BigComplex lo = pipeline(kPrec);
  BigComplex hi = pipeline(kPrec.doubled());
  CHECK(relative_error(lo.rounded(kPrec.doubled()), hi) <= BigReal::pow2(-kPrec.bits() / 2, kPrec));
}

TEST_CASE("points and norms") {
  BigComplexPoint p(3, 4, 0, 12, kPrec);
  CHECK(p.euclidean_norm() == BigReal(13L, kPrec));
  CHECK(p.max_norm() == BigReal(12L, kPrec));
  BigComplexPoint q(0, 0, 0, 0, kPrec);
  CHECK(euclidean_distance(p, q) == BigReal(13L, kPrec));
  CHECK(relative_error(p, q) == BigReal(13L, kPrec));
  CHECK(relative_error(BigReal(3L, kPrec), BigReal(2L, kPrec)) == BigReal(0.5, kPrec));
  CHECK(relative_error(BigReal(3L, kPrec), BigReal(kPrec)) == BigReal(3L, kPrec));
}

TEST_CASE("log carries enough guard bits for tiny arguments") {
  BigReal x = BigReal::pow2(-1000000, kPrec);
  BigReal expected = BigReal(-1000000L, kPrec) * BigReal::log2_constant(kPrec);
  CHECK(relative_error(log(x), expected) <= tol_bits(4 - kPrec.bits()));
}
