#include "shortc2/numerics.hpp"

#include <bit>
#include <cstring>
#include <memory>
#include <string>

namespace shortc2 {

namespace {

// MPFR keeps the exponent range per thread (or per process without TLS);
// widen it to the maximum once on every thread that touches a BigReal.
void ensure_range() {
  thread_local bool ready = false;
  if (!ready) {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    ready = true;
  }
}

void check(mpfr_srcptr r, const char* op) {
  if (mpfr_nan_p(r)) throw DomainError(std::string("undefined result in ") + op);
  if (mpfr_inf_p(r)) throw OverflowError(std::string("exponent overflow in ") + op);
}

// Multiplicative operations can also underflow below 2^emin.
class UnderflowGuard {
 public:
  explicit UnderflowGuard(const char* op) : op_(op) { mpfr_clear_underflow(); }
  void verify(mpfr_srcptr r) const {
    check(r, op_);
    if (mpfr_underflow_p()) {
      mpfr_clear_underflow();
      throw OverflowError(std::string("exponent underflow in ") + op_);
    }
  }

 private:
  const char* op_;
};

mpfr_prec_t wider(const BigReal& a, const BigReal& b) {
  return std::max(mpfr_get_prec(a.get()), mpfr_get_prec(b.get()));
}

}  // namespace

// ---- Precision -------------------------------------------------------------

Precision Precision::bits(int bits) {
  if (bits < kMinBits) throw PreconditionError("precision " + std::to_string(bits) + " below minimum of 64 bits");
  if (bits > kMaxBits) throw PreconditionError("precision " + std::to_string(bits) + " above maximum of 65536 bits");
  return Precision(bits);
}

Precision Precision::doubled() const { return Precision::bits(2 * bits_); }

Precision Precision::widened(int extra_bits) const {
  return Precision(std::min(kMaxBits, bits_ + std::max(0, extra_bits)));
}

// ---- BigReal ---------------------------------------------------------------

BigReal::BigReal(Uninitialized, mpfr_prec_t bits) {
  ensure_range();
  mpfr_init2(value_, bits);
}

BigReal::BigReal(Precision prec) : BigReal(Uninitialized{}, prec.bits()) { mpfr_set_zero(value_, 1); }

BigReal::BigReal(long value, Precision prec) : BigReal(Uninitialized{}, prec.bits()) {
  mpfr_set_si(value_, value, MPFR_RNDN);
}

BigReal::BigReal(double value, Precision prec) : BigReal(Uninitialized{}, prec.bits()) {
  mpfr_set_d(value_, value, MPFR_RNDN);
  check(value_, "conversion from double");
}

BigReal BigReal::parse(std::string_view text, Precision prec) {
  std::string s(text);
  auto bad = [&] { return PreconditionError("not a number: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  BigReal out(prec);
  if (slash != std::string::npos) {
    BigReal num = parse(s.substr(0, slash), prec.widened(64));
    BigReal den = parse(s.substr(slash + 1), prec.widened(64));
    if (!mpfr_integer_p(num.get()) || !mpfr_integer_p(den.get())) throw bad();
    if (den.is_zero()) throw PreconditionError("zero denominator in '" + s + "'");
    mpfr_div(out.value_, num.value_, den.value_, MPFR_RNDN);
    return out;
  }
  char* end = nullptr;
  mpfr_strtofr(out.value_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end != s.c_str() + s.size()) throw bad();
  if (mpfr_nan_p(out.value_) || mpfr_inf_p(out.value_)) throw bad();
  return out;
}

BigReal BigReal::pow2(std::int64_t exponent, Precision prec) {
  BigReal out(Uninitialized{}, prec.bits());
  mpfr_set_ui_2exp(out.value_, 1, exponent, MPFR_RNDN);
  check(out.value_, "pow2");
  return out;
}

BigReal BigReal::log2_constant(Precision prec) {
  BigReal out(Uninitialized{}, prec.bits());
  mpfr_const_log2(out.value_, MPFR_RNDN);
  return out;
}

BigReal BigReal::pi(Precision prec) {
  BigReal out(Uninitialized{}, prec.bits());
  mpfr_const_pi(out.value_, MPFR_RNDN);
  return out;
}

BigReal::BigReal(const BigReal& other) : BigReal(Uninitialized{}, mpfr_get_prec(other.value_)) {
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  std::memcpy(value_, other.value_, sizeof(mpfr_t));
  other.value_->_mpfr_d = nullptr;
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    if (mpfr_get_prec(value_) != mpfr_get_prec(other.value_)) mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigReal::~BigReal() {
  if (value_->_mpfr_d != nullptr) mpfr_clear(value_);
}

Precision BigReal::precision() const { return Precision::bits(static_cast<int>(mpfr_get_prec(value_))); }

BigReal BigReal::rounded(Precision prec) const {
  BigReal out(Uninitialized{}, prec.bits());
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

std::int64_t BigReal::exponent() const { return is_zero() ? 0 : mpfr_get_exp(value_); }

std::string BigReal::to_string(int digits) const {
  if (is_zero()) return "0";
  std::size_t n = digits > 0 ? static_cast<std::size_t>(digits) : mpfr_get_str_ndigits(10, mpfr_get_prec(value_));
  mpfr_exp_t exp10 = 0;
  std::unique_ptr<char, void (*)(char*)> raw(mpfr_get_str(nullptr, &exp10, 10, n, value_, MPFR_RNDN),
                                             [](char* p) { mpfr_free_str(p); });
  std::string mant(raw.get());
  std::string sign;
  if (mant.front() == '-') {
    sign = "-";
    mant.erase(0, 1);
  }
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  std::string out = sign + mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  if (exp10 - 1 != 0) out += "e" + std::to_string(static_cast<long long>(exp10 - 1));
  return out;
}

BigReal BigReal::operator-() const {
  BigReal out(*this);
  mpfr_neg(out.value_, out.value_, MPFR_RNDN);
  return out;
}

BigReal& BigReal::operator+=(const BigReal& rhs) {
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  check(value_, "addition");
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  check(value_, "subtraction");
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  UnderflowGuard guard("multiplication");
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  guard.verify(value_);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  if (rhs.is_zero()) throw DomainError("division by zero");
  UnderflowGuard guard("division");
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  guard.verify(value_);
  return *this;
}

BigReal& BigReal::scale2(std::int64_t k) {
  UnderflowGuard guard("scaling by a power of two");
  mpfr_mul_2si(value_, value_, k, MPFR_RNDN);
  guard.verify(value_);
  return *this;
}

BigReal operator+(const BigReal& a, const BigReal& b) {
  BigReal out(BigReal::Uninitialized{}, wider(a, b));
  mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
  check(out.value_, "addition");
  return out;
}

BigReal operator-(const BigReal& a, const BigReal& b) {
  BigReal out(BigReal::Uninitialized{}, wider(a, b));
  mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
  check(out.value_, "subtraction");
  return out;
}

BigReal operator*(const BigReal& a, const BigReal& b) {
  BigReal out(BigReal::Uninitialized{}, wider(a, b));
  UnderflowGuard guard("multiplication");
  mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
  guard.verify(out.value_);
  return out;
}

BigReal operator/(const BigReal& a, const BigReal& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  BigReal out(BigReal::Uninitialized{}, wider(a, b));
  UnderflowGuard guard("division");
  mpfr_div(out.value_, a.value_, b.value_, MPFR_RNDN);
  guard.verify(out.value_);
  return out;
}

BigReal abs(const BigReal& x) {
  BigReal out(x);
  mpfr_abs(out.get(), out.get(), MPFR_RNDN);
  return out;
}

BigReal sqrt(const BigReal& x) {
  if (x.sign() < 0) throw DomainError("square root of a negative number");
  BigReal out(x.precision());
  mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal exp(const BigReal& x) {
  BigReal out(x.precision());
  UnderflowGuard guard("exp");
  mpfr_exp(out.get(), x.get(), MPFR_RNDN);
  guard.verify(out.get());
  return out;
}

namespace {
int log_guard_bits(const BigReal& x) {
  std::uint64_t e = static_cast<std::uint64_t>(std::abs(x.exponent()));
  return static_cast<int>(std::bit_width(e));
}
}  // namespace

BigReal log(const BigReal& x) {
  if (x.sign() <= 0) throw DomainError("log of a non-positive number");
  BigReal out(x.precision().widened(log_guard_bits(x)));
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal log2(const BigReal& x) {
  if (x.sign() <= 0) throw DomainError("log2 of a non-positive number");
  BigReal out(x.precision().widened(log_guard_bits(x)));
  mpfr_log2(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal hypot(const BigReal& a, const BigReal& b) {
  BigReal out(a.precision().bits() >= b.precision().bits() ? a.precision() : b.precision());
  mpfr_hypot(out.get(), a.get(), b.get(), MPFR_RNDN);
  check(out.get(), "hypot");
  return out;
}

BigReal pow(const BigReal& base, std::int64_t exponent) {
  if (base.is_zero() && exponent < 0) throw DomainError("negative power of zero");
  BigReal out(base.precision());
  UnderflowGuard guard("pow");
  mpfr_pow_si(out.get(), base.get(), exponent, MPFR_RNDN);
  guard.verify(out.get());
  return out;
}

BigReal atan2(const BigReal& y, const BigReal& x) {
  BigReal out(y.precision().bits() >= x.precision().bits() ? y.precision() : x.precision());
  mpfr_atan2(out.get(), y.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal cos(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_cos(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal sin(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_sin(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal floor(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_floor(out.get(), x.get());
  return out;
}

const BigReal& min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }
const BigReal& max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }

BigReal pow2_neg(std::uint64_t E, Precision prec) {
  if (E >= (std::uint64_t{1} << 62)) throw OverflowError("2^-E with E >= 2^62");
  return BigReal::pow2(-static_cast<std::int64_t>(E), prec);
}

BigReal relative_error(const BigReal& a, const BigReal& b) {
  BigReal diff = abs(a - b);
  if (b.is_zero()) return diff;
  return diff / abs(b);
}

// ---- BigComplex ------------------------------------------------------------

BigComplex::BigComplex(BigReal real) : re(std::move(real)), im(re.precision()) {}

BigComplex& BigComplex::operator+=(const BigComplex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

BigComplex& BigComplex::operator-=(const BigComplex& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}

BigComplex& BigComplex::operator*=(const BigComplex& rhs) {
  *this = *this * rhs;
  return *this;
}

BigComplex& BigComplex::operator*=(const BigReal& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}

BigComplex& BigComplex::operator/=(const BigComplex& rhs) {
  *this = *this / rhs;
  return *this;
}

BigComplex& BigComplex::operator/=(const BigReal& rhs) {
  re /= rhs;
  im /= rhs;
  return *this;
}

BigComplex& BigComplex::scale2(std::int64_t k) {
  re.scale2(k);
  im.scale2(k);
  return *this;
}

std::string BigComplex::to_string(int digits) const {
  return "(" + re.to_string(digits) + ", " + im.to_string(digits) + ")";
}

BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }

BigComplex operator*(const BigComplex& a, const BigComplex& b) {
  Precision prec = a.re.precision().bits() >= b.re.precision().bits() ? a.precision() : b.precision();
  BigComplex out(prec);
  // Each component is a correctly rounded a*b -/+ c*d.
  UnderflowGuard guard("complex multiplication");
  mpfr_fmms(out.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_fmma(out.im.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  guard.verify(out.re.get());
  guard.verify(out.im.get());
  return out;
}

BigComplex operator*(BigComplex a, const BigReal& b) { return a *= b; }
BigComplex operator*(const BigReal& a, BigComplex b) { return b *= a; }

BigComplex operator/(const BigComplex& a, const BigComplex& b) {
  if (b.is_zero()) throw DomainError("complex division by zero");
  // Scale the divisor near 1 so |b|^2 cannot leave the exponent range.
  std::int64_t k = std::max(b.re.exponent(), b.im.exponent());
  BigComplex bs(b);
  bs.scale2(-k);
  BigComplex num = a * conj(bs);
  num /= norm_squared(bs);
  num.scale2(-k);
  return num;
}

BigComplex operator/(BigComplex a, const BigReal& b) { return a /= b; }

bool operator==(const BigComplex& a, const BigComplex& b) { return a.re == b.re && a.im == b.im; }

BigComplex conj(const BigComplex& x) { return {x.re, -x.im}; }

BigReal abs(const BigComplex& x) { return hypot(x.re, x.im); }

BigReal norm_squared(const BigComplex& x) {
  BigReal out(x.precision());
  UnderflowGuard guard("norm");
  mpfr_fmma(out.get(), x.re.get(), x.re.get(), x.im.get(), x.im.get(), MPFR_RNDN);
  guard.verify(out.get());
  return out;
}

BigReal log_abs(const BigComplex& x) {
  if (x.is_zero()) throw DomainError("log of zero");
  BigReal a = abs(x.re);
  BigReal b = abs(x.im);
  if (a < b) std::swap(a, b);
  BigReal out = log(a);
  if (!b.is_zero()) {
    BigReal ratio = b / a;
    ratio *= ratio;
    BigReal l1p(out.precision());
    mpfr_log1p(l1p.get(), ratio.get(), MPFR_RNDN);
    l1p.scale2(-1);
    out += l1p;
  }
  return out;
}

BigComplex log(const BigComplex& x) {
  BigReal mag = log_abs(x);
  BigReal arg = atan2(x.im.rounded(mag.precision()), x.re.rounded(mag.precision()));
  return {std::move(mag), std::move(arg)};
}

BigComplex exp(const BigComplex& x) {
  BigReal scale = exp(x.re);
  BigComplex out(cos(x.im), sin(x.im));
  out *= scale;
  return out;
}

BigComplex sqrt(const BigComplex& x) {
  if (x.is_zero()) return BigComplex(x.precision());
  BigReal r = abs(x);
  if (x.re.sign() >= 0) {
    BigReal t = r + x.re;
    t.scale2(-1);
    t = sqrt(t);
    BigReal i = x.im / t;
    i.scale2(-1);
    return {std::move(t), std::move(i)};
  }
  BigReal t = r - x.re;
  t.scale2(-1);
  t = sqrt(t);
  BigReal re = abs(x.im) / t;
  re.scale2(-1);
  if (x.im.sign() < 0) t = -t;
  return {std::move(re), std::move(t)};
}

BigComplex pow(const BigComplex& base, std::int64_t exponent) {
  if (exponent < 0) {
    BigComplex one(BigReal(1L, base.precision()));
    return one / pow(base, -exponent);
  }
  BigComplex result(BigReal(1L, base.precision()));
  BigComplex square(base);
  auto e = static_cast<std::uint64_t>(exponent);
  while (e != 0) {
    if (e & 1U) result *= square;
    e >>= 1U;
    if (e != 0) square *= square;
  }
  return result;
}

BigReal relative_error(const BigComplex& a, const BigComplex& b) {
  BigReal diff = abs(a - b);
  if (b.is_zero()) return diff;
  return diff / abs(b);
}

// ---- BigComplexPoint -------------------------------------------------------

BigReal BigComplexPoint::max_norm() const { return max(abs(z), abs(w)); }

BigReal BigComplexPoint::euclidean_norm() const { return hypot(abs(z), abs(w)); }

BigComplexPoint& BigComplexPoint::operator+=(const BigComplexPoint& rhs) {
  z += rhs.z;
  w += rhs.w;
  return *this;
}

BigComplexPoint& BigComplexPoint::operator-=(const BigComplexPoint& rhs) {
  z -= rhs.z;
  w -= rhs.w;
  return *this;
}

BigComplexPoint& BigComplexPoint::operator*=(const BigReal& s) {
  z *= s;
  w *= s;
  return *this;
}

BigComplexPoint operator+(BigComplexPoint a, const BigComplexPoint& b) { return a += b; }
BigComplexPoint operator-(BigComplexPoint a, const BigComplexPoint& b) { return a -= b; }
BigComplexPoint operator*(const BigReal& s, BigComplexPoint p) { return p *= s; }

BigReal euclidean_distance(const BigComplexPoint& a, const BigComplexPoint& b) { return (a - b).euclidean_norm(); }

BigReal mixed_relative_error(const BigComplexPoint& a, const BigComplexPoint& b) {
  BigReal scale = b.euclidean_norm();
  BigReal one(1L, scale.precision());
  return euclidean_distance(a, b) / max(scale, one);
}

BigReal relative_error(const BigComplexPoint& a, const BigComplexPoint& b) {
  BigReal diff = euclidean_distance(a, b);
  BigReal scale = b.euclidean_norm();
  if (scale.is_zero()) return diff;
  return diff / scale;
}

}  // namespace shortc2
