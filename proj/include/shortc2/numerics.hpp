#pragma once

// Arbitrary-precision real and complex scalars with a 62-bit exponent range.
//
// BigReal wraps an MPFR value. Every value carries its own mantissa precision;
// binary operations produce a result at the larger of the two operand
// precisions. Results that leave the exponent range throw OverflowError, and
// domain errors (log of zero, division by zero) throw DomainError. NaN and
// infinity never escape this layer.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <mpfr.h>

namespace shortc2 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result magnitude left the representable exponent range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Mathematical domain violation, e.g. log(0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Mantissa precision in bits; the "context handle" all scalars are built from.
class Precision {
 public:
  static constexpr int kMinBits = 64;
  static constexpr int kMaxBits = 1 << 16;
  static constexpr int kDefaultBits = 256;

  /// Throws PreconditionError unless kMinBits <= bits <= kMaxBits.
  static Precision bits(int bits);
  static Precision standard() { return Precision(kDefaultBits); }

  int bits() const { return bits_; }
  Precision doubled() const;
  Precision widened(int extra_bits) const;

  friend bool operator==(Precision, Precision) = default;

 private:
  explicit Precision(int bits) : bits_(bits) {}
  int bits_;
};

/// Same as Precision::bits; named after the configuration operation.
inline Precision set_precision(int bits) { return Precision::bits(bits); }

class BigReal {
 public:
  explicit BigReal(Precision prec);
  BigReal(long value, Precision prec);
  BigReal(int value, Precision prec) : BigReal(static_cast<long>(value), prec) {}
  BigReal(double value, Precision prec);

  /// Parses "123", "-1.5e-7", or "p/q" (integers p, q). Throws PreconditionError.
  static BigReal parse(std::string_view text, Precision prec);
  /// Exactly 2^exponent.
  static BigReal pow2(std::int64_t exponent, Precision prec);
  static BigReal log2_constant(Precision prec);
  static BigReal pi(Precision prec);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  Precision precision() const;
  /// Same value rounded to a different precision.
  BigReal rounded(Precision prec) const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  /// Binary exponent e with |x| in [2^(e-1), 2^e); 0 for zero.
  std::int64_t exponent() const;
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Decimal scientific notation with `digits` significant digits (0 = enough to round-trip).
  std::string to_string(int digits = 0) const;

  BigReal operator-() const;
  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);
  /// Multiplies by 2^k exactly.
  BigReal& scale2(std::int64_t k);

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  friend BigReal operator+(const BigReal& a, const BigReal& b);
  friend BigReal operator-(const BigReal& a, const BigReal& b);
  friend BigReal operator*(const BigReal& a, const BigReal& b);
  friend BigReal operator/(const BigReal& a, const BigReal& b);

  friend int compare(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.value_, b.value_); }
  friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
  friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.value_, b.value_) != 0; }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.value_, b.value_) != 0; }
  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

 private:
  struct Uninitialized {};
  BigReal(Uninitialized, mpfr_prec_t bits);

  mpfr_t value_;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal exp(const BigReal& x);
/// Natural log. The result carries extra guard bits (one per bit of the
/// argument's exponent length) so that the absolute error stays near 2^-p even
/// for arguments like 2^(-10^6); exp(log(x)) then round-trips at precision p.
BigReal log(const BigReal& x);
BigReal log2(const BigReal& x);
BigReal hypot(const BigReal& a, const BigReal& b);
BigReal pow(const BigReal& base, std::int64_t exponent);
BigReal atan2(const BigReal& y, const BigReal& x);
BigReal cos(const BigReal& x);
BigReal sin(const BigReal& x);
BigReal floor(const BigReal& x);
const BigReal& min(const BigReal& a, const BigReal& b);
const BigReal& max(const BigReal& a, const BigReal& b);

/// Exactly 2^(-E).
BigReal pow2_neg(std::uint64_t E, Precision prec);

/// |a - b| / |b|, or |a - b| when b is zero.
BigReal relative_error(const BigReal& a, const BigReal& b);

class BigComplex {
 public:
  explicit BigComplex(Precision prec) : re(prec), im(prec) {}
  BigComplex(BigReal real, BigReal imag) : re(std::move(real)), im(std::move(imag)) {}
  explicit BigComplex(BigReal real);
  BigComplex(double real, double imag, Precision prec) : re(real, prec), im(imag, prec) {}

  Precision precision() const { return re.precision(); }
  BigComplex rounded(Precision prec) const { return {re.rounded(prec), im.rounded(prec)}; }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  BigComplex operator-() const { return {-re, -im}; }
  BigComplex& operator+=(const BigComplex& rhs);
  BigComplex& operator-=(const BigComplex& rhs);
  BigComplex& operator*=(const BigComplex& rhs);
  BigComplex& operator*=(const BigReal& rhs);
  BigComplex& operator/=(const BigComplex& rhs);
  BigComplex& operator/=(const BigReal& rhs);
  BigComplex& scale2(std::int64_t k);

  std::string to_string(int digits = 0) const;

  BigReal re;
  BigReal im;
};

BigComplex operator+(BigComplex a, const BigComplex& b);
BigComplex operator-(BigComplex a, const BigComplex& b);
BigComplex operator*(const BigComplex& a, const BigComplex& b);
BigComplex operator*(BigComplex a, const BigReal& b);
BigComplex operator*(const BigReal& a, BigComplex b);
BigComplex operator/(const BigComplex& a, const BigComplex& b);
BigComplex operator/(BigComplex a, const BigReal& b);
bool operator==(const BigComplex& a, const BigComplex& b);

BigComplex conj(const BigComplex& x);
/// Modulus, computed without intermediate overflow.
BigReal abs(const BigComplex& x);
/// |x|^2
BigReal norm_squared(const BigComplex& x);
/// log|x|, finite whenever x is nonzero and its components are representable.
BigReal log_abs(const BigComplex& x);
/// Principal branch.
BigComplex log(const BigComplex& x);
BigComplex exp(const BigComplex& x);
/// Principal square root.
BigComplex sqrt(const BigComplex& x);
/// Integer power by repeated squaring; negative exponents invert.
BigComplex pow(const BigComplex& base, std::int64_t exponent);
BigReal relative_error(const BigComplex& a, const BigComplex& b);

/// A point (z, w) of C^2.
///
/// Two norms are exposed. max_norm is used for polydisc-style tests (the
/// potential phi_k, the theta recursion, escape checks); euclidean_norm is used
/// for the unit ball B and for distances between orbit points.
struct BigComplexPoint {
  explicit BigComplexPoint(Precision prec) : z(prec), w(prec) {}
  BigComplexPoint(BigComplex z_, BigComplex w_) : z(std::move(z_)), w(std::move(w_)) {}
  BigComplexPoint(double zr, double zi, double wr, double wi, Precision prec)
      : z(zr, zi, prec), w(wr, wi, prec) {}

  Precision precision() const { return z.precision(); }
  BigReal max_norm() const;
  BigReal euclidean_norm() const;

  BigComplexPoint& operator+=(const BigComplexPoint& rhs);
  BigComplexPoint& operator-=(const BigComplexPoint& rhs);
  BigComplexPoint& operator*=(const BigReal& s);

  BigComplex z;
  BigComplex w;
};

BigComplexPoint operator+(BigComplexPoint a, const BigComplexPoint& b);
BigComplexPoint operator-(BigComplexPoint a, const BigComplexPoint& b);
BigComplexPoint operator*(const BigReal& s, BigComplexPoint p);
BigReal euclidean_distance(const BigComplexPoint& a, const BigComplexPoint& b);
/// ||a - b|| / max(||b||, 1) in the euclidean norm.
BigReal mixed_relative_error(const BigComplexPoint& a, const BigComplexPoint& b);
/// ||a - b|| / ||b|| in the euclidean norm (absolute when b = 0).
BigReal relative_error(const BigComplexPoint& a, const BigComplexPoint& b);

}  // namespace shortc2
