#pragma once

// Elementary automorphisms of C^2 and finite composition words of them.
//
// Structural parameters (the Jacobian parameter a, degrees, exponents) are
// stored exactly; only evaluation rounds. Words are applied right to left:
// factors.front() is the outermost map, matching H_{m,n} = H_m o ... o H_{n+1}.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

#include "shortc2/numerics.hpp"

namespace shortc2 {

using Rational = boost::rational<std::int64_t>;

/// Accepts "p/q", integers and plain decimals ("0.25").
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
BigReal to_big(const Rational& r, Precision prec);
/// r^e, exact when r is a signed power of two, otherwise computed with enough
/// guard bits that the result is accurate to precision prec.
BigReal rational_pow(const Rational& r, std::int64_t e, Precision prec);

/// Polynomial in one complex variable with explicit coefficients, lowest
/// degree first. Degree is capped at kMaxDegree.
class Polynomial {
 public:
  static constexpr int kMaxDegree = 1 << 16;

  Polynomial() = default;
  explicit Polynomial(std::vector<BigComplex> coefficients);
  static Polynomial constant(BigComplex c);
  static Polynomial monomial(BigComplex c, int degree);
  /// The polynomial z.
  static Polynomial identity(Precision prec);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const BigComplex> coefficients() const { return coefficients_; }

  BigComplex operator()(const BigComplex& z) const;
  BigComplex derivative(const BigComplex& z) const;

  /// q(z) = p(c z)
  Polynomial scaled_argument(const BigComplex& c) const;
  /// q(z) = p(z + c), by Taylor shift.
  Polynomial shifted(const BigComplex& c) const;
  Polynomial operator*(const BigComplex& c) const;
  Polynomial operator-() const;
  Polynomial plus_constant(const BigComplex& c) const;
  /// Coefficients rounded to prec.
  Polynomial rounded(Precision prec) const;

 private:
  std::vector<BigComplex> coefficients_;
};

/// (z, w) -> (phi(z) + a w, a z)
struct Shear {
  Polynomial phi;
  Rational a;
};

/// tau^power with tau(z, w) = (a w, a z). tau^2 = a^2 id, so
/// tau^n(z, w) = a^n (z, w) for even n and a^n (w, z) for odd n.
struct TauPower {
  Rational a;
  std::int64_t power = 1;
};

/// (z, w) -> ((a z)^d + a^E w, a^E z)
struct Model {
  Rational a;
  int d = 2;
  std::int64_t E = 1;
};

/// (z, w) -> (a^e z^d + a w, a z)
struct CalligraphicH {
  Rational a;
  std::int64_t e = 0;
  int d = 2;
};

/// (z, w) -> (z, w) + v
struct Translation {
  BigComplexPoint v;
};

/// (z, w) -> center + beta (z, w), beta > 0
struct AffineScale {
  BigComplexPoint center;
  BigReal beta;
};

using ElementaryMap = std::variant<Shear, TauPower, Model, CalligraphicH, Translation, AffineScale>;

/// Throws PreconditionError when a variant's invariants fail (a = 0, d < 1,
/// beta <= 0, polynomial degree over the cap).
void validate(const ElementaryMap& m);
std::string kind_name(const ElementaryMap& m);

struct Factor {
  ElementaryMap map;
  bool inverted = false;
  std::string label;
};

class MapWord {
 public:
  MapWord() = default;
  MapWord(std::initializer_list<ElementaryMap> maps);
  explicit MapWord(std::vector<Factor> factors);

  static MapWord single(ElementaryMap m, std::string label = {});
  /// m o m o ... o m (count times).
  static MapWord repeated(const ElementaryMap& m, std::size_t count, std::string label = {});

  std::span<const Factor> factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }

  /// Reversed list of factor inverses.
  MapWord inverse() const;

  /// Appends `inner` on the right: the result is (*this) o inner.
  MapWord& then_apply_after(const MapWord& inner);

  friend MapWord compose(const MapWord& outer, const MapWord& inner);

 private:
  std::vector<Factor> factors_;
};

MapWord compose(const MapWord& outer, const MapWord& inner);

/// 2x2 complex matrix [[m00, m01], [m10, m11]].
struct Jacobian2 {
  BigComplex m00, m01, m10, m11;

  static Jacobian2 identity(Precision prec);
  static Jacobian2 scalar(const BigComplex& s);

  BigComplex determinant() const;
  /// Largest singular value, closed form for 2x2.
  BigReal operator_norm() const;
  Jacobian2 inverse() const;
  BigComplexPoint operator*(const BigComplexPoint& v) const;
  friend Jacobian2 operator*(const Jacobian2& a, const Jacobian2& b);
};

BigComplexPoint apply(const ElementaryMap& m, const BigComplexPoint& p);
BigComplexPoint apply_inverse(const ElementaryMap& m, const BigComplexPoint& p);
Jacobian2 differential(const ElementaryMap& m, const BigComplexPoint& p);

BigComplexPoint apply(const Factor& f, const BigComplexPoint& p);
Jacobian2 differential(const Factor& f, const BigComplexPoint& p);

BigComplexPoint apply(const MapWord& word, const BigComplexPoint& p);
BigComplexPoint apply_inverse(const MapWord& word, const BigComplexPoint& p);
/// Chain rule over the factors.
Jacobian2 differential(const MapWord& word, const BigComplexPoint& p);

/// Compares the differential against centered differences with step h along
/// the real z and w directions and returns the largest entrywise deviation,
/// relative to max(|entry|, 1). Evaluation runs with enough guard bits that
/// the difference quotient itself does not lose precision to cancellation.
BigReal finite_difference_check(const MapWord& word, const BigComplexPoint& p, const BigReal& h);
BigReal finite_difference_check(const ElementaryMap& m, const BigComplexPoint& p, const BigReal& h);

/// True for variants that always evaluate as (g(z) + a w, a z): Shear,
/// CalligraphicH, and TauPower with power 1.
bool has_shear_kind(const ElementaryMap& m);
/// The shear parameter a of a shear-kind map.
Rational shear_parameter(const ElementaryMap& m);
/// Rewrites a shear-kind map as an explicit Shear.
Shear as_shear(const ElementaryMap& m, Precision prec);

/// Largest deviation from shear form over seeded samples: evaluates at
/// (z, w1) and (z, w2) and measures |dF1 - a (w1 - w2)| and |F2 - a z|,
/// relative to the sizes of the compared quantities.
BigReal shear_form_residual(const Factor& f, const Rational& a, std::size_t samples, std::uint64_t seed,
                            Precision prec);

}  // namespace shortc2
