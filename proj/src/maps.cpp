#include "shortc2/maps.hpp"

#include <bit>
#include <charconv>
#include <optional>

#include "shortc2/sampling.hpp"

namespace shortc2 {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t parse_int64(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || begin == text.data() + text.size())
    throw PreconditionError("not a rational number: '" + std::string(whole) + "'");
  return value;
}

std::optional<int> log2_exact(std::int64_t v) {
  if (v <= 0 || (v & (v - 1)) != 0) return std::nullopt;
  return std::countr_zero(static_cast<std::uint64_t>(v));
}

}  // namespace

// ---- Rational --------------------------------------------------------------

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::int64_t num = parse_int64(text.substr(0, slash), text);
    std::int64_t den = parse_int64(text.substr(slash + 1), text);
    if (den == 0) throw PreconditionError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int64(text, text));
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 17) throw PreconditionError("too many decimals for an exact rational: '" + std::string(text) + "'");
  bool negative = !whole.empty() && whole.front() == '-';
  std::int64_t ip = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int64(whole, text);
  std::int64_t fp = frac.empty() ? 0 : parse_int64(frac, text);
  if (!frac.empty() && (frac.front() == '-' || frac.front() == '+'))
    throw PreconditionError("not a rational number: '" + std::string(text) + "'");
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  Rational r = Rational(std::abs(ip)) + Rational(fp, scale);
  return negative ? -r : r;
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

BigReal to_big(const Rational& r, Precision prec) {
  BigReal num(static_cast<long>(r.numerator()), prec.widened(64));
  BigReal den(static_cast<long>(r.denominator()), prec.widened(64));
  return (num / den).rounded(prec);
}

BigReal rational_pow(const Rational& r, std::int64_t e, Precision prec) {
  if (r.numerator() == 0) {
    if (e < 0) throw DomainError("negative power of zero");
    return BigReal(e == 0 ? 1L : 0L, prec);
  }
  auto num_log = log2_exact(r.numerator() < 0 ? -r.numerator() : r.numerator());
  auto den_log = log2_exact(r.denominator());
  if (num_log && den_log) {
    std::int64_t k = *num_log - *den_log;
    std::int64_t total = 0;
    if (__builtin_mul_overflow(k, e, &total)) throw OverflowError("power of two exponent overflow");
    BigReal out = BigReal::pow2(total, prec);
    if (r.numerator() < 0 && (e & 1) != 0) out = -out;
    return out;
  }
  std::uint64_t mag = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
  Precision work = prec.widened(64 + static_cast<int>(std::bit_width(mag)));
  return pow(to_big(r, work), e).rounded(prec);
}

// ---- Polynomial ------------------------------------------------------------

Polynomial::Polynomial(std::vector<BigComplex> coefficients) : coefficients_(std::move(coefficients)) {
  if (degree() > kMaxDegree) throw PreconditionError("polynomial degree above the supported maximum");
}

Polynomial Polynomial::constant(BigComplex c) { return Polynomial(std::vector<BigComplex>{std::move(c)}); }

Polynomial Polynomial::monomial(BigComplex c, int degree) {
  if (degree < 0 || degree > kMaxDegree) throw PreconditionError("monomial degree out of range");
  std::vector<BigComplex> coeffs(static_cast<std::size_t>(degree), BigComplex(c.precision()));
  coeffs.push_back(std::move(c));
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::identity(Precision prec) {
  return Polynomial({BigComplex(prec), BigComplex(BigReal(1L, prec))});
}

BigComplex Polynomial::operator()(const BigComplex& z) const {
  if (coefficients_.empty()) return BigComplex(z.precision());
  BigComplex acc = coefficients_.back();
  for (auto it = coefficients_.rbegin() + 1; it != coefficients_.rend(); ++it) {
    acc *= z;
    acc += *it;
  }
  return acc;
}

BigComplex Polynomial::derivative(const BigComplex& z) const {
  if (coefficients_.size() < 2) return BigComplex(z.precision());
  auto n = coefficients_.size() - 1;
  BigComplex acc = coefficients_[n] * BigReal(static_cast<long>(n), z.precision());
  for (std::size_t i = n - 1; i >= 1; --i) {
    acc *= z;
    acc += coefficients_[i] * BigReal(static_cast<long>(i), z.precision());
  }
  return acc;
}

Polynomial Polynomial::scaled_argument(const BigComplex& c) const {
  std::vector<BigComplex> out;
  out.reserve(coefficients_.size());
  BigComplex power(BigReal(1L, c.precision()));
  for (const auto& coeff : coefficients_) {
    out.push_back(coeff * power);
    power *= c;
  }
  return Polynomial(std::move(out));
}

Polynomial Polynomial::shifted(const BigComplex& c) const {
  std::vector<BigComplex> a(coefficients_.begin(), coefficients_.end());
  if (a.size() < 2) return Polynomial(std::move(a));
  std::size_t n = a.size() - 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = n; j-- > k;) a[j] += c * a[j + 1];
  return Polynomial(std::move(a));
}

Polynomial Polynomial::operator*(const BigComplex& c) const {
  std::vector<BigComplex> out;
  out.reserve(coefficients_.size());
  for (const auto& coeff : coefficients_) out.push_back(coeff * c);
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator-() const {
  std::vector<BigComplex> out;
  out.reserve(coefficients_.size());
  for (const auto& coeff : coefficients_) out.push_back(-coeff);
  return Polynomial(std::move(out));
}

Polynomial Polynomial::plus_constant(const BigComplex& c) const {
  std::vector<BigComplex> out(coefficients_.begin(), coefficients_.end());
  if (out.empty())
    out.push_back(c);
  else
    out.front() += c;
  return Polynomial(std::move(out));
}

Polynomial Polynomial::rounded(Precision prec) const {
  std::vector<BigComplex> out;
  out.reserve(coefficients_.size());
  for (const auto& c : coefficients_) out.emplace_back(c.re.rounded(prec), c.im.rounded(prec));
  return Polynomial(std::move(out));
}

// ---- ElementaryMap ---------------------------------------------------------

void validate(const ElementaryMap& m) {
  std::visit(overloaded{
                 [](const Shear& s) {
                   if (s.a.numerator() == 0) throw PreconditionError("shear with a = 0 is not invertible");
                 },
                 [](const TauPower& t) {
                   if (t.a.numerator() == 0) throw PreconditionError("tau with a = 0 is not invertible");
                 },
                 [](const Model& h) {
                   if (h.a.numerator() == 0) throw PreconditionError("model map requires a != 0");
                   if (h.d < 2) throw PreconditionError("model map requires d >= 2");
                   if (h.E < 0) throw PreconditionError("model map requires E >= 0");
                 },
                 [](const CalligraphicH& h) {
                   if (h.a.numerator() == 0) throw PreconditionError("calligraphic H requires a != 0");
                   if (h.d < 1 || h.d > Polynomial::kMaxDegree) throw PreconditionError("calligraphic H degree out of range");
                 },
                 [](const Translation&) {},
                 [](const AffineScale& s) {
                   if (s.beta.sign() <= 0) throw PreconditionError("affine scale requires beta > 0");
                 },
             },
             m);
}

std::string kind_name(const ElementaryMap& m) {
  return std::visit(overloaded{
                        [](const Shear&) { return std::string("shear"); },
                        [](const TauPower&) { return std::string("tau"); },
                        [](const Model&) { return std::string("model"); },
                        [](const CalligraphicH&) { return std::string("calligraphic_h"); },
                        [](const Translation&) { return std::string("translation"); },
                        [](const AffineScale&) { return std::string("affine_scale"); },
                    },
                    m);
}

// ---- MapWord ---------------------------------------------------------------

MapWord::MapWord(std::initializer_list<ElementaryMap> maps) {
  for (const auto& m : maps) {
    validate(m);
    factors_.push_back(Factor{m, false, {}});
  }
}

MapWord::MapWord(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) validate(f.map);
}

MapWord MapWord::single(ElementaryMap m, std::string label) {
  validate(m);
  return MapWord(std::vector<Factor>{Factor{std::move(m), false, std::move(label)}});
}

MapWord MapWord::repeated(const ElementaryMap& m, std::size_t count, std::string label) {
  validate(m);
  return MapWord(std::vector<Factor>(count, Factor{m, false, label}));
}

MapWord MapWord::inverse() const {
  std::vector<Factor> out(factors_.rbegin(), factors_.rend());
  for (auto& f : out) f.inverted = !f.inverted;
  MapWord w;
  w.factors_ = std::move(out);
  return w;
}

MapWord& MapWord::then_apply_after(const MapWord& inner) {
  factors_.insert(factors_.end(), inner.factors_.begin(), inner.factors_.end());
  return *this;
}

MapWord compose(const MapWord& outer, const MapWord& inner) {
  MapWord out = outer;
  out.then_apply_after(inner);
  return out;
}

// ---- Jacobian2 -------------------------------------------------------------

Jacobian2 Jacobian2::identity(Precision prec) {
  BigComplex one(BigReal(1L, prec));
  BigComplex zero(prec);
  return {one, zero, zero, one};
}

Jacobian2 Jacobian2::scalar(const BigComplex& s) {
  BigComplex zero(s.precision());
  return {s, zero, zero, s};
}

BigComplex Jacobian2::determinant() const { return m00 * m11 - m01 * m10; }

BigReal Jacobian2::operator_norm() const {
  BigReal frob = norm_squared(m00) + norm_squared(m01) + norm_squared(m10) + norm_squared(m11);
  BigReal det2 = norm_squared(determinant());
  BigReal disc = frob * frob;
  det2.scale2(2);
  disc -= det2;
  if (disc.sign() < 0) disc = BigReal(disc.precision());
  BigReal sigma2 = frob + sqrt(disc);
  sigma2.scale2(-1);
  return sqrt(sigma2);
}

Jacobian2 Jacobian2::inverse() const {
  BigComplex det = determinant();
  if (det.is_zero()) throw DomainError("singular differential");
  return {m11 / det, -m01 / det, -m10 / det, m00 / det};
}

BigComplexPoint Jacobian2::operator*(const BigComplexPoint& v) const {
  return {m00 * v.z + m01 * v.w, m10 * v.z + m11 * v.w};
}

Jacobian2 operator*(const Jacobian2& a, const Jacobian2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11, a.m10 * b.m00 + a.m11 * b.m10,
          a.m10 * b.m01 + a.m11 * b.m11};
}

// ---- evaluation ------------------------------------------------------------

BigComplexPoint apply(const ElementaryMap& m, const BigComplexPoint& p) {
  Precision prec = p.precision();
  return std::visit(
      overloaded{
          [&](const Shear& s) {
            BigReal a = to_big(s.a, prec);
            return BigComplexPoint(s.phi(p.z) + p.w * a, p.z * a);
          },
          [&](const TauPower& t) {
            BigReal scale = rational_pow(t.a, t.power, prec);
            if (t.power % 2 == 0) return BigComplexPoint(p.z * scale, p.w * scale);
            return BigComplexPoint(p.w * scale, p.z * scale);
          },
          [&](const Model& h) {
            BigReal aE = rational_pow(h.a, h.E, prec);
            BigComplex first = pow(p.z * to_big(h.a, prec), h.d);
            first += p.w * aE;
            return BigComplexPoint(std::move(first), p.z * aE);
          },
          [&](const CalligraphicH& h) {
            BigReal a = to_big(h.a, prec);
            BigComplex first = pow(p.z, h.d) * rational_pow(h.a, h.e, prec);
            first += p.w * a;
            return BigComplexPoint(std::move(first), p.z * a);
          },
          [&](const Translation& t) { return p + t.v; },
          [&](const AffineScale& s) { return s.center + s.beta * p; },
      },
      m);
}

BigComplexPoint apply_inverse(const ElementaryMap& m, const BigComplexPoint& p) {
  Precision prec = p.precision();
  return std::visit(
      overloaded{
          [&](const Shear& s) {
            BigReal a = to_big(s.a, prec);
            BigComplex z = p.w / a;
            BigComplex w = (p.z - s.phi(z)) / a;
            return BigComplexPoint(std::move(z), std::move(w));
          },
          [&](const TauPower& t) { return shortc2::apply(TauPower{t.a, -t.power}, p); },
          [&](const Model& h) {
            BigReal aE = rational_pow(h.a, h.E, prec);
            BigComplex z = p.w / aE;
            BigComplex w = (p.z - pow(z * to_big(h.a, prec), h.d)) / aE;
            return BigComplexPoint(std::move(z), std::move(w));
          },
          [&](const CalligraphicH& h) {
            BigReal a = to_big(h.a, prec);
            BigComplex z = p.w / a;
            BigComplex w = (p.z - pow(z, h.d) * rational_pow(h.a, h.e, prec)) / a;
            return BigComplexPoint(std::move(z), std::move(w));
          },
          [&](const Translation& t) { return p - t.v; },
          [&](const AffineScale& s) {
            BigComplexPoint q = p - s.center;
            q.z /= s.beta;
            q.w /= s.beta;
            return q;
          },
      },
      m);
}

Jacobian2 differential(const ElementaryMap& m, const BigComplexPoint& p) {
  Precision prec = p.precision();
  BigComplex zero(prec);
  return std::visit(
      overloaded{
          [&](const Shear& s) {
            BigComplex a(to_big(s.a, prec));
            return Jacobian2{s.phi.derivative(p.z), a, a, zero};
          },
          [&](const TauPower& t) {
            BigComplex scale(rational_pow(t.a, t.power, prec));
            if (t.power % 2 == 0) return Jacobian2::scalar(scale);
            return Jacobian2{zero, scale, scale, zero};
          },
          [&](const Model& h) {
            BigReal a = to_big(h.a, prec);
            BigComplex aE(rational_pow(h.a, h.E, prec));
            // d/dz (a z)^d = d a^d z^(d-1)
            BigComplex top = pow(p.z, h.d - 1) * (pow(a, h.d) * BigReal(static_cast<long>(h.d), prec));
            return Jacobian2{std::move(top), aE, aE, zero};
          },
          [&](const CalligraphicH& h) {
            BigComplex a(to_big(h.a, prec));
            BigComplex top =
                pow(p.z, h.d - 1) * (rational_pow(h.a, h.e, prec) * BigReal(static_cast<long>(h.d), prec));
            return Jacobian2{std::move(top), a, a, zero};
          },
          [&](const Translation&) { return Jacobian2::identity(prec); },
          [&](const AffineScale& s) { return Jacobian2::scalar(BigComplex(s.beta.rounded(prec))); },
      },
      m);
}

BigComplexPoint apply(const Factor& f, const BigComplexPoint& p) {
  return f.inverted ? apply_inverse(f.map, p) : shortc2::apply(f.map, p);
}

Jacobian2 differential(const Factor& f, const BigComplexPoint& p) {
  if (!f.inverted) return differential(f.map, p);
  return differential(f.map, apply_inverse(f.map, p)).inverse();
}

BigComplexPoint apply(const MapWord& word, const BigComplexPoint& p) {
  BigComplexPoint x = p;
  auto fs = word.factors();
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) x = shortc2::apply(*it, x);
  return x;
}

BigComplexPoint apply_inverse(const MapWord& word, const BigComplexPoint& p) {
  BigComplexPoint x = p;
  for (const auto& f : word.factors()) x = f.inverted ? shortc2::apply(f.map, x) : apply_inverse(f.map, x);
  return x;
}

Jacobian2 differential(const MapWord& word, const BigComplexPoint& p) {
  Jacobian2 j = Jacobian2::identity(p.precision());
  BigComplexPoint x = p;
  auto fs = word.factors();
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
    j = differential(*it, x) * j;
    x = shortc2::apply(*it, x);
  }
  return j;
}

BigReal finite_difference_check(const MapWord& word, const BigComplexPoint& p, const BigReal& h) {
  if (h.sign() <= 0) throw PreconditionError("finite difference step must be positive");
  Precision prec = p.precision();
  Precision work = prec.widened(64 + static_cast<int>(std::abs(h.exponent())));
  BigComplexPoint x(BigComplex(p.z.re.rounded(work), p.z.im.rounded(work)),
                    BigComplex(p.w.re.rounded(work), p.w.im.rounded(work)));
  BigReal step = h.rounded(work);
  Jacobian2 j = differential(word, x);
  BigReal one(1L, work);
  BigReal worst(work);
  for (int column = 0; column < 2; ++column) {
    BigComplexPoint plus = x;
    BigComplexPoint minus = x;
    BigComplex& cp = column == 0 ? plus.z : plus.w;
    BigComplex& cm = column == 0 ? minus.z : minus.w;
    cp.re += step;
    cm.re -= step;
    BigComplexPoint diff = shortc2::apply(word, plus) - shortc2::apply(word, minus);
    BigReal denom = step;
    denom.scale2(1);
    BigComplex d0 = diff.z / denom;
    BigComplex d1 = diff.w / denom;
    const BigComplex& e0 = column == 0 ? j.m00 : j.m01;
    const BigComplex& e1 = column == 0 ? j.m10 : j.m11;
    worst = max(worst, abs(d0 - e0) / max(abs(e0), one));
    worst = max(worst, abs(d1 - e1) / max(abs(e1), one));
  }
  return worst.rounded(prec);
}

BigReal finite_difference_check(const ElementaryMap& m, const BigComplexPoint& p, const BigReal& h) {
  return finite_difference_check(MapWord::single(m), p, h);
}

// ---- shear structure -------------------------------------------------------

bool has_shear_kind(const ElementaryMap& m) {
  if (std::holds_alternative<Shear>(m) || std::holds_alternative<CalligraphicH>(m)) return true;
  if (const auto* t = std::get_if<TauPower>(&m)) return t->power == 1;
  return false;
}

Rational shear_parameter(const ElementaryMap& m) {
  if (const auto* s = std::get_if<Shear>(&m)) return s->a;
  if (const auto* h = std::get_if<CalligraphicH>(&m)) return h->a;
  if (const auto* t = std::get_if<TauPower>(&m); t && t->power == 1) return t->a;
  throw PreconditionError(kind_name(m) + " is not of shear kind");
}

Shear as_shear(const ElementaryMap& m, Precision prec) {
  if (const auto* s = std::get_if<Shear>(&m)) return *s;
  if (const auto* h = std::get_if<CalligraphicH>(&m))
    return Shear{Polynomial::monomial(BigComplex(rational_pow(h->a, h->e, prec)), h->d), h->a};
  if (const auto* t = std::get_if<TauPower>(&m); t && t->power == 1) return Shear{Polynomial(), t->a};
  throw PreconditionError(kind_name(m) + " is not of shear kind");
}

BigReal shear_form_residual(const Factor& f, const Rational& a, std::size_t samples, std::uint64_t seed,
                            Precision prec) {
  Sampler sampler(seed);
  BigReal av = to_big(a, prec);
  BigReal one(1L, prec);
  BigReal worst(prec);
  for (std::size_t i = 0; i < samples; ++i) {
    auto z = sampler.disc(1.0);
    auto w1 = sampler.disc(1.0);
    auto w2 = sampler.disc(1.0);
    BigComplexPoint p1(z[0], z[1], w1[0], w1[1], prec);
    BigComplexPoint p2(z[0], z[1], w2[0], w2[1], prec);
    BigComplexPoint f1 = shortc2::apply(f, p1);
    BigComplexPoint f2 = shortc2::apply(f, p2);
    BigComplex expected_diff = (p1.w - p2.w) * av;
    BigReal scale1 = max(max(abs(f1.z), abs(f2.z)), one);
    worst = max(worst, abs(f1.z - f2.z - expected_diff) / scale1);
    BigComplex az = p1.z * av;
    BigReal scale2 = max(abs(az), one);
    worst = max(worst, abs(f1.w - az) / scale2);
    worst = max(worst, abs(f2.w - az) / scale2);
  }
  return worst;
}

}  // namespace shortc2
