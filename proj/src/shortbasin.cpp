#include "shortc2/shortbasin.hpp"

#include <algorithm>

#include "shortc2/sampling.hpp"

namespace shortc2 {

ModelSequence::ModelSequence(Rational a, std::vector<int> d, Extension extension, bool require_odd)
    : a_(a), d_(std::move(d)), extension_(extension), require_odd_(require_odd) {
  if (a_.numerator() <= 0 || a_.numerator() >= a_.denominator())
    throw PreconditionError("model parameter a must lie in (0, 1), got " + to_string(a_));
  if (d_.empty()) throw PreconditionError("model sequence needs at least one degree");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] < 2) throw PreconditionError("d_" + std::to_string(i + 1) + " = " + std::to_string(d_[i]) + " is below 2");
    if (d_[i] > Polynomial::kMaxDegree) throw PreconditionError("d_" + std::to_string(i + 1) + " exceeds the degree cap");
    if (require_odd_ && d_[i] % 2 == 0)
      throw PreconditionError("d_" + std::to_string(i + 1) + " = " + std::to_string(d_[i]) + " is even");
  }
}

bool ModelSequence::has_level(std::size_t k) const {
  return k >= 1 && (k <= d_.size() || extension_ == Extension::RepeatLast);
}

int ModelSequence::degree(std::size_t k) const {
  if (!has_level(k)) throw PreconditionError("model sequence has no level " + std::to_string(k));
  return k <= d_.size() ? d_[k - 1] : d_.back();
}

std::int64_t ModelSequence::product(std::size_t k) const {
  std::int64_t D = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    if (__builtin_mul_overflow(D, static_cast<std::int64_t>(degree(j)), &D) || D > kMaxProduct)
      throw OverflowError("degree product D_" + std::to_string(k) + " exceeds 2^62");
  }
  return D;
}

int ModelSequence::min_degree() const { return *std::min_element(d_.begin(), d_.end()); }

BigReal ModelSequence::eta(std::size_t k, Precision prec) const { return rational_pow(a_, product(k), prec); }

BigReal ModelSequence::escape_radius(Precision prec) const {
  BigReal r = BigReal(2L, prec) / (to_big(a_, prec) * to_big(a_, prec));
  return r;
}

Model ModelSequence::level(std::size_t k) const { return Model{a_, degree(k), product(k)}; }

MapWord ModelSequence::composite(std::size_t k) const {
  std::vector<Factor> factors;
  for (std::size_t j = k; j >= 1; --j) factors.push_back(Factor{level(j), false, "H_" + std::to_string(j)});
  return MapWord(std::move(factors));
}

// ---- orbit -----------------------------------------------------------------

ModelOrbit::ModelOrbit(const ModelSequence& seq, BigComplexPoint start)
    : seq_(&seq), point_(std::move(start)), eta_(1L, point_.precision()) {}

void ModelOrbit::step() {
  std::size_t k = depth_ + 1;
  Precision prec = point_.precision();
  int d = seq_->degree(k);
  BigReal eta = seq_->eta(k, prec);
  BigComplex az = point_.z * to_big(seq_->a(), prec);
  BigComplex first = pow(az, d);
  first += point_.w * eta;
  BigComplex second = point_.z * eta;
  point_ = BigComplexPoint(std::move(first), std::move(second));
  eta_ = std::move(eta);
  depth_ = k;
}

ModelImage compose_model(const ModelSequence& seq, std::size_t k, const BigComplexPoint& p) {
  ModelOrbit orbit(seq, p);
  while (orbit.depth() < k) orbit.step();
  return {orbit.point(), orbit.eta()};
}

// ---- potential -------------------------------------------------------------

BigReal tail_bound(const ModelSequence& seq, std::size_t k, Precision prec) {
  std::size_t L = std::max(seq.declared().size(), k);
  BigReal log2v = BigReal::log2_constant(prec);
  BigReal sum(prec);
  for (std::size_t j = k + 1; j <= L; ++j) sum += log2v / BigReal(static_cast<long>(seq.product(j)), prec);
  int r = seq.extension() == Extension::RepeatLast ? seq.min_degree() : 2;
  BigReal majorant = log2v / (BigReal(static_cast<long>(seq.product(L)), prec) * BigReal(r - 1, prec));
  return sum + majorant;
}

namespace {

PotentialEstimate estimate(std::size_t k, const BigComplexPoint& h, const BigReal& eta, std::int64_t D,
                           const BigReal& tail) {
  BigReal phi = max(max(abs(h.z), abs(h.w)), eta);
  BigReal psi = log(phi) / BigReal(static_cast<long>(D), phi.precision());
  psi = psi.rounded(h.precision());
  BigReal psi_tilde = psi + tail;
  return {k, h.z, h.w, std::move(phi), std::move(psi), std::move(psi_tilde), tail};
}

}  // namespace

PotentialEstimate potential_at(const ModelSequence& seq, std::size_t k, const BigComplexPoint& h,
                               const BigReal& eta) {
  if (k < 1) throw PreconditionError("potential needs depth k >= 1");
  return estimate(k, h, eta, seq.product(k), tail_bound(seq, k, h.precision()));
}

PotentialEstimate potential(const ModelSequence& seq, std::size_t k, const BigComplexPoint& p) {
  if (k < 1) throw PreconditionError("potential needs depth k >= 1");
  ModelImage image = compose_model(seq, k, p);
  return potential_at(seq, k, image.h, image.eta);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Inside: return "Inside";
    case Verdict::Outside: return "Outside";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

BasinCertificate classify(const ModelSequence& seq, const BigComplexPoint& p, std::size_t k_max) {
  if (k_max < 1) throw PreconditionError("classification depth must be at least 1");
  if (!seq.has_level(k_max)) throw PreconditionError("sequence is shorter than the classification depth");
  Precision prec = p.precision();
  std::vector<BigReal> tails;
  std::vector<std::int64_t> products;
  try {
    for (std::size_t k = 1; k <= k_max; ++k) {
      tails.push_back(tail_bound(seq, k, prec));
      products.push_back(seq.product(k));
    }
  } catch (const OverflowError&) {
    throw PreconditionError("classification depth " + std::to_string(k_max) + " makes d_k···d_1 exceed 2^62");
  }
  BigReal radius = seq.escape_radius(prec);

  ModelOrbit orbit(seq, p);
  BasinCertificate last{Verdict::Unknown, k_max, std::nullopt, std::nullopt, std::nullopt, false};
  for (std::size_t k = 1; k <= k_max; ++k) {
    try {
      orbit.step();
      PotentialEstimate est = estimate(k, orbit.point(), orbit.eta(), products[k - 1], tails[k - 1]);
      BigReal a1 = abs(orbit.point().z);
      BigReal a2 = abs(orbit.point().w);
      if (est.psi_tilde.sign() < 0) return {Verdict::Inside, k, est.psi_tilde, a1, a2, false};
      if (a1 >= radius && a2 <= a1) return {Verdict::Outside, k, est.psi_tilde, a1, a2, false};
      last.psi_tilde = est.psi_tilde;
      last.abs_h1 = std::move(a1);
      last.abs_h2 = std::move(a2);
    } catch (const OverflowError&) {
      return {Verdict::Outside, k, std::nullopt, std::nullopt, std::nullopt, true};
    }
  }
  return last;
}

KobayashiQuery kobayashi_upper_bound(const ModelSequence& seq, const BigComplexPoint& p,
                                     const BigComplexPoint& zeta, const BigReal& target, std::size_t k_max) {
  if (zeta.z.is_zero() && zeta.w.is_zero()) throw PreconditionError("tangent vector must be nonzero");
  BasinCertificate cert = classify(seq, p, k_max);
  if (cert.verdict != Verdict::Inside)
    throw PreconditionError(std::string("point is not certified inside the basin (") + verdict_name(cert.verdict) +
                            " at depth " + std::to_string(cert.k) + ")");

  Precision prec = p.precision();
  BigReal one(1L, prec);
  BigComplexPoint pk = p;
  BigComplexPoint zk = zeta;
  KobayashiQuery out{0, BigReal(prec), false, {}};
  std::optional<std::size_t> best;
  for (std::size_t k = 0;; ++k) {
    BigReal norm = pk.euclidean_norm();
    if (norm < one) {
      BigReal bound = zk.euclidean_norm() / (one - norm);
      out.trace.push_back({k, bound});
      if (!best || bound < out.trace[*best].bound) best = out.trace.size() - 1;
      if (bound <= target) {
        out.k = k;
        out.upper_bound = bound;
        out.reached_target = true;
        return out;
      }
    }
    if (k == k_max) break;
    Model h = seq.level(k + 1);
    zk = differential(ElementaryMap(h), pk) * zk;
    pk = shortc2::apply(ElementaryMap(h), pk);
  }
  if (!best) throw DomainError("orbit never entered the unit ball up to the given depth");
  out.k = out.trace[*best].k;
  out.upper_bound = out.trace[*best].bound;
  return out;
}

BigReal ball_contraction_check(const ModelSequence& seq, std::size_t n, std::size_t samples, std::uint64_t seed,
                               Precision prec) {
  if (samples < 1) throw PreconditionError("need at least one sample");
  ElementaryMap h = seq.level(n);
  BigReal worst(prec);
  for (const auto& v : unit_ball_samples(samples, seed))
    worst = max(worst, shortc2::apply(h, Sampler::to_point(v, prec)).euclidean_norm());
  return worst;
}

}  // namespace shortc2
