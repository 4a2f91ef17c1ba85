#include "shortc2/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "shortc2/equivalence.hpp"
#include "shortc2/parallel.hpp"

namespace shortc2 {

// ---- plan ------------------------------------------------------------------

PlanStage OscillationPlan::stage(std::size_t k) const {
  if (k == 0) return PlanStage{1, 0, 0, 0, Rational(1), ell0.value_or(0)};
  if (k > stages.size()) throw PreconditionError("plan has no stage " + std::to_string(k));
  return stages[k - 1];
}

std::int64_t OscillationPlan::product(std::size_t k) const {
  std::int64_t D = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    if (__builtin_mul_overflow(D, static_cast<std::int64_t>(stage(j).d), &D) || D > ModelSequence::kMaxProduct)
      throw OverflowError("d_1···d_" + std::to_string(k) + " exceeds 2^62");
  }
  return D;
}

std::optional<std::int64_t> OscillationPlan::detour(std::size_t k) const {
  if (k == 0) return ell0;
  return stage(k).ell;
}

namespace {

std::string stage_name(const char* symbol, std::size_t k) { return std::string(symbol) + "_" + std::to_string(k); }

}  // namespace

std::vector<PlanViolation> validate_plan(const OscillationPlan& plan) {
  std::vector<PlanViolation> out;
  auto report = [&](const char* condition, std::size_t k, std::string message) {
    out.push_back({condition, k, std::move(message)});
  };
  if (plan.a.numerator() <= 0 || plan.a.numerator() >= plan.a.denominator())
    report("(e)", 0, "a = " + to_string(plan.a) + " must lie in (0, 1)");
  if (plan.ell0 && *plan.ell0 < 1) report("detour-length", 0, "ell0 must be at least 1");

  Precision prec = Precision::standard();
  BigReal log_inv_a = -log(to_big(plan.a, prec));
  bool parity_reported = false;
  // D = d_1···d_k while it fits; unknown once it overflows.
  std::int64_t D = 1;
  bool D_known = true;

  for (std::size_t k = 1; k <= plan.size(); ++k) {
    const PlanStage s = plan.stage(k);
    const PlanStage prev = plan.stage(k - 1);
    std::string ks = std::to_string(k);

    if (s.d < 3) report("degree-minimum", k, stage_name("d", k) + " = " + std::to_string(s.d) + " must be at least 3");
    if (!parity_reported && s.d % 2 == 0) {
      report("parity", k, "product must be odd: d_" + ks + " = " + std::to_string(s.d) + " makes d_1···d_" + ks + " even");
      parity_reported = true;
    }
    if (D_known) {
      std::int64_t next = 0;
      if (s.d <= 0 || __builtin_mul_overflow(D, static_cast<std::int64_t>(s.d), &next) ||
          next > ModelSequence::kMaxProduct)
        D_known = false;
      else
        D = next;
    }

    if (s.q < 1) {
      report("(e)", k, stage_name("q", k) + " must be positive so that beta_{n_k} = a^(2q_k) < 1");
    } else {
      BigReal beta = rational_pow(plan.a, 2 * s.q, prec);
      if (beta * BigReal(static_cast<long>(k + 1), prec) >= BigReal(1L, prec))
        report("(e)", k, "beta_{n_" + ks + "} = a^" + std::to_string(2 * s.q) + " must be below 1/" + std::to_string(k + 1));
      BigReal lhs = BigReal(static_cast<long>(k), prec) * BigReal(static_cast<long>(2 * s.q), prec) * log_inv_a;
      if (D_known && lhs > BigReal(static_cast<long>(D), prec))
        report("(f)", k, ks + "·|log beta_{n_" + ks + "}| = " + lhs.to_string(6) + " exceeds d_" + ks + "···d_1 = " +
                             std::to_string(D));
    }

    std::int64_t need = 2 * (prev.N - prev.n + prev.q + 2) + 1;
    if (D_known && D < need)
      report("degree-bound", k,
             "d_1···d_" + ks + " = " + std::to_string(D) + " but the transition from stage " + std::to_string(k - 1) +
                 " needs at least 2(N - n + q + 2) + 1 = " + std::to_string(need));

    if (auto ell = plan.detour(k - 1); ell && s.q < *ell + 2)
      report("q-bound", k, stage_name("q", k) + " = " + std::to_string(s.q) + " must be at least ell + 2 = " +
                               std::to_string(*ell + 2));
    if (s.ell < 1) report("detour-length", k, stage_name("ell", k) + " must be at least 1");

    if (s.R <= prev.R) report("monotone-R", k, stage_name("R", k) + " = " + to_string(s.R) + " must exceed " + to_string(prev.R));
    if (s.n <= prev.n) report("monotone-n", k, stage_name("n", k) + " must exceed " + std::to_string(prev.n));
    if (s.N <= prev.N) report("monotone-N", k, stage_name("N", k) + " must exceed " + std::to_string(prev.N));
    if (s.n < prev.N || s.n > s.N)
      report("interleave", k,
             "need N_" + std::to_string(k - 1) + " <= n_" + ks + " <= N_" + ks + ", got " + std::to_string(prev.N) +
                 ", " + std::to_string(s.n) + ", " + std::to_string(s.N));
  }
  return out;
}

BigReal plan_beta(const OscillationPlan& plan, std::int64_t n, Precision prec) {
  if (n < 0) throw PreconditionError("orbit index must be nonnegative");
  if (n == 0) return BigReal(1L, prec);
  for (std::size_t k = 1; k <= plan.size(); ++k) {
    const PlanStage s = plan.stage(k);
    if (n > s.N) continue;
    if (n < s.n) return BigReal(1L, prec) / BigReal(static_cast<long>(k), prec);
    if (n == s.n) return rational_pow(plan.a, 2 * s.q, prec);
    return BigReal(1L, prec) / BigReal(static_cast<long>(k + 1), prec);
  }
  throw PreconditionError("orbit index " + std::to_string(n) + " lies beyond the last stage");
}

std::int64_t even_power_exponent(const BigReal& x, const Rational& a) {
  Precision prec = x.precision();
  if (x.sign() <= 0) throw PreconditionError("scale factor must be positive");
  BigReal ratio = log(x) / log(to_big(a, prec));
  ratio.scale2(-1);
  double qd = std::round(ratio.to_double());
  if (!(qd >= 0 && qd < 4e18)) throw PreconditionError("scale factor " + x.to_string(6) + " is not an even power of a");
  auto q = static_cast<std::int64_t>(qd);
  BigReal expected = rational_pow(a, 2 * q, prec);
  if (relative_error(x, expected) > BigReal::pow2(8 - prec.bits(), prec))
    throw PreconditionError("scale factor " + x.to_string(6) + " is not an even power of a = " + to_string(a));
  return q;
}

// ---- shear building blocks ---------------------------------------------------

Shear lambda_tilde(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec) {
  BigReal c = rational_pow(a, 2 * j, prec);
  BigReal inv = rational_pow(a, -2 * j, prec);
  return Shear{f.scaled_argument(BigComplex(c)) * BigComplex(-inv), a};
}

Shear lambda_hat(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec) {
  BigReal c = rational_pow(a, 2 * j, prec);
  BigReal inv = rational_pow(a, -2 * j, prec);
  return Shear{f.scaled_argument(BigComplex(inv)) * BigComplex(-c), a};
}

namespace {

Factor tau(const Rational& a, std::int64_t power = 1) {
  std::string label = power == 1 ? "tau" : "tau^" + std::to_string(power);
  return Factor{TauPower{a, power}, false, label};
}

Factor named(ElementaryMap m, std::string label) { return Factor{std::move(m), false, std::move(label)}; }

Shear translation_shear(const BigComplex& c, const Rational& a) { return Shear{Polynomial::constant(c), a}; }

// S_1, S_2 for Φ(P) = Q + a^(2q') P.
std::pair<Shear, Shear> forward_translation_shears(const Rational& a, const BigComplexPoint& Q, std::int64_t q_next,
                                                   Precision prec) {
  Shear S1 = translation_shear(Q.w * rational_pow(a, -(2 * (q_next - 1) + 1), prec), a);
  Shear S2 = translation_shear(Q.z * rational_pow(a, -2 * (q_next - 1), prec), a);
  return {std::move(S1), std::move(S2)};
}

}  // namespace

InverseIterateWords factor_inverse_iterate(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec) {
  if (j < 0) throw PreconditionError("inverse iterate count must be nonnegative");
  std::vector<Factor> tilde{tau(a)};
  for (std::int64_t i = 1; i <= j; ++i) tilde.push_back(named(lambda_tilde(f, a, i, prec), "lambda_tilde_" + std::to_string(i)));
  tilde.push_back(tau(a));
  tilde.push_back(tau(a, -2 * (j + 1)));

  std::vector<Factor> hat{tau(a, -2 * (j + 1)), tau(a)};
  for (std::int64_t i = j; i >= 1; --i) hat.push_back(named(lambda_hat(f, a, i, prec), "lambda_hat_" + std::to_string(i)));
  hat.push_back(tau(a));
  return {MapWord(std::move(tilde)), MapWord(std::move(hat))};
}

MapWord factor_model_split(const Rational& a, int d, std::int64_t D) {
  if (D < 1 || D % 2 == 0)
    throw PreconditionError("degree product " + std::to_string(D) + " must be odd for the linear parts to match");
  std::int64_t e = 0;
  if (__builtin_mul_overflow(2 - D, static_cast<std::int64_t>(d), &e)) throw OverflowError("model split exponent overflow");
  return MapWord(std::vector<Factor>{named(CalligraphicH{a, e, d}, "calligraphic_H"), tau(a, D - 1)});
}

MapWord factor_model_split(const OscillationPlan& plan, std::size_t k) {
  return factor_model_split(plan.a, plan.stage(k + 1).d, plan.product(k + 1));
}

AffineFactors factor_affine(const Rational& a, const BigComplexPoint& Q, const BigReal& s,
                            const BigComplexPoint& center, const BigReal& beta) {
  Precision prec = Q.precision();
  std::int64_t q_next = even_power_exponent(s, a);
  std::int64_t q = even_power_exponent(beta, a);
  auto [S1, S2] = forward_translation_shears(a, Q, q_next, prec);
  BigReal av = to_big(a, prec);
  Shear R1 = translation_shear(-(center.w * av), a);
  Shear R2 = translation_shear(-(center.z * (av * av)), a);
  MapWord forward(std::vector<Factor>{tau(a, 2 * (q_next - 1)), named(S2, "S_2"), named(S1, "S_1")});
  MapWord inverse(std::vector<Factor>{tau(a, -2 * (q + 1)), named(R2, "R_2"), named(R1, "R_1")});
  return {std::move(forward), std::move(inverse)};
}

TransitionOrbit consistent_orbit(const Polynomial& f, const Rational& a, std::int64_t steps, std::int64_t ell,
                                 const BigComplexPoint& P_n, const BigComplexPoint& Q0) {
  ElementaryMap F = Shear{f, a};
  BigComplexPoint P_N = P_n;
  for (std::int64_t i = 0; i < steps; ++i) P_N = shortc2::apply(F, P_N);
  BigComplexPoint Q = Q0;
  for (std::int64_t i = 0; i < ell; ++i) Q = shortc2::apply(F, Q);
  return {P_n, std::move(P_N), std::move(Q)};
}

// ---- transition ------------------------------------------------------------

MapWord TransitionFactorization::shear_word() const {
  std::vector<Factor> factors;
  for (auto it = shears.rbegin(); it != shears.rend(); ++it) factors.push_back(Factor{*it, false, {}});
  return MapWord(std::move(factors));
}

MapWord TransitionFactorization::conjugated_word() const {
  std::vector<Factor> factors;
  for (auto it = conjugated.rbegin(); it != conjugated.rend(); ++it) factors.push_back(Factor{*it, false, {}});
  return MapWord(std::move(factors));
}

TransitionFactorization factor_transition(const OscillationPlan& plan, std::size_t k, const Polynomial& f,
                                          const TransitionOrbit& orbit, Precision prec,
                                          std::span<const BigComplex> detour_points) {
  if (k + 1 > plan.size()) throw PreconditionError("plan has no stage " + std::to_string(k + 1));
  const Rational& a = plan.a;
  const PlanStage cur = plan.stage(k);
  const PlanStage next = plan.stage(k + 1);
  std::optional<std::int64_t> ell = plan.detour(k);
  if (!ell) throw PreconditionError("detour length for the transition from stage 0 is missing (ell0)");
  if (*ell < 1) throw PreconditionError("detour length must be at least 1");
  const std::int64_t m = cur.N - cur.n;
  if (m < 0) throw PreconditionError("stage " + std::to_string(k) + " has N < n");
  const std::int64_t D = plan.product(k + 1);
  if (D % 2 == 0) throw PreconditionError("product d_1···d_" + std::to_string(k + 1) + " must be odd");

  TransitionFactorization out;
  out.stage = k;
  out.tau_middle = D - 1 - 2 * (m + cur.q + 2);
  out.tau_detour = 2 * (next.q - *ell - 2) + 1;
  if (out.tau_middle < 0)
    throw PreconditionError("degree bound violated: d_1···d_" + std::to_string(k + 1) + " = " + std::to_string(D) +
                            " is below 2(N_k - n_k + q_k + 2) + 1 = " + std::to_string(2 * (m + cur.q + 2) + 1));
  if (out.tau_detour < 0)
    throw PreconditionError("q_" + std::to_string(k + 1) + " must be at least ell + 2");

  BigReal av = to_big(a, prec);
  BigReal beta = rational_pow(a, 2 * cur.q, prec);
  BigReal s = rational_pow(a, 2 * next.q, prec);

  std::vector<Factor> blocks{tau(a)};
  for (std::int64_t i = 1; i <= *ell; ++i)
    blocks.push_back(named(lambda_tilde(f, a, i, prec), "lambda_tilde_" + std::to_string(i)));
  blocks.push_back(tau(a, out.tau_detour));
  auto [S1, S2] = forward_translation_shears(a, orbit.Q_ell, next.q, prec);
  blocks.push_back(named(S2, "S_2"));
  blocks.push_back(named(S1, "S_1"));
  blocks.push_back(named(CalligraphicH{a, (2 - D) * next.d, next.d}, "calligraphic_H"));
  blocks.push_back(tau(a, out.tau_middle));
  blocks.push_back(named(translation_shear(-(orbit.P_n.z * rational_pow(a, 2 * (m + 1) + 2, prec)), a), "R_tilde_2"));
  blocks.push_back(named(translation_shear(-(orbit.P_n.w * rational_pow(a, 2 * (m + 1) + 1, prec)), a), "R_tilde_1"));
  blocks.push_back(tau(a));
  for (std::int64_t i = m; i >= 1; --i)
    blocks.push_back(named(lambda_hat(f, a, i, prec), "lambda_hat_" + std::to_string(i)));
  blocks.push_back(tau(a));
  out.word = MapWord(std::move(blocks));

  Shear F{f, a};
  std::vector<Factor> target;
  for (std::int64_t i = 0; i < *ell; ++i) target.push_back(Factor{F, true, "F_inverse"});
  target.push_back(named(AffineScale{orbit.Q_ell, s}, "Phi_ell"));
  target.push_back(named(Model{a, next.d, D}, "H"));
  target.push_back(Factor{AffineScale{orbit.P_n, beta}, true, "Phi_n_inverse"});
  for (std::int64_t i = 0; i < m; ++i) target.push_back(Factor{F, true, "F_inverse"});
  out.target = MapWord(std::move(target));

  auto factors = out.word.factors();
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    if (const auto* t = std::get_if<TauPower>(&it->map)) {
      for (std::int64_t i = 0; i < t->power; ++i) out.shears.push_back(Shear{Polynomial(), a});
    } else {
      out.shears.push_back(as_shear(it->map, prec));
    }
  }

  const std::size_t N = out.shears.size();
  if (N < 2) throw PreconditionError("transition word is too short to conjugate");
  if (!detour_points.empty() && detour_points.size() != N - 2)
    throw PreconditionError("expected " + std::to_string(N - 2) + " intermediate conjugation points");

  // The conjugated coefficients can be far larger than the values they
  // produce near the orbit (𝓗 carries a^((2-D)d)). A first pass at prec
  // measures them; the recorded orbit and the g_n are then built and kept
  // with that many guard bits, so evaluating G_n does not lose them.
  auto conjugate = [&](Precision p) {
    BigReal ap = to_big(a, p);
    std::vector<BigComplexPoint> X{BigComplexPoint(orbit.P_N.z.rounded(p), orbit.P_N.w.rounded(p))};
    std::vector<Polynomial> phis;
    for (const auto& psi : out.shears) phis.push_back(psi.phi.rounded(p));
    for (const auto& phi : phis) X.push_back(shortc2::apply(ElementaryMap(Shear{phi, a}), X.back()));

    std::vector<BigComplex> zpp(N + 1, BigComplex(p));
    zpp[0] = X[0].z;
    for (std::size_t n = 1; n + 2 <= N; ++n)
      zpp[n] = detour_points.empty() ? X[n].z + BigComplex(BigReal(1L, p)) : detour_points[n - 1].rounded(p);
    zpp[N - 1] = X[N].w / ap;
    zpp[N] = X[N].z;
    std::vector<BigComplexPoint> T{X[0]};
    for (std::size_t n = 1; n <= N; ++n) T.emplace_back(zpp[n], zpp[n - 1] * ap);

    std::vector<Shear> G;
    for (std::size_t n = 1; n <= N; ++n) {
      const Polynomial& phi = phis[n - 1];
      const BigComplex& x_prev = X[n - 1].z;
      BigComplex shift = x_prev - T[n - 1].z;
      BigComplex constant = T[n].z - phi(x_prev) - T[n - 1].w * ap;
      G.push_back(Shear{phi.shifted(shift).plus_constant(constant), a});
    }
    return std::make_tuple(std::move(X), std::move(T), std::move(G));
  };

  auto [X0, T0, G0] = conjugate(prec);
  std::int64_t largest = 0;
  for (const auto& g : G0)
    for (const auto& c : g.phi.coefficients()) {
      if (!c.re.is_zero()) largest = std::max(largest, c.re.exponent());
      if (!c.im.is_zero()) largest = std::max(largest, c.im.exponent());
    }
  Precision wide = prec.widened(static_cast<int>(64 + largest));
  std::tie(out.X, out.T, out.conjugated) = conjugate(wide);
  return out;
}

// ---- potentials ------------------------------------------------------------

BigReal wandering_potential(const OscillationPlan& plan, std::size_t k, const MapWord& forward_to_nk,
                            const BigComplexPoint& P_nk, const BigComplexPoint& z) {
  if (k < 1) throw PreconditionError("wandering potential needs k >= 1");
  Precision prec = z.precision();
  const PlanStage s = plan.stage(k);
  std::int64_t D = plan.product(k);
  BigReal floor_value = rational_pow(plan.a, 2 * s.q, prec) * rational_pow(plan.a, D, prec);
  BigReal distance = (shortc2::apply(forward_to_nk, z) - P_nk).max_norm();
  return log(max(distance, floor_value)) / BigReal(static_cast<long>(D), prec);
}

ThetaReport theta_recursion_check(const ModelSequence& H, std::span<const MapWord> G,
                                  std::span<const BigComplexPoint> ws, std::size_t k_max, std::size_t samples,
                                  std::uint64_t seed) {
  if (ws.empty()) throw PreconditionError("theta check needs at least one point");
  if (k_max < 1 || G.size() < k_max || !H.has_level(k_max))
    throw PreconditionError("sequences are shorter than the requested depth");
  Precision prec = ws.front().precision();

  std::vector<BigReal> eta;
  for (std::size_t k = 0; k <= k_max; ++k) eta.push_back(H.eta(k, prec));
  for (std::size_t k = 1; k <= k_max; ++k) {
    BigReal dev = sampled_deviation(MapWord{H.level(k)}, G[k - 1], samples, seed + k, prec);
    if (dev > eta[k])
      throw PreconditionError("level " + std::to_string(k) + ": sampled ||G_k - H_k|| = " + dev.to_string(6) +
                              " exceeds eta_k = " + eta[k].to_string(6));
  }

  ThetaReport report{BigReal(prec), {}, std::vector<BigReal>(k_max, BigReal(prec))};
  BigReal one(1L, prec);
  for (const auto& w : ws) {
    std::vector<BigComplexPoint> orbit{w};
    for (std::size_t k = 1; k <= k_max; ++k) orbit.push_back(shortc2::apply(G[k - 1], orbit.back()));
    std::optional<std::size_t> entry;
    for (std::size_t k = 0; k <= k_max && !entry; ++k)
      if (orbit[k].euclidean_norm() < one) entry = k;
    if (!entry) throw PreconditionError("point never enters B under G up to the requested depth");
    report.entry_levels.push_back(*entry);
    for (std::size_t k = *entry; k < k_max; ++k) {
      BigReal theta_k = max(orbit[k].max_norm(), eta[k]);
      BigReal theta_next = max(orbit[k + 1].max_norm(), eta[k + 1]);
      BigReal ratio = theta_next / pow(theta_k, H.degree(k + 1));
      report.level_max[k] = max(report.level_max[k], ratio);
      report.max_ratio = max(report.max_ratio, ratio);
    }
  }
  return report;
}

BigReal max_identity_residual(const MapWord& lhs, const MapWord& rhs, std::span<const BigComplexPoint> points,
                              unsigned workers) {
  if (points.empty()) throw PreconditionError("no sample points");
  Precision prec = points.front().precision();
  std::vector<BigReal> residuals(points.size(), BigReal(prec));
  parallel_for(points.size(), workers, [&](std::size_t i) {
    residuals[i] = relative_error(shortc2::apply(lhs, points[i]), shortc2::apply(rhs, points[i]));
  });
  BigReal worst(prec);
  for (const auto& r : residuals) worst = max(worst, r);
  return worst;
}

}  // namespace shortc2
