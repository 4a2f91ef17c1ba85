#pragma once

// Oscillation plans and the shear factorization of rescaled transitions.
//
// A plan lists stages k = 1..K with degrees d_k, orbit indices n_k ≤ N_k,
// rescaling exponents q_k (β_{n_k} = a^(2 q_k)), radii R_k and detour lengths
// ℓ_k. Stage 0 is implicit: n_0 = N_0 = q_0 = 0, R_0 = 1.
//
// The transition from stage k to k+1,
//   T = F^(-ℓ) o Φ_ℓ o H_{k+1} o Φ_{n_k}^(-1) o F^(n_k - N_k),
// is rewritten as a word of shears (z, w) -> (φ(z) + a w, a z) built from
// τ(z, w) = (a w, a z). Inverse iterates use
//   F^(-j) = τ o Λ̃_1 o ... o Λ̃_j o τ o τ^(-2(j+1)) = τ^(-2(j+1)) o τ o Λ̂_j o ... o Λ̂_1 o τ
// with Λ̃_j(z, w) = (-f(a^(2j) z)/a^(2j) + a w, a z) and
// Λ̂_j(z, w) = (-a^(2j) f(z/a^(2j)) + a w, a z).
//
// The affine inverse is Φ_{n_k}^(-1) = τ^(-2(q_k+1)) o R_2 o R_1, so the τ
// exponent between the model map and the translation shears is
//   D_{k+1} - 1 - 2(N_k - n_k + q_k + 2),
// which must be nonnegative: D_{k+1} ≥ 2(N_k - n_k + q_k + 2) + 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shortc2/maps.hpp"
#include "shortc2/shortbasin.hpp"

namespace shortc2 {

struct PlanStage {
  int d = 3;
  std::int64_t n = 0;
  std::int64_t N = 0;
  std::int64_t q = 1;
  Rational R{1};
  std::int64_t ell = 1;
};

struct OscillationPlan {
  Rational a{1, 2};
  /// Detour length into stage 1; constrains q_1 when present.
  std::optional<std::int64_t> ell0;
  std::vector<PlanStage> stages;

  std::size_t size() const { return stages.size(); }
  /// Stage k (k = 0 is the implicit initial stage).
  PlanStage stage(std::size_t k) const;
  /// D_k = d_k···d_1; throws OverflowError past 2^62.
  std::int64_t product(std::size_t k) const;
  /// Detour length ℓ_k used in the transition k -> k+1.
  std::optional<std::int64_t> detour(std::size_t k) const;
};

struct PlanViolation {
  std::string condition;
  std::size_t stage;
  std::string message;
};

/// Condition names: "degree-minimum", "parity", "(e)", "(f)", "degree-bound",
/// "q-bound", "detour-length", "monotone-R", "monotone-n", "monotone-N",
/// "interleave".
std::vector<PlanViolation> validate_plan(const OscillationPlan& plan);

/// β_n from condition (e): 1/k between N_{k-1} and n_k, a^(2q_k) at n_k,
/// 1/(k+1) between n_k and N_k.
BigReal plan_beta(const OscillationPlan& plan, std::int64_t n, Precision prec);

/// q with x = a^(2q); PreconditionError when x is not an even power of a.
std::int64_t even_power_exponent(const BigReal& x, const Rational& a);

/// Λ̃_j and Λ̂_j for F(z, w) = (f(z) + a w, a z).
Shear lambda_tilde(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec);
Shear lambda_hat(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec);

struct InverseIterateWords {
  MapWord tilde_form;  // τ o Λ̃_1 o ... o Λ̃_j o τ o τ^(-2(j+1))
  MapWord hat_form;    // τ^(-2(j+1)) o τ o Λ̂_j o ... o Λ̂_1 o τ
};

/// Both factorizations of F^(-j); j = 0 gives words for the identity.
InverseIterateWords factor_inverse_iterate(const Polynomial& f, const Rational& a, std::int64_t j, Precision prec);

/// H = 𝓗 o τ^(D-1) with 𝓗(z, w) = (a^((2-D)d) z^d + a w, a z). D must be odd.
MapWord factor_model_split(const Rational& a, int d, std::int64_t D);
/// The split of H_{k+1} for a plan; PreconditionError on an even product.
MapWord factor_model_split(const OscillationPlan& plan, std::size_t k);

struct AffineFactors {
  MapWord forward;  // Φ_ℓ = τ^(2(q'-1)) o S_2 o S_1
  MapWord inverse;  // Φ_n^(-1) = τ^(-2(q+1)) o R_2 o R_1
};

/// Shear words for Φ_ℓ(P) = Q + s P and Φ_n^(-1)(P) = (P - center) / β.
/// s and β must be even powers of a.
AffineFactors factor_affine(const Rational& a, const BigComplexPoint& Q, const BigReal& s,
                            const BigComplexPoint& center, const BigReal& beta);

struct TransitionOrbit {
  BigComplexPoint P_n;   // P_{n_k}
  BigComplexPoint P_N;   // P_{N_k}
  BigComplexPoint Q_ell; // Q_ℓ
};

/// Orbit data consistent with F: P_N = F^(N-n)(P_n) and Q_ℓ = F^ℓ(Q_0).
TransitionOrbit consistent_orbit(const Polynomial& f, const Rational& a, std::int64_t steps, std::int64_t ell,
                                 const BigComplexPoint& P_n, const BigComplexPoint& Q0);

struct TransitionFactorization {
  std::size_t stage;           // transition stage -> stage + 1
  std::int64_t tau_middle;     // D_{k+1} - 1 - 2(N_k - n_k + q_k + 2)
  std::int64_t tau_detour;     // 2(q_{k+1} - ℓ - 2) + 1
  MapWord word;                // block word, τ powers kept as single factors
  MapWord target;              // F^(-ℓ) o Φ_ℓ o H_{k+1} o Φ_{n_k}^(-1) o F^(n_k-N_k), evaluated directly
  std::vector<Shear> shears;   // ψ_1, ..., ψ_N in application order
  std::vector<BigComplexPoint> X;  // X_n = ψ_n o ... o ψ_1(P_{N_k})
  std::vector<BigComplexPoint> T;  // conjugated orbit, T_0 = P_{N_k}, T_N = X_N
  std::vector<Shear> conjugated;   // G_1, ..., G_N

  /// ψ_N o ... o ψ_1 as a word.
  MapWord shear_word() const;
  /// G_N o ... o G_1 as a word.
  MapWord conjugated_word() const;
};

/// Builds the transition k -> k+1 of a valid plan for F(z, w) = (f(z) + a w, a z).
/// Intermediate conjugation points z''_1..z''_{N-2} default to x_n + 1.
/// Throws PreconditionError when a τ exponent would be negative.
TransitionFactorization factor_transition(const OscillationPlan& plan, std::size_t k, const Polynomial& f,
                                          const TransitionOrbit& orbit, Precision prec,
                                          std::span<const BigComplex> detour_points = {});

/// ψ_k(z) = log max{‖F^{n_k}(z) - P_{n_k}‖, β_{n_k} η_k} / D_k (max norm).
BigReal wandering_potential(const OscillationPlan& plan, std::size_t k, const MapWord& forward_to_nk,
                            const BigComplexPoint& P_nk, const BigComplexPoint& z);

struct ThetaReport {
  BigReal max_ratio;
  /// Per point: first j with G_{j,0}(w) in B.
  std::vector<std::size_t> entry_levels;
  /// Index k = 0..k_max-1: largest ratio θ_{k+1}/θ_k^(d_{k+1}) over the points.
  std::vector<BigReal> level_max;
};

/// θ_k(w) = max{‖G_{k,0}(w)‖_max, η_k}. Checks ‖G_k - H_k‖ ≤ η_k on sampled
/// points of B̄ first (PreconditionError naming the level otherwise).
ThetaReport theta_recursion_check(const ModelSequence& H, std::span<const MapWord> G,
                                  std::span<const BigComplexPoint> ws, std::size_t k_max, std::size_t samples,
                                  std::uint64_t seed);

/// Max of relative_error(lhs(P), rhs(P)) over the points.
BigReal max_identity_residual(const MapWord& lhs, const MapWord& rhs, std::span<const BigComplexPoint> points,
                              unsigned workers = 1);

}  // namespace shortc2
