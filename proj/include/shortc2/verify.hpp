#pragma once

// Identity and property suites shared by the `verify` command and the
// acceptance runner. Each returns a JSON report with a boolean "passed";
// every report records the seed and precision it ran with and nothing that
// depends on timing or worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "shortc2/io.hpp"

namespace shortc2 {

struct SuiteOptions {
  Precision prec = Precision::standard();
  std::uint64_t seed = 1;
  std::size_t points = 1000;
  unsigned workers = 1;
};

/// 2^(16 - p): tolerance for identities between words of exactly
/// representable factors.
BigReal identity_tolerance(Precision prec);

/// Both inverse-iterate words against F^(-j) evaluated factor by factor,
/// for every f and 1 ≤ j ≤ j_max, on seeded points of the unit ball.
Json verify_bilbo(const std::vector<Polynomial>& fs, const Rational& a, std::int64_t j_max, const SuiteOptions& opts);

struct GandalfInput {
  OscillationPlan plan;
  Polynomial f;
  BigComplexPoint P_n;
  BigComplexPoint Q0;
};

/// Validates the plan (violations fail the suite), then for every
/// transition checks the block, shear and conjugated words against the
/// target, the orbit threading G_n(T_{n-1}) = T_n, the shear form of every
/// ψ_n and G_n, and det = -a^2.
Json verify_gandalf(const GandalfInput& input, const SuiteOptions& opts);

/// H = 𝓗 o τ^(D-1) against the model map (a z)^d + a^D w.
Json verify_model_split(const Rational& a, int d, std::int64_t D, const SuiteOptions& opts);

/// θ_{k+1} ≤ 3 θ_k^(d_{k+1}) for k < k_max on `points` seeded w in B, with
/// G = H and with G_k = H_k + (η_k / 2, 0).
Json verify_theta(const ModelSequence& seq, std::size_t k_max, const SuiteOptions& opts);

/// ε-schedule for `levels` levels, then G_n = H_n + (c_n, 0) with
/// c_n = min(perturbation, ε_n). For `points` seeded P in B checks
/// ‖Φ_n(P) - Φ_{n-1}(P)‖ ≤ M_n N_n c_n and ‖Φ_levels(P) - P‖ ≤ δ̃. The
/// conjugacy runs with enough extra bits to resolve the smallest c_n.
Json verify_schedule(const ModelSequence& seq, std::size_t levels, const BigReal& perturbation,
                     const SuiteOptions& opts);

/// Exponent of x in base 2 as a double, or null for 0 (for reports).
Json log2_or_null(const BigReal& x);

}  // namespace shortc2
