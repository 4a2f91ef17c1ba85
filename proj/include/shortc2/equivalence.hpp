#pragma once

// Basin equivalence under perturbation. For ball-contracting sequences H and
// G, Φ_n = H_{n,0}^{-1} o G_{n,0} converges on Ω_G when each level deviation
// stays within the ε-schedule ε_n = min(δ̃, δ_1..δ_n) / (2^n M_n N_n).
//
// All constants are sampled estimates, not enclosures. Distances use the
// euclidean norm (B is the euclidean unit ball).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shortc2/maps.hpp"

namespace shortc2 {

/// Image of the closed ball B(center, radius) under `parametrization`
/// (identity when the word is empty).
struct SampledDomain {
  BigComplexPoint center;
  BigReal radius;
  MapWord parametrization;

  static SampledDomain unit_ball(Precision prec);
};

struct LipschitzEstimate {
  BigReal constant;  // sampled sup × safety factor
  BigReal sampled_sup;
  int density;
  bool converged;
};

inline constexpr const char* kLipschitzSafety = "1.1";
inline constexpr const char* kRefinementAgreement = "0.02";

/// Sup of the Jacobian operator norm of m over a grid of the domain, × 1.1.
LipschitzEstimate lipschitz_constant(const MapWord& m, const SampledDomain& domain, int grid_density,
                                     unsigned workers = 1);

/// Refines the grid (density 5, 9, 13, ...) until two successive estimates
/// agree within 2% or max_density is reached.
LipschitzEstimate refined_lipschitz_constant(const MapWord& m, const SampledDomain& domain, int max_density,
                                             unsigned workers = 1);

/// H_{n,0} = H_n o ... o H_1 for the first n words of `levels`.
MapWord composite(std::span<const MapWord> levels, std::size_t n);

/// Sampled sup of ‖m(x)‖ over the unit sphere.
BigReal boundary_sup(const MapWord& m, std::size_t samples, std::uint64_t seed, Precision prec);

/// Sampled sup of ‖a(x) - b(x)‖ over the closed unit ball.
BigReal sampled_deviation(const MapWord& a, const MapWord& b, std::size_t samples, std::uint64_t seed,
                          Precision prec);

struct ScheduleLevel {
  std::size_t level;
  LipschitzEstimate M;
  LipschitzEstimate N;
  BigReal delta;
  BigReal epsilon;
  BigReal containment_sup;
};

struct EpsilonSchedule {
  BigReal delta_tilde;
  std::vector<ScheduleLevel> levels;
};

struct ScheduleOptions {
  int max_density = 13;
  std::size_t boundary_samples = 400;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// Injectivity margin δ̃ = 1/4.
BigReal injectivity_margin(Precision prec);

/// Throws PreconditionError naming the first level whose sampled boundary
/// image is not strictly inside B.
EpsilonSchedule epsilon_schedule(std::span<const MapWord> H, std::size_t n_max, Precision prec,
                                 const ScheduleOptions& options = {});

struct ConjugacyStep {
  std::size_t n;
  BigComplexPoint phi;
  BigReal increment;
};

struct ConjugacyTrace {
  BigComplexPoint p;
  /// First n with G_{n,0}(p) in B.
  std::size_t entry_level;
  std::vector<ConjugacyStep> steps;
  bool converged;
};

/// Φ_n(p) for n = 1..n_max. p must be certified in Ω_G by its G-orbit
/// entering B within n_max steps; otherwise PreconditionError.
ConjugacyTrace build_conjugacy(std::span<const MapWord> H, std::span<const MapWord> G, const BigComplexPoint& p,
                               std::size_t n_max);

}  // namespace shortc2
