#pragma once

// Calibrated basins of a sequence of maps f_0, f_1, ... fixing the origin
// with attracting linear part:
//   Ω = ∪_j (f_{j-1}^{n_{j-1}} o ... o f_0^{n_0})^{-1}(B(0, r_j)),
// with n_j chosen so that C_j μ_j^{n_j} r_j ≤ r_{j+1} (nesting) and
// |log r_j| / (n_j |log μ_j|) ≤ 1/(j+1) (rate). Distances are euclidean.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shortc2/maps.hpp"

namespace shortc2 {

struct Contraction {
  BigReal C;
  BigReal mu;
};

struct ContractionEstimate {
  BigReal C;
  BigReal mu;
  BigReal spectral_radius;
};

/// μ = (ρ + 1)/2 for the spectral radius ρ of Df(0); C is the sampled max of
/// ‖f^n(z)‖/(μ^n ‖z‖) over z in B(0, r) and 0 ≤ n ≤ horizon, times 1.1.
/// PreconditionError when f(0) ≠ 0 or ρ ≥ 1.
ContractionEstimate estimate_contraction(const MapWord& f, const BigReal& r, std::size_t horizon,
                                         std::size_t samples, std::uint64_t seed = 1);

inline constexpr const char* kContractionSafety = "1.1";

/// r_j from an explicit list, continued geometrically by `ratio` past its end.
struct RadiusSchedule {
  std::vector<BigReal> listed;
  std::optional<BigReal> ratio;

  static RadiusSchedule geometric(BigReal start, BigReal ratio);
  /// PreconditionError when r_j is not given or not positive.
  BigReal at(std::size_t j) const;
};

struct AttractingSystem {
  /// f_0, f_1, ...; the last map repeats.
  std::vector<MapWord> maps;
  RadiusSchedule r;
  /// Declared (C_j, μ_j); the last entry repeats. Estimated when empty.
  std::vector<Contraction> constants;
  std::size_t horizon = 20;
  std::size_t samples = 200;
  std::uint64_t seed = 1;

  const MapWord& map(std::size_t j) const;
};

struct CalibratedBasin {
  std::vector<MapWord> maps;         // f_0..f_J
  std::vector<BigReal> r;            // r_0..r_{J+1}
  std::vector<Contraction> constants;  // (C_j, μ_j), j = 0..J
  std::vector<std::int64_t> n;       // n_0..n_J

  std::size_t depth() const { return n.size(); }
};

/// Checks r_0 > r_1 > ... > r_{j_max+1} > 0, estimates missing constants and
/// picks the minimal n_j meeting nesting and rate for j = 0..j_max.
CalibratedBasin choose_iterates(const AttractingSystem& system, std::size_t j_max, Precision prec);

/// |log r_j| / (n_j |log μ_j|).
BigReal rate_ratio(const CalibratedBasin& basin, std::size_t j);

struct Membership {
  bool inside;
  /// First stage j with the composed orbit point in B(0, r_j); `depth` when unknown.
  std::size_t j;
};

/// Inside(j) for the first j ≤ depth with ‖f_{j-1}^{n_{j-1}} o ... o f_0^{n_0}(P)‖ < r_j.
Membership calibrated_membership(const CalibratedBasin& basin, const BigComplexPoint& p, std::size_t depth);
std::vector<Membership> calibrated_membership(const CalibratedBasin& basin, std::span<const BigComplexPoint> points,
                                              std::size_t depth, unsigned workers = 1);

/// G_j(P) = log ‖f_j^{n_j} o ... o f_0^{n_0}(P)‖ / (-n_j log μ_j); nullopt
/// stands for -∞ when the orbit point is exactly 0.
std::optional<BigReal> appendix_potential(const CalibratedBasin& basin, const BigComplexPoint& p, std::size_t j);

/// Largest ‖f_j^{n_j}(x)‖ / r_{j+1} over seeded x on the sphere of radius r_j.
BigReal observed_nesting(const CalibratedBasin& basin, std::size_t j, std::size_t samples, std::uint64_t seed);

}  // namespace shortc2
