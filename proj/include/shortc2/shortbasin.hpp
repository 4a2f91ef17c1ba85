#pragma once

// The model non-autonomous basin: H_k(z, w) = ((a z)^d_k + η_k w, η_k z)
// with η_k = a^(D_k), D_k = d_k···d_1. Points are classified against
// Ω_H = {ψ < 0} using the one-sided bound ψ̃_k ≥ ψ.
//
// Norms: φ_k and the escape test use the max norm, as in the recursion
// φ_{k+1} ≤ 2 φ_k^d. The unit ball B (containment, Kobayashi disks) is
// euclidean.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shortc2/maps.hpp"

namespace shortc2 {

enum class Extension { RepeatLast, None };

class ModelSequence {
 public:
  static constexpr std::int64_t kMaxProduct = std::int64_t{1} << 62;

  /// a in (0, 1), every d_k ≥ 2 (odd when require_odd is set).
  ModelSequence(Rational a, std::vector<int> d, Extension extension = Extension::RepeatLast,
                bool require_odd = false);

  const Rational& a() const { return a_; }
  std::span<const int> declared() const { return d_; }
  Extension extension() const { return extension_; }
  bool require_odd() const { return require_odd_; }

  /// Whether H_k is defined (k ≥ 1).
  bool has_level(std::size_t k) const;
  /// d_k for k ≥ 1, extended by the declared rule.
  int degree(std::size_t k) const;
  /// D_k = d_k···d_1, D_0 = 1. Throws OverflowError past 2^62.
  std::int64_t product(std::size_t k) const;
  /// Smallest degree among d_1..d_k and the extension.
  int min_degree() const;
  /// η_k = a^(D_k), η_0 = 1.
  BigReal eta(std::size_t k, Precision prec) const;
  /// Escape radius 2/a^2.
  BigReal escape_radius(Precision prec) const;

  Model level(std::size_t k) const;
  /// H_{k,0} = H_k o ... o H_1 (empty word for k = 0).
  MapWord composite(std::size_t k) const;

 private:
  Rational a_;
  std::vector<int> d_;
  Extension extension_;
  bool require_odd_;
};

/// Incremental forward orbit P, H_1(P), H_{2,0}(P), ... with cached η_k.
class ModelOrbit {
 public:
  ModelOrbit(const ModelSequence& seq, BigComplexPoint start);

  std::size_t depth() const { return depth_; }
  const BigComplexPoint& point() const { return point_; }
  const BigReal& eta() const { return eta_; }
  /// Applies H_{depth+1}. OverflowError propagates.
  void step();

 private:
  const ModelSequence* seq_;
  BigComplexPoint point_;
  BigReal eta_;
  std::size_t depth_ = 0;
};

struct ModelImage {
  BigComplexPoint h;
  BigReal eta;
};

/// H_{k,0}(P) and η_k.
ModelImage compose_model(const ModelSequence& seq, std::size_t k, const BigComplexPoint& p);

struct PotentialEstimate {
  std::size_t k;
  BigComplex h1, h2;
  BigReal phi;
  BigReal psi;
  BigReal psi_tilde;
  BigReal tail_bound;
};

/// Σ_{j>k} log 2 / D_j: explicit terms through the declared length, then the
/// geometric majorant log 2 / (D_L (r - 1)) with r the smallest admissible degree.
BigReal tail_bound(const ModelSequence& seq, std::size_t k, Precision prec);

/// Estimate from an already computed H_{k,0}(P).
PotentialEstimate potential_at(const ModelSequence& seq, std::size_t k, const BigComplexPoint& h,
                               const BigReal& eta);
PotentialEstimate potential(const ModelSequence& seq, std::size_t k, const BigComplexPoint& p);

enum class Verdict { Inside, Outside, Unknown };
const char* verdict_name(Verdict v);

struct BasinCertificate {
  Verdict verdict;
  std::size_t k;
  /// ψ̃ at the deciding depth; empty when the orbit overflowed.
  std::optional<BigReal> psi_tilde;
  /// |h1| and |h2| at the deciding depth (escape witness); empty on overflow.
  std::optional<BigReal> abs_h1, abs_h2;
  bool overflowed = false;
};

/// Inside(k) at the first k ≤ k_max with ψ̃_k < 0; Outside(k) at the first k
/// with |h1| ≥ 2/a^2 and |h2| ≤ |h1|, or when the orbit overflows; otherwise
/// Unknown(k_max).
BasinCertificate classify(const ModelSequence& seq, const BigComplexPoint& p, std::size_t k_max);

struct KobayashiStep {
  std::size_t k;
  BigReal bound;
};

struct KobayashiQuery {
  std::size_t k;
  BigReal upper_bound;
  bool reached_target;
  /// Every depth examined with H_{k,0}(p) inside B.
  std::vector<KobayashiStep> trace;
};

/// Bound ‖ζ_k‖ / (1 - ‖p_k‖) from the analytic disk w -> H_{k,0}^{-1}(p_k + w R ζ_k).
/// Stops at the first depth meeting `target`, else reports the best bound up to k_max.
KobayashiQuery kobayashi_upper_bound(const ModelSequence& seq, const BigComplexPoint& p,
                                     const BigComplexPoint& zeta, const BigReal& target, std::size_t k_max);

/// Sampled sup of ‖H_n‖ (euclidean) over the closed unit ball.
BigReal ball_contraction_check(const ModelSequence& seq, std::size_t n, std::size_t samples, std::uint64_t seed,
                               Precision prec);

}  // namespace shortc2
