#pragma once

// Seeded sample generators for verification sweeps. Every sweep in the
// library draws from one of these so a 64-bit seed reproduces it exactly.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "shortc2/numerics.hpp"

namespace shortc2 {

using Vec4 = std::array<double, 4>;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the unit sphere of C^2 = R^4.
  Vec4 sphere();
  /// Uniform in the closed unit ball of C^2.
  Vec4 ball();
  /// Uniform in the closed disc of radius r in C, as (re, im).
  std::array<double, 2> disc(double r);
  double uniform(double lo, double hi);

  BigComplexPoint sphere_point(Precision prec) { return to_point(sphere(), prec); }
  /// Point of the ball of the given radius around the origin.
  BigComplexPoint ball_point(double radius, Precision prec);

  static BigComplexPoint to_point(const Vec4& v, Precision prec) { return {v[0], v[1], v[2], v[3], prec}; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Regular grid of spacing 2/(density-1) on [-1,1]^4 restricted to the closed
/// unit ball, plus the radial projection of every nonzero grid point onto the
/// unit sphere. density must be at least 2.
std::vector<Vec4> unit_ball_grid(int density);

/// `count` seeded points: a quarter on the unit sphere, the rest in the ball.
std::vector<Vec4> unit_ball_samples(std::size_t count, std::uint64_t seed);

}  // namespace shortc2
