#include "shortc2/sampling.hpp"

#include <cmath>

namespace shortc2 {

Vec4 Sampler::sphere() {
  for (;;) {
    Vec4 v{normal_(engine_), normal_(engine_), normal_(engine_), normal_(engine_)};
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    if (n < 1e-12) continue;
    for (double& c : v) c /= n;
    return v;
  }
}

Vec4 Sampler::ball() {
  Vec4 v = sphere();
  double r = std::pow(unit_(engine_), 0.25);
  for (double& c : v) c *= r;
  return v;
}

std::array<double, 2> Sampler::disc(double r) {
  double t = 2.0 * M_PI * unit_(engine_);
  double s = r * std::sqrt(unit_(engine_));
  return {s * std::cos(t), s * std::sin(t)};
}

double Sampler::uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

BigComplexPoint Sampler::ball_point(double radius, Precision prec) {
  Vec4 v = ball();
  for (double& c : v) c *= radius;
  return to_point(v, prec);
}

std::vector<Vec4> unit_ball_grid(int density) {
  if (density < 2) throw PreconditionError("grid density must be at least 2");
  std::vector<Vec4> out;
  double step = 2.0 / (density - 1);
  for (int a = 0; a < density; ++a)
    for (int b = 0; b < density; ++b)
      for (int c = 0; c < density; ++c)
        for (int d = 0; d < density; ++d) {
          Vec4 v{-1 + a * step, -1 + b * step, -1 + c * step, -1 + d * step};
          double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
          if (n <= 1.0 + 1e-12) out.push_back(v);
          if (n > 1e-12 && std::abs(n - 1.0) > 1e-12) {
            Vec4 u{v[0] / n, v[1] / n, v[2] / n, v[3] / n};
            out.push_back(u);
          }
        }
  return out;
}

std::vector<Vec4> unit_ball_samples(std::size_t count, std::uint64_t seed) {
  Sampler sampler(seed);
  std::vector<Vec4> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(i % 4 == 0 ? sampler.sphere() : sampler.ball());
  return out;
}

}  // namespace shortc2
