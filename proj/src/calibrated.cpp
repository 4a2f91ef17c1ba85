#include "shortc2/calibrated.hpp"

#include "shortc2/parallel.hpp"
#include "shortc2/sampling.hpp"

namespace shortc2 {

namespace {

BigComplexPoint iterate(const MapWord& f, std::int64_t n, BigComplexPoint x) {
  for (std::int64_t i = 0; i < n; ++i) x = shortc2::apply(f, x);
  return x;
}

BigReal spectral_radius(const Jacobian2& J) {
  BigComplex trace = J.m00 + J.m11;
  BigComplex four_det = J.determinant();
  four_det.scale2(2);
  BigComplex root = sqrt(trace * trace - four_det);
  BigComplex l1 = trace + root;
  BigComplex l2 = trace - root;
  l1.scale2(-1);
  l2.scale2(-1);
  return max(abs(l1), abs(l2));
}

}  // namespace

ContractionEstimate estimate_contraction(const MapWord& f, const BigReal& r, std::size_t horizon,
                                         std::size_t samples, std::uint64_t seed) {
  Precision prec = r.precision();
  BigComplexPoint origin(prec);
  BigReal tolerance = BigReal::pow2(8 - prec.bits(), prec);
  if (shortc2::apply(f, origin).euclidean_norm() > tolerance) throw PreconditionError("map does not fix the origin");
  BigReal rho = spectral_radius(differential(f, origin));
  BigReal one(1L, prec);
  if (rho >= one)
    throw PreconditionError("fixed point is not attracting (spectral radius " + rho.to_string(6) + ")");
  BigReal mu = rho + one;
  mu.scale2(-1);

  Sampler sampler(seed);
  BigReal sup(prec);
  for (std::size_t s = 0; s < samples; ++s) {
    BigComplexPoint z = r * Sampler::to_point(sampler.ball(), prec);
    BigReal norm = z.euclidean_norm();
    if (norm.is_zero()) continue;
    BigComplexPoint x = z;
    BigReal scale = norm;
    for (std::size_t n = 0; n <= horizon; ++n) {
      sup = max(sup, x.euclidean_norm() / scale);
      x = shortc2::apply(f, x);
      scale *= mu;
    }
  }
  BigReal C = sup * BigReal::parse(kContractionSafety, prec);
  return {std::move(C), std::move(mu), std::move(rho)};
}

RadiusSchedule RadiusSchedule::geometric(BigReal start, BigReal ratio) {
  return {std::vector<BigReal>{std::move(start)}, std::move(ratio)};
}

BigReal RadiusSchedule::at(std::size_t j) const {
  if (listed.empty()) throw PreconditionError("radius schedule is empty");
  BigReal r = j < listed.size() ? listed[j] : listed.back();
  if (j >= listed.size()) {
    if (!ratio) throw PreconditionError("radius r_" + std::to_string(j) + " is not given");
    for (std::size_t i = listed.size() - 1; i < j; ++i) r *= *ratio;
  }
  if (r.sign() <= 0) throw PreconditionError("radius r_" + std::to_string(j) + " must be positive");
  return r;
}

const MapWord& AttractingSystem::map(std::size_t j) const {
  if (maps.empty()) throw PreconditionError("system has no maps");
  return j < maps.size() ? maps[j] : maps.back();
}

CalibratedBasin choose_iterates(const AttractingSystem& system, std::size_t j_max, Precision prec) {
  CalibratedBasin out;
  for (std::size_t j = 0; j <= j_max + 1; ++j) {
    BigReal r = system.r.at(j).rounded(prec);
    if (j > 0 && r >= out.r.back())
      throw PreconditionError("radii must decrease: r_" + std::to_string(j) + " >= r_" + std::to_string(j - 1));
    out.r.push_back(std::move(r));
  }

  BigReal one(1L, prec);
  BigReal tolerance = BigReal::pow2(8 - prec.bits(), prec);
  for (std::size_t j = 0; j <= j_max; ++j) {
    out.maps.push_back(system.map(j));
    Contraction c{one, one};
    if (system.constants.empty()) {
      ContractionEstimate e = estimate_contraction(out.maps.back(), out.r[j], system.horizon, system.samples,
                                                   system.seed + j);
      c = {max(e.C, one), e.mu};
    } else {
      const Contraction& d = j < system.constants.size() ? system.constants[j] : system.constants.back();
      c = {d.C.rounded(prec), d.mu.rounded(prec)};
      if (c.C < one) throw PreconditionError("C_" + std::to_string(j) + " must be at least 1");
      if (c.mu.sign() <= 0 || c.mu >= one) throw PreconditionError("mu_" + std::to_string(j) + " must lie in (0, 1)");
    }

    BigReal log_mu = abs(log(c.mu));
    BigReal nesting = log(c.C * out.r[j] / out.r[j + 1]) / log_mu;
    BigReal rate = abs(log(out.r[j])) * BigReal(static_cast<long>(j + 1), prec) / log_mu;
    BigReal bound = max(max(nesting, rate), BigReal(prec));
    bound -= tolerance * max(bound, one);
    BigReal ceiling = -floor(-bound);
    std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(ceiling.to_double()));
    out.n.push_back(n);
    out.constants.push_back(std::move(c));
  }
  return out;
}

BigReal rate_ratio(const CalibratedBasin& basin, std::size_t j) {
  const BigReal& r = basin.r.at(j);
  return abs(log(r)) / (BigReal(static_cast<long>(basin.n.at(j)), r.precision()) * abs(log(basin.constants[j].mu)));
}

Membership calibrated_membership(const CalibratedBasin& basin, const BigComplexPoint& p, std::size_t depth) {
  if (depth > basin.depth()) throw PreconditionError("membership depth exceeds the chosen iterates");
  BigComplexPoint x = p;
  for (std::size_t j = 0; j <= depth; ++j) {
    if (j > 0) {
      try {
        x = iterate(basin.maps[j - 1], basin.n[j - 1], std::move(x));
      } catch (const OverflowError&) {
        return {false, depth};
      }
    }
    if (x.euclidean_norm() < basin.r[j]) return {true, j};
  }
  return {false, depth};
}

std::vector<Membership> calibrated_membership(const CalibratedBasin& basin, std::span<const BigComplexPoint> points,
                                              std::size_t depth, unsigned workers) {
  std::vector<Membership> out(points.size(), Membership{false, depth});
  parallel_for(points.size(), workers, [&](std::size_t i) { out[i] = calibrated_membership(basin, points[i], depth); });
  return out;
}

std::optional<BigReal> appendix_potential(const CalibratedBasin& basin, const BigComplexPoint& p, std::size_t j) {
  if (j >= basin.depth()) throw PreconditionError("potential index exceeds the chosen iterates");
  BigComplexPoint x = p;
  for (std::size_t i = 0; i <= j; ++i) x = iterate(basin.maps[i], basin.n[i], std::move(x));
  BigReal norm = x.euclidean_norm();
  if (norm.is_zero()) return std::nullopt;
  Precision prec = p.precision();
  return log(norm) / (-BigReal(static_cast<long>(basin.n[j]), prec) * log(basin.constants[j].mu));
}

BigReal observed_nesting(const CalibratedBasin& basin, std::size_t j, std::size_t samples, std::uint64_t seed) {
  if (j >= basin.depth()) throw PreconditionError("nesting index exceeds the chosen iterates");
  Precision prec = basin.r[j].precision();
  Sampler sampler(seed);
  BigReal worst(prec);
  for (std::size_t s = 0; s < samples; ++s) {
    BigComplexPoint x = basin.r[j] * sampler.sphere_point(prec);
    worst = max(worst, iterate(basin.maps[j], basin.n[j], x).euclidean_norm() / basin.r[j + 1]);
  }
  return worst;
}

}  // namespace shortc2
