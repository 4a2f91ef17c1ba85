#include "shortc2/equivalence.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "shortc2/parallel.hpp"
#include "shortc2/sampling.hpp"

namespace shortc2 {

SampledDomain SampledDomain::unit_ball(Precision prec) {
  return {BigComplexPoint(prec), BigReal(1L, prec), MapWord()};
}

namespace {

BigComplexPoint domain_point(const SampledDomain& domain, const Vec4& v, Precision prec) {
  BigComplexPoint x = domain.center + domain.radius * Sampler::to_point(v, prec);
  return domain.parametrization.empty() ? x : shortc2::apply(domain.parametrization, x);
}

// Deterministic max-reduction: per-index results, reduced in index order.
BigReal parallel_sup(std::size_t count, unsigned workers, Precision prec,
                     const std::function<BigReal(std::size_t)>& value) {
  std::vector<BigReal> values(count, BigReal(prec));
  parallel_for(count, workers, [&](std::size_t i) { values[i] = value(i); });
  BigReal sup(prec);
  for (const auto& v : values) sup = max(sup, v);
  return sup;
}

}  // namespace

LipschitzEstimate lipschitz_constant(const MapWord& m, const SampledDomain& domain, int grid_density,
                                     unsigned workers) {
  Precision prec = domain.center.precision();
  std::vector<Vec4> grid = unit_ball_grid(grid_density);
  BigReal sup = parallel_sup(grid.size(), workers, prec, [&](std::size_t i) {
    return differential(m, domain_point(domain, grid[i], prec)).operator_norm();
  });
  BigReal constant = sup * BigReal::parse(kLipschitzSafety, prec);
  return {std::move(constant), std::move(sup), grid_density, false};
}

LipschitzEstimate refined_lipschitz_constant(const MapWord& m, const SampledDomain& domain, int max_density,
                                             unsigned workers) {
  Precision prec = domain.center.precision();
  LipschitzEstimate previous = lipschitz_constant(m, domain, 5, workers);
  for (int density = 9; density <= max_density; density += 4) {
    LipschitzEstimate next = lipschitz_constant(m, domain, density, workers);
    BigReal gap = abs(next.sampled_sup - previous.sampled_sup);
    bool agree = gap <= BigReal::parse(kRefinementAgreement, prec) * next.sampled_sup;
    previous = std::move(next);
    if (agree) {
      previous.converged = true;
      return previous;
    }
  }
  return previous;
}

MapWord composite(std::span<const MapWord> levels, std::size_t n) {
  if (n > levels.size()) throw PreconditionError("sequence has only " + std::to_string(levels.size()) + " levels");
  MapWord out;
  for (std::size_t j = n; j >= 1; --j) out.then_apply_after(levels[j - 1]);
  return out;
}

BigReal boundary_sup(const MapWord& m, std::size_t samples, std::uint64_t seed, Precision prec) {
  Sampler sampler(seed);
  BigReal sup(prec);
  for (std::size_t i = 0; i < samples; ++i)
    sup = max(sup, shortc2::apply(m, sampler.sphere_point(prec)).euclidean_norm());
  return sup;
}

BigReal sampled_deviation(const MapWord& a, const MapWord& b, std::size_t samples, std::uint64_t seed,
                          Precision prec) {
  BigReal sup(prec);
  for (const auto& v : unit_ball_samples(samples, seed)) {
    BigComplexPoint x = Sampler::to_point(v, prec);
    sup = max(sup, euclidean_distance(shortc2::apply(a, x), shortc2::apply(b, x)));
  }
  return sup;
}

BigReal injectivity_margin(Precision prec) { return BigReal::pow2(-2, prec); }

namespace {

// Sampled distance between two point clouds. Sorting by norm lets the scan
// stop once the norm gap alone exceeds the best distance found.
BigReal set_distance(std::vector<BigComplexPoint> a, std::vector<BigComplexPoint> b, Precision prec) {
  struct Entry {
    BigReal norm;
    std::size_t index;
  };
  auto sorted = [](const std::vector<BigComplexPoint>& pts) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < pts.size(); ++i) e.push_back({pts[i].euclidean_norm(), i});
    std::sort(e.begin(), e.end(), [](const Entry& x, const Entry& y) { return x.norm < y.norm; });
    return e;
  };
  std::vector<Entry> ea = sorted(a);
  std::vector<Entry> eb = sorted(b);
  std::optional<BigReal> best;
  for (const auto& x : ea) {
    auto start = std::lower_bound(eb.begin(), eb.end(), x.norm,
                                  [](const Entry& e, const BigReal& v) { return e.norm < v; });
    for (auto it = start; it != eb.end(); ++it) {
      if (best && it->norm - x.norm >= *best) break;
      BigReal d = euclidean_distance(a[x.index], b[it->index]);
      if (!best || d < *best) best = d;
    }
    for (auto it = start; it != eb.begin();) {
      --it;
      if (best && x.norm - it->norm >= *best) break;
      BigReal d = euclidean_distance(a[x.index], b[it->index]);
      if (!best || d < *best) best = d;
    }
  }
  return best ? *best : BigReal(prec);
}

}  // namespace

EpsilonSchedule epsilon_schedule(std::span<const MapWord> H, std::size_t n_max, Precision prec,
                                 const ScheduleOptions& options) {
  if (n_max < 1 || n_max > H.size()) throw PreconditionError("schedule depth must lie in 1.." + std::to_string(H.size()));
  EpsilonSchedule out{injectivity_margin(prec), {}};
  BigReal one(1L, prec);

  std::vector<BigReal> containment;
  for (std::size_t n = 1; n <= n_max; ++n) {
    BigReal sup = boundary_sup(H[n - 1], options.boundary_samples, options.seed + n, prec);
    if (sup >= one)
      throw PreconditionError("level " + std::to_string(n) + ": H_n(B) is not inside B (sampled boundary sup " +
                              sup.to_string(6) + ")");
    containment.push_back(std::move(sup));
  }

  Sampler sampler(options.seed);
  std::vector<BigComplexPoint> sphere;
  for (std::size_t i = 0; i < options.boundary_samples; ++i) sphere.push_back(sampler.sphere_point(prec));
  auto boundary_image = [&](std::size_t n) {
    MapWord inverse = composite(H, n).inverse();
    std::vector<BigComplexPoint> pts(sphere.size(), BigComplexPoint(prec));
    parallel_for(sphere.size(), options.workers, [&](std::size_t i) { pts[i] = shortc2::apply(inverse, sphere[i]); });
    return pts;
  };

  BigReal margin = out.delta_tilde;
  std::vector<BigComplexPoint> inner = sphere;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::vector<BigComplexPoint> outer = boundary_image(n);
    BigReal delta = set_distance(inner, outer, prec);
    delta.scale2(-1);
    margin = min(margin, delta);

    MapWord level_inverse = H[n - 1].inverse();
    SampledDomain image_domain{BigComplexPoint(prec), one, level_inverse};
    LipschitzEstimate M =
        refined_lipschitz_constant(composite(H, n - 1).inverse(), image_domain, options.max_density, options.workers);
    LipschitzEstimate N =
        refined_lipschitz_constant(level_inverse, SampledDomain::unit_ball(prec), options.max_density, options.workers);

    BigReal epsilon = margin / (M.constant * N.constant);
    epsilon.scale2(-static_cast<std::int64_t>(n));
    out.levels.push_back({n, std::move(M), std::move(N), std::move(delta), std::move(epsilon), containment[n - 1]});
    inner = std::move(outer);
  }
  return out;
}

ConjugacyTrace build_conjugacy(std::span<const MapWord> H, std::span<const MapWord> G, const BigComplexPoint& p,
                               std::size_t n_max) {
  if (n_max > H.size() || n_max > G.size()) throw PreconditionError("conjugacy depth exceeds the sequence length");
  Precision prec = p.precision();
  BigReal one(1L, prec);

  std::optional<std::size_t> entry;
  BigComplexPoint g = p;
  std::vector<BigComplexPoint> g_orbit{g};
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      g = shortc2::apply(G[n - 1], g);
      g_orbit.push_back(g);
    }
    if (!entry && g.euclidean_norm() < one) entry = n;
  }
  if (!entry) throw PreconditionError("point is not certified in the basin of G: orbit never enters B");

  ConjugacyTrace trace{p, *entry, {}, false};
  BigReal threshold = BigReal::pow2(-prec.bits() / 2, prec);
  BigComplexPoint previous = p;
  for (std::size_t n = 1; n <= n_max; ++n) {
    BigComplexPoint phi = apply_inverse(composite(H, n), g_orbit[n]);
    BigReal increment = euclidean_distance(phi, previous);
    trace.converged = increment < threshold;
    trace.steps.push_back({n, phi, increment});
    previous = std::move(phi);
  }
  return trace;
}

}  // namespace shortc2
