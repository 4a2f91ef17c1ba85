#include "shortc2/verify.hpp"

#include <algorithm>

#include "shortc2/equivalence.hpp"
#include "shortc2/sampling.hpp"

namespace shortc2 {

BigReal identity_tolerance(Precision prec) { return BigReal::pow2(16 - prec.bits(), prec); }

Json log2_or_null(const BigReal& x) {
  if (x.is_zero()) return nullptr;
  return log2(abs(x)).to_double();
}

namespace {

std::vector<BigComplexPoint> ball_points(std::size_t count, std::uint64_t seed, const BigComplexPoint& center,
                                         const BigReal& radius) {
  Precision prec = center.precision();
  Sampler sampler(seed);
  std::vector<BigComplexPoint> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(center + radius * Sampler::to_point(sampler.ball(), prec));
  return out;
}

Json header(const char* target, const SuiteOptions& opts) {
  return {{"target", target}, {"seed", opts.seed}, {"precision", opts.prec.bits()}, {"points", opts.points}};
}

std::string text(const BigReal& x) { return x.to_string(6); }

}  // namespace

Json verify_bilbo(const std::vector<Polynomial>& fs, const Rational& a, std::int64_t j_max, const SuiteOptions& opts) {
  if (j_max < 1) throw PreconditionError("j_max must be at least 1");
  Precision prec = opts.prec;
  BigReal tol = identity_tolerance(prec);
  auto pts = ball_points(opts.points, opts.seed, BigComplexPoint(prec), BigReal(1L, prec));
  Json report = header("bilbo", opts);
  report["tolerance_log2"] = 16 - prec.bits();
  report["cases"] = Json::array();
  BigReal worst(prec);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::int64_t j = 1; j <= j_max; ++j) {
      InverseIterateWords words = factor_inverse_iterate(fs[i], a, j, prec);
      MapWord direct = MapWord::repeated(Shear{fs[i], a}, static_cast<std::size_t>(j)).inverse();
      BigReal tilde = max_identity_residual(words.tilde_form, direct, pts, opts.workers);
      BigReal hat = max_identity_residual(words.hat_form, direct, pts, opts.workers);
      worst = max(worst, max(tilde, hat));
      report["cases"].push_back({{"f", i}, {"j", j}, {"tilde_residual_log2", log2_or_null(tilde)},
                                 {"hat_residual_log2", log2_or_null(hat)}});
    }
  }
  report["max_residual"] = text(worst);
  report["max_residual_log2"] = log2_or_null(worst);
  report["passed"] = worst <= tol;
  return report;
}

Json verify_gandalf(const GandalfInput& input, const SuiteOptions& opts) {
  Precision prec = opts.prec;
  Json report = header("gandalf", opts);
  report["tolerance_log2"] = 16 - prec.bits();
  report["violations"] = Json::array();
  for (const auto& v : validate_plan(input.plan))
    report["violations"].push_back({{"condition", v.condition}, {"stage", v.stage}, {"message", v.message}});
  if (!report["violations"].empty()) {
    report["passed"] = false;
    return report;
  }

  const Rational& a = input.plan.a;
  BigReal tol = identity_tolerance(prec);
  BigReal minus_a2 = -(to_big(a, prec) * to_big(a, prec));
  bool passed = true;
  report["transitions"] = Json::array();
  for (std::size_t k = 0; k + 1 <= input.plan.size(); ++k) {
    PlanStage st = input.plan.stage(k);
    std::int64_t ell = input.plan.detour(k).value_or(1);
    TransitionOrbit orbit = consistent_orbit(input.f, a, st.N - st.n, ell, input.P_n, input.Q0);
    TransitionFactorization tf = factor_transition(input.plan, k, input.f, orbit, prec);
    auto pts = ball_points(opts.points, opts.seed + k, orbit.P_N, plan_beta(input.plan, st.N, prec));

    BigReal word = max_identity_residual(tf.word, tf.target, pts, opts.workers);
    BigReal shear = max_identity_residual(tf.shear_word(), tf.target, pts, opts.workers);
    BigReal conj = max_identity_residual(tf.conjugated_word(), tf.target, pts, opts.workers);

    BigReal threading(prec);
    for (std::size_t n = 1; n <= tf.conjugated.size(); ++n)
      threading = max(threading, relative_error(shortc2::apply(ElementaryMap(tf.conjugated[n - 1]), tf.T[n - 1]), tf.T[n]));

    BigReal structural(prec);
    BigReal determinant(prec);
    std::size_t factor_count = 0;
    for (const MapWord& w : {tf.shear_word(), tf.conjugated_word()}) {
      for (const Factor& f : w.factors()) {
        ++factor_count;
        if (!has_shear_kind(f.map)) structural = max(structural, BigReal(1L, prec));
        structural = max(structural, shear_form_residual(f, a, 16, opts.seed + factor_count, prec));
        for (std::size_t i = 0; i < 8; ++i) {
          BigComplex det = differential(f, pts[i % pts.size()]).determinant();
          determinant = max(determinant, relative_error(det, BigComplex(minus_a2)));
        }
      }
    }
    bool ok = word <= tol && shear <= tol && conj <= tol && threading <= tol && structural <= tol && determinant <= tol;
    passed = passed && ok;
    report["transitions"].push_back({{"stage", k},
                                     {"tau_middle", tf.tau_middle},
                                     {"tau_detour", tf.tau_detour},
                                     {"shears", tf.shears.size()},
                                     {"word_residual_log2", log2_or_null(word)},
                                     {"shear_word_residual_log2", log2_or_null(shear)},
                                     {"conjugated_residual_log2", log2_or_null(conj)},
                                     {"threading_residual_log2", log2_or_null(threading)},
                                     {"structural_residual_log2", log2_or_null(structural)},
                                     {"determinant_residual_log2", log2_or_null(determinant)},
                                     {"passed", ok}});
  }
  report["passed"] = passed;
  return report;
}

Json verify_model_split(const Rational& a, int d, std::int64_t D, const SuiteOptions& opts) {
  Precision prec = opts.prec;
  MapWord split = factor_model_split(a, d, D);
  auto pts = ball_points(opts.points, opts.seed, BigComplexPoint(prec), BigReal(1L, prec));
  BigReal r = max_identity_residual(split, MapWord{Model{a, d, D}}, pts, opts.workers);
  Json report = header("model-split", opts);
  report["tolerance_log2"] = 16 - prec.bits();
  report["a"] = to_string(a);
  report["d"] = d;
  report["D"] = D;
  report["max_residual_log2"] = log2_or_null(r);
  report["passed"] = r <= identity_tolerance(prec);
  return report;
}

Json verify_theta(const ModelSequence& seq, std::size_t k_max, const SuiteOptions& opts) {
  Precision prec = opts.prec;
  std::vector<MapWord> exact, perturbed;
  for (std::size_t k = 1; k <= k_max; ++k) {
    exact.push_back(MapWord{seq.level(k)});
    BigReal shift = seq.eta(k, prec);
    shift.scale2(-1);
    BigComplexPoint v{BigComplex(shift), BigComplex(prec)};
    perturbed.push_back(MapWord{Translation{v}, seq.level(k)});
  }
  auto ws = ball_points(opts.points, opts.seed, BigComplexPoint(prec), BigReal(1L, prec));
  BigReal bound(3L, prec);
  Json report = header("theta", opts);
  report["k_max"] = k_max;
  report["bound"] = 3;
  bool passed = true;
  for (auto [name, G] : {std::pair{"exact", &exact}, std::pair{"perturbed", &perturbed}}) {
    ThetaReport t = theta_recursion_check(seq, *G, ws, k_max, 200, opts.seed + 1);
    Json levels = Json::array();
    for (const auto& m : t.level_max) levels.push_back(m.to_double());
    report[name] = {{"max_ratio", t.max_ratio.to_double()}, {"level_max", levels}};
    passed = passed && t.max_ratio <= bound;
  }
  report["passed"] = passed;
  return report;
}

Json verify_schedule(const ModelSequence& seq, std::size_t levels, const BigReal& perturbation,
                     const SuiteOptions& opts) {
  Precision prec = opts.prec;
  std::vector<MapWord> H;
  for (std::size_t n = 1; n <= levels; ++n) H.push_back(MapWord{seq.level(n)});
  ScheduleOptions so;
  so.seed = opts.seed;
  so.workers = opts.workers;
  EpsilonSchedule schedule = epsilon_schedule(H, levels, prec, so);

  std::vector<BigReal> c;
  std::int64_t finest = 0;
  for (const auto& lv : schedule.levels) {
    c.push_back(min(perturbation.rounded(prec), lv.epsilon));
    finest = std::max(finest, -c.back().exponent());
  }
  // The conjugacy has to resolve c_n next to points of size about 1.
  Precision wide = prec.widened(static_cast<int>(std::max<std::int64_t>(finest, 0)));

  std::vector<MapWord> Hw, G;
  for (std::size_t n = 1; n <= levels; ++n) {
    Hw.push_back(MapWord{seq.level(n)});
    BigComplexPoint v{BigComplex(c[n - 1].rounded(wide)), BigComplex(wide)};
    G.push_back(MapWord{Translation{v}, seq.level(n)});
  }

  auto pts = ball_points(opts.points, opts.seed, BigComplexPoint(wide), BigReal(1L, wide));
  BigReal delta_tilde = injectivity_margin(wide);
  BigReal worst_ratio(prec);
  BigReal worst_total(prec);
  std::size_t violations = 0;
  for (const auto& p : pts) {
    ConjugacyTrace trace = build_conjugacy(Hw, G, p, levels);
    for (const auto& step : trace.steps) {
      const ScheduleLevel& lv = schedule.levels[step.n - 1];
      BigReal bound = lv.M.constant * lv.N.constant * c[step.n - 1];
      BigReal ratio = step.increment / bound;
      worst_ratio = max(worst_ratio, ratio.rounded(prec));
      if (ratio > BigReal(1L, prec)) ++violations;
    }
    BigReal total = euclidean_distance(trace.steps.back().phi, p);
    worst_total = max(worst_total, total.rounded(prec));
    if (total > delta_tilde) ++violations;
  }

  Json report = header("schedule", opts);
  report["levels"] = Json::array();
  for (std::size_t n = 1; n <= levels; ++n) {
    const ScheduleLevel& lv = schedule.levels[n - 1];
    report["levels"].push_back({{"n", n},
                                {"M", text(lv.M.constant)},
                                {"N", text(lv.N.constant)},
                                {"delta", text(lv.delta)},
                                {"epsilon", text(lv.epsilon)},
                                {"perturbation", text(c[n - 1])},
                                {"M_converged", lv.M.converged},
                                {"N_converged", lv.N.converged}});
  }
  report["conjugacy_precision"] = wide.bits();
  report["max_increment_ratio"] = worst_ratio.to_double();
  report["max_total_displacement"] = text(worst_total);
  report["violations"] = violations;
  report["passed"] = violations == 0;
  return report;
}

}  // namespace shortc2
