#include "shortc2/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>

#include "shortc2/calibrated.hpp"
#include "shortc2/io.hpp"
#include "shortc2/render.hpp"
#include "shortc2/verify.hpp"

namespace shortc2 {

namespace {

Precision precision_from_env() {
  const char* env = std::getenv("SHORTC2_PRECISION");
  if (env == nullptr || *env == '\0') return Precision::standard();
  std::string text(env);
  int bits = 0;
  try {
    std::size_t used = 0;
    bits = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ConfigError("SHORTC2_PRECISION: not an integer: '" + text + "'");
  }
  try {
    return Precision::bits(bits);
  } catch (const Error& e) {
    throw ConfigError(std::string("SHORTC2_PRECISION: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError(path + ": cannot open for writing");
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw ConfigError(path + ": write failed");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  return in;
}

std::string num(const BigReal& x) { return x.to_string(17); }

std::string point_cells(const BigComplexPoint& p) {
  return num(p.z.re) + "," + num(p.z.im) + "," + num(p.w.re) + "," + num(p.w.im);
}

SuiteOptions suite_options(const Json& config, Precision prec, unsigned threads, std::optional<std::uint64_t> seed) {
  SuiteOptions opts;
  opts.prec = prec;
  opts.workers = threads;
  if (config.contains("seed")) opts.seed = static_cast<std::uint64_t>(json_integer(config["seed"], "config.seed"));
  if (seed) opts.seed = *seed;
  if (config.contains("points")) {
    std::int64_t n = json_integer(config["points"], "config.points");
    if (n < 1) throw ConfigError("config.points: must be at least 1");
    opts.points = static_cast<std::size_t>(n);
  }
  return opts;
}

std::vector<Polynomial> bilbo_polynomials(const Json& config, Precision prec) {
  std::vector<Polynomial> fs;
  if (config.contains("fs")) {
    const Json& list = config["fs"];
    if (!list.is_array() || list.empty()) throw ConfigError("config.fs: expected a nonempty list of polynomials");
    for (std::size_t i = 0; i < list.size(); ++i)
      fs.push_back(json_polynomial(list[i], "config.fs[" + std::to_string(i) + "]", prec));
  } else if (config.contains("f")) {
    fs.push_back(json_polynomial(config["f"], "config.f", prec));
  } else {
    throw ConfigError("config: needs \"f\" or \"fs\"");
  }
  return fs;
}

Json run_suite(const std::string& target, const Json& config, const std::filesystem::path& base,
               const SuiteOptions& opts) {
  Precision prec = opts.prec;
  auto rational_or = [&](const char* key, Rational fallback) {
    return config.contains(key) ? json_rational(config[key], std::string("config.") + key) : fallback;
  };
  auto integer_or = [&](const char* key, std::int64_t fallback) {
    return config.contains(key) ? json_integer(config[key], std::string("config.") + key) : fallback;
  };
  auto sequence = [&] {
    if (!config.contains("sequence")) throw ConfigError("config: missing field 'sequence'");
    return json_sequence(config["sequence"], "config.sequence");
  };

  if (target == "bilbo") {
    std::int64_t j_max = integer_or("j_max", 4);
    if (j_max < 1) throw ConfigError("config.j_max: must be at least 1");
    return verify_bilbo(bilbo_polynomials(config, prec), rational_or("a", Rational(1, 2)), j_max, opts);
  }
  if (target == "gandalf") {
    Json plan_json;
    if (config.contains("plan")) {
      plan_json = config["plan"];
    } else if (config.contains("plan_file") && config["plan_file"].is_string()) {
      std::filesystem::path file = config["plan_file"].get<std::string>();
      plan_json = read_json_file(file.is_relative() ? base / file : file);
    } else {
      throw ConfigError("config: needs \"plan\" or \"plan_file\"");
    }
    GandalfInput input{
        json_plan(plan_json),
        config.contains("f") ? json_polynomial(config["f"], "config.f", prec)
                             : Polynomial({BigComplex(prec), BigComplex(1, 0, prec), BigComplex(prec),
                                           BigComplex(BigReal::parse("0.3", prec))}),
        config.contains("P_n") ? json_point(config["P_n"], "config.P_n", prec)
                               : BigComplexPoint(BigComplex(BigReal::parse("0.2", prec), BigReal::parse("0.1", prec)),
                                                 BigComplex(BigReal::parse("-0.3", prec), BigReal::parse("0.05", prec))),
        config.contains("Q0") ? json_point(config["Q0"], "config.Q0", prec)
                              : BigComplexPoint(BigComplex(BigReal::parse("0.4", prec), BigReal::parse("-0.2", prec)),
                                                BigComplex(BigReal::parse("0.1", prec), BigReal::parse("0.3", prec)))};
    return verify_gandalf(input, opts);
  }
  if (target == "model-split") {
    std::int64_t d = integer_or("d", 3);
    if (d < 1 || d > Polynomial::kMaxDegree) throw ConfigError("config.d: degree out of range");
    return verify_model_split(rational_or("a", Rational(1, 2)), static_cast<int>(d), integer_or("D", 9), opts);
  }
  if (target == "theta") {
    std::int64_t k_max = integer_or("k_max", 12);
    if (k_max < 1) throw ConfigError("config.k_max: must be at least 1");
    return verify_theta(sequence(), static_cast<std::size_t>(k_max), opts);
  }
  if (target == "schedule") {
    std::int64_t levels = integer_or("levels", 5);
    if (levels < 1) throw ConfigError("config.levels: must be at least 1");
    BigReal perturbation = config.contains("perturbation") ? json_real(config["perturbation"], "config.perturbation", prec)
                                                           : BigReal::parse("1e-9", prec);
    return verify_schedule(sequence(), static_cast<std::size_t>(levels), perturbation, opts);
  }
  throw ConfigError("unknown verify target '" + target + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Short C^2 basin toolkit", "shortc2"};
  app.require_subcommand(1);

  std::string spec_path, out_path, csv_path, target, config_path, points_path, seq_path, plan_path, system_path;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::size_t depth = 25;

  auto* render = app.add_subcommand("render", "Render a basin slice to PPM with a CSV sidecar");
  render->add_option("--spec", spec_path, "Slice spec JSON")->required();
  render->add_option("--out", out_path, "Output PPM path")->required();
  render->add_option("--csv", csv_path, "Per-pixel CSV path");
  render->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1U, 1024U));
  render->add_option("--seed", seed, "Seed (rendering is deterministic and does not sample)");

  auto* verify = app.add_subcommand("verify", "Run an identity or property suite");
  verify->add_option("--target", target, "bilbo, gandalf, model-split, theta or schedule")
      ->required()
      ->check(CLI::IsMember({"bilbo", "gandalf", "model-split", "theta", "schedule"}));
  verify->add_option("--config", config_path, "Suite config JSON")->required();
  verify->add_option("--out", out_path, "Also write the JSON report here");
  verify->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1U, 1024U));
  auto* verify_seed = verify->add_option("--seed", seed, "Override the config seed");

  auto* classify_cmd = app.add_subcommand("classify", "Classify points against a model sequence");
  classify_cmd->add_option("--points", points_path, "CSV of re_z,im_z,re_w,im_w")->required();
  classify_cmd->add_option("--seq", seq_path, "Sequence JSON")->required();
  classify_cmd->add_option("--depth", depth, "Classification depth K_max")->check(CLI::Range(1, 1 << 20));
  classify_cmd->add_option("--out", out_path, "Write the CSV here instead of stdout");

  auto* plan = app.add_subcommand("plan", "Oscillation plan tools");
  plan->require_subcommand(1);
  auto* validate = plan->add_subcommand("validate", "Check a plan against every stage condition");
  validate->add_option("--plan", plan_path, "Plan JSON")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Choose iterates for a calibrated basin");
  calibrate->add_option("--system", system_path, "System JSON")->required();
  auto* calibrate_depth = calibrate->add_option("--depth", depth, "Stages to calibrate")->check(CLI::Range(1, 1 << 16));
  calibrate_depth->required();
  calibrate->add_option("--points", points_path, "CSV of points to test for membership");
  calibrate->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1U, 1024U));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    Precision prec = precision_from_env();

    if (render->parsed()) {
      std::filesystem::path spec_file(spec_path);
      SliceSpec spec = json_slice(read_json_file(spec_file), prec, spec_file.parent_path());
      RenderOutput result = render_slice(spec, threads);
      write_file(out_path, result.ppm);
      if (!csv_path.empty()) write_file(csv_path, result.csv);
      out << "inside " << result.inside << ", outside " << result.outside << ", unknown " << result.unknown << "\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      std::filesystem::path config_file(config_path);
      Json config = read_json_file(config_file);
      if (!config.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
      std::optional<std::uint64_t> seed_override;
      if (verify_seed->count() > 0) seed_override = seed;
      SuiteOptions opts = suite_options(config, prec, threads, seed_override);
      Json report = run_suite(target, config, config_file.parent_path(), opts);
      std::string text = report.dump(2) + "\n";
      out << text;
      if (!out_path.empty()) write_file(out_path, text);
      if (report.contains("violations") && report["violations"].is_array())
        for (const auto& v : report["violations"])
          err << "violation " << v["condition"].get<std::string>() << " at stage " << v["stage"].get<std::size_t>()
              << ": " << v["message"].get<std::string>() << "\n";
      return report["passed"].get<bool>() ? kExitOk : kExitFailure;
    }

    if (classify_cmd->parsed()) {
      ModelSequence seq = json_sequence(read_json_file(seq_path));
      if (!seq.has_level(depth)) throw ConfigError(seq_path + ": sequence has fewer than " + std::to_string(depth) + " levels");
      std::ifstream in = open_input(points_path);
      std::vector<BigComplexPoint> points;
      try {
        points = read_points_csv(in, prec);
      } catch (const ConfigError& e) {
        throw ConfigError(points_path + ": " + e.what());
      }
      std::string csv = "re_z,im_z,re_w,im_w,verdict,k,psi_tilde\n";
      for (const auto& p : points) {
        BasinCertificate c = classify(seq, p, depth);
        csv += point_cells(p) + "," + verdict_name(c.verdict) + "," + std::to_string(c.k) + "," +
               (c.psi_tilde ? c.psi_tilde->to_string(12) : "") + "\n";
      }
      if (out_path.empty()) out << csv;
      else write_file(out_path, csv);
      return kExitOk;
    }

    if (validate->parsed()) {
      OscillationPlan p = json_plan(read_json_file(plan_path));
      Json report = {{"valid", true}, {"violations", Json::array()}};
      for (const auto& v : validate_plan(p)) {
        report["valid"] = false;
        report["violations"].push_back({{"condition", v.condition}, {"stage", v.stage}, {"message", v.message}});
      }
      out << report.dump(2) << "\n";
      return report["valid"].get<bool>() ? kExitOk : kExitFailure;
    }

    if (calibrate->parsed()) {
      AttractingSystem system = json_system(read_json_file(system_path), prec);
      CalibratedBasin basin = choose_iterates(system, depth, prec);
      if (points_path.empty()) {
        out << "j,r_j,C_j,mu_j,n_j\n";
        for (std::size_t j = 0; j < basin.depth(); ++j)
          out << j << "," << num(basin.r[j]) << "," << num(basin.constants[j].C) << "," << num(basin.constants[j].mu)
              << "," << basin.n[j] << "\n";
        return kExitOk;
      }
      std::ifstream in = open_input(points_path);
      std::vector<BigComplexPoint> points;
      try {
        points = read_points_csv(in, prec);
      } catch (const ConfigError& e) {
        throw ConfigError(points_path + ": " + e.what());
      }
      std::vector<Membership> members = calibrated_membership(basin, points, depth, threads);
      out << "re_z,im_z,re_w,im_w,verdict,j,G_j\n";
      for (std::size_t i = 0; i < points.size(); ++i) {
        std::size_t j = std::min(members[i].j, basin.depth() - 1);
        std::optional<BigReal> g = appendix_potential(basin, points[i], j);
        out << point_cells(points[i]) << "," << (members[i].inside ? "Inside" : "Unknown") << "," << members[i].j << ","
            << (g ? g->to_string(12) : "-inf") << "\n";
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace shortc2
