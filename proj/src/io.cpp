#include "shortc2/io.hpp"

#include <fstream>
#include <sstream>

namespace shortc2 {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

std::string number_text(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  fail(where, "expected a number or a decimal string");
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

std::string child(const std::string& where, const std::string& key) { return where + "." + key; }
std::string child(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

template <typename Parse>
auto guarded(const std::string& where, Parse parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

BigReal json_real(const Json& j, const std::string& where, Precision prec) {
  std::string text = number_text(j, where);
  return guarded(where, [&] { return BigReal::parse(text, prec); });
}

BigComplex json_complex(const Json& j, const std::string& where, Precision prec) {
  if (j.is_array()) {
    if (j.size() != 2) fail(where, "complex number must be [re, im]");
    return {json_real(j[0], child(where, 0), prec), json_real(j[1], child(where, 1), prec)};
  }
  return BigComplex(json_real(j, where, prec));
}

BigComplexPoint json_point(const Json& j, const std::string& where, Precision prec) {
  if (!j.is_array() || j.size() != 2) fail(where, "point must be [z, w]");
  return {json_complex(j[0], child(where, 0), prec), json_complex(j[1], child(where, 1), prec)};
}

Rational json_rational(const Json& j, const std::string& where) {
  std::string text = number_text(j, where);
  return guarded(where, [&] { return parse_rational(text); });
}

std::int64_t json_integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

Polynomial json_polynomial(const Json& j, const std::string& where, Precision prec) {
  if (!j.is_array() || j.empty()) fail(where, "polynomial must be a nonempty coefficient list");
  std::vector<BigComplex> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(json_complex(j[i], child(where, i), prec));
  return guarded(where, [&] { return Polynomial(std::move(c)); });
}

Factor json_factor(const Json& j, const std::string& where, Precision prec) {
  std::string kind = field(j, "kind", where).is_string() ? j["kind"].get<std::string>() : "";
  auto get = [&](const char* key) -> const Json& { return field(j, key, where); };
  auto rational = [&](const char* key) { return json_rational(get(key), child(where, key)); };
  auto integer = [&](const char* key, std::int64_t fallback) {
    return j.contains(key) ? json_integer(j[key], child(where, key)) : fallback;
  };
  auto degree = [&]() {
    std::int64_t d = json_integer(get("d"), child(where, "d"));
    if (d < 1 || d > Polynomial::kMaxDegree) fail(child(where, "d"), "degree out of range");
    return static_cast<int>(d);
  };

  ElementaryMap map;
  if (kind == "shear") {
    map = Shear{json_polynomial(get("phi"), child(where, "phi"), prec), rational("a")};
  } else if (kind == "tau") {
    map = TauPower{rational("a"), integer("power", 1)};
  } else if (kind == "model") {
    map = Model{rational("a"), degree(), integer("E", 1)};
  } else if (kind == "H") {
    map = CalligraphicH{rational("a"), integer("e", 0), degree()};
  } else if (kind == "translation") {
    map = Translation{json_point(get("v"), child(where, "v"), prec)};
  } else if (kind == "affine") {
    map = AffineScale{json_point(get("center"), child(where, "center"), prec),
                      json_real(get("beta"), child(where, "beta"), prec)};
  } else {
    fail(child(where, "kind"), "unknown map kind '" + kind + "'");
  }
  guarded(where, [&] {
    validate(map);
    return 0;
  });
  Factor f{std::move(map), false, {}};
  if (j.contains("inverse")) {
    if (!j["inverse"].is_boolean()) fail(child(where, "inverse"), "expected true or false");
    f.inverted = j["inverse"].get<bool>();
  }
  if (j.contains("label") && j["label"].is_string()) f.label = j["label"].get<std::string>();
  return f;
}

MapWord json_word(const Json& j, const std::string& where, Precision prec) {
  if (j.is_object()) return MapWord(std::vector<Factor>{json_factor(j, where, prec)});
  if (!j.is_array()) fail(where, "map word must be a list of factors");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < j.size(); ++i) factors.push_back(json_factor(j[i], child(where, i), prec));
  return MapWord(std::move(factors));
}

ModelSequence json_sequence(const Json& j, const std::string& where) {
  Rational a = json_rational(field(j, "a", where), child(where, "a"));
  const Json& d = field(j, "d", where);
  if (!d.is_array()) fail(child(where, "d"), "expected a list of degrees");
  std::vector<int> degrees;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::int64_t v = json_integer(d[i], child(child(where, "d"), i));
    if (v < 0 || v > Polynomial::kMaxDegree) fail(child(child(where, "d"), i), "degree out of range");
    degrees.push_back(static_cast<int>(v));
  }
  Extension ext = Extension::RepeatLast;
  if (j.contains("extend")) {
    std::string e = j["extend"].is_string() ? j["extend"].get<std::string>() : "";
    if (e == "none") ext = Extension::None;
    else if (e != "repeat-last") fail(child(where, "extend"), "expected \"repeat-last\" or \"none\"");
  }
  return guarded(where, [&] { return ModelSequence(a, degrees, ext); });
}

OscillationPlan json_plan(const Json& j, const std::string& where) {
  OscillationPlan plan;
  if (j.contains("a")) plan.a = json_rational(j["a"], child(where, "a"));
  if (j.contains("ell0")) plan.ell0 = json_integer(j["ell0"], child(where, "ell0"));
  const Json& stages = field(j, "stages", where);
  if (!stages.is_array()) fail(child(where, "stages"), "expected a list of stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    std::string at = child(child(where, "stages"), i);
    const Json& s = stages[i];
    auto integer = [&](const char* key) { return json_integer(field(s, key, at), child(at, key)); };
    PlanStage stage;
    std::int64_t d = integer("d");
    if (d < 0 || d > Polynomial::kMaxDegree) fail(child(at, "d"), "degree out of range");
    stage.d = static_cast<int>(d);
    stage.n = integer("n");
    stage.N = integer("N");
    stage.q = integer("q");
    stage.R = json_rational(field(s, "R", at), child(at, "R"));
    stage.ell = integer("ell");
    plan.stages.push_back(stage);
  }
  return plan;
}

AttractingSystem json_system(const Json& j, Precision prec, const std::string& where) {
  AttractingSystem sys;
  const Json& maps = field(j, "maps", where);
  if (!maps.is_array() || maps.empty()) fail(child(where, "maps"), "expected a nonempty list of map words");
  for (std::size_t i = 0; i < maps.size(); ++i) sys.maps.push_back(json_word(maps[i], child(child(where, "maps"), i), prec));

  const Json& r = field(j, "r", where);
  std::string rw = child(where, "r");
  if (r.is_array()) {
    if (r.empty()) fail(rw, "radius list is empty");
    for (std::size_t i = 0; i < r.size(); ++i) sys.r.listed.push_back(json_real(r[i], child(rw, i), prec));
    if (j.contains("r_ratio")) sys.r.ratio = json_real(j["r_ratio"], child(where, "r_ratio"), prec);
  } else if (r.is_object()) {
    sys.r = RadiusSchedule::geometric(json_real(field(r, "start", rw), child(rw, "start"), prec),
                                      json_real(field(r, "ratio", rw), child(rw, "ratio"), prec));
  } else {
    fail(rw, "expected a list or {\"start\", \"ratio\"}");
  }

  if (j.contains("constants")) {
    const Json& c = j["constants"];
    std::string cw = child(where, "constants");
    if (!c.is_array()) fail(cw, "expected a list of {\"C\", \"mu\"}");
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::string at = child(cw, i);
      sys.constants.push_back(
          {json_real(field(c[i], "C", at), child(at, "C"), prec), json_real(field(c[i], "mu", at), child(at, "mu"), prec)});
    }
  }
  auto count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    std::int64_t v = json_integer(j[key], child(where, key));
    if (v < 0) fail(child(where, key), "must be nonnegative");
    out = static_cast<std::size_t>(v);
  };
  count("horizon", sys.horizon);
  count("samples", sys.samples);
  if (j.contains("seed")) sys.seed = static_cast<std::uint64_t>(json_integer(j["seed"], child(where, "seed")));
  return sys;
}

std::vector<BigComplexPoint> read_points_csv(std::istream& in, Precision prec) {
  std::vector<BigComplexPoint> out;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    bool header = first && cells == std::vector<std::string>{"re_z", "im_z", "re_w", "im_w"};
    first = false;
    if (header) continue;
    std::string where = "line " + std::to_string(number);
    if (cells.size() != 4) throw ConfigError(where + ": expected 4 columns re_z,im_z,re_w,im_w, got " + std::to_string(cells.size()));
    std::vector<BigReal> v;
    for (const auto& c : cells) {
      try {
        v.push_back(BigReal::parse(c, prec));
      } catch (const Error&) {
        throw ConfigError(where + ": not a number: '" + c + "'");
      }
    }
    out.emplace_back(BigComplex(v[0], v[1]), BigComplex(v[2], v[3]));
  }
  return out;
}

}  // namespace shortc2
