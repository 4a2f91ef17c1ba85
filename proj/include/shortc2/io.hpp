#pragma once

// JSON and CSV readers for the command-line tools. Numbers may be JSON
// numbers or decimal strings ("0.1", "1/3" where a rational is expected);
// decimal strings are parsed at full working precision. Errors carry the
// path of the offending field ("stages[1].q") or the CSV line number.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shortc2/calibrated.hpp"
#include "shortc2/maps.hpp"
#include "shortc2/oscillation.hpp"
#include "shortc2/shortbasin.hpp"

namespace shortc2 {

using Json = nlohmann::json;

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

Json read_json_file(const std::filesystem::path& path);

BigReal json_real(const Json& j, const std::string& where, Precision prec);
BigComplex json_complex(const Json& j, const std::string& where, Precision prec);
/// [z, w] with each coordinate a real or [re, im].
BigComplexPoint json_point(const Json& j, const std::string& where, Precision prec);
Rational json_rational(const Json& j, const std::string& where);
std::int64_t json_integer(const Json& j, const std::string& where);
/// Coefficients, lowest degree first.
Polynomial json_polynomial(const Json& j, const std::string& where, Precision prec);

/// {"kind": "shear"|"tau"|"model"|"H"|"translation"|"affine", ...,
///  "inverse": false, "label": ""}
Factor json_factor(const Json& j, const std::string& where, Precision prec);
/// Array of factors, outermost first.
MapWord json_word(const Json& j, const std::string& where, Precision prec);

/// {"a": "1/2", "d": [2, 3], "extend": "repeat-last" | "none"}
ModelSequence json_sequence(const Json& j, const std::string& where = "sequence");
/// {"a": "1/2", "ell0": 1, "stages": [{"d", "n", "N", "q", "R", "ell"}]}
OscillationPlan json_plan(const Json& j, const std::string& where = "plan");
/// {"maps": [word, ...], "r": [...] | {"start", "ratio"}, "constants": [{"C", "mu"}],
///  "horizon", "samples", "seed"}
AttractingSystem json_system(const Json& j, Precision prec, const std::string& where = "system");

/// Rows of re_z,im_z,re_w,im_w; blank lines and a leading header row with
/// exactly those names are skipped.
std::vector<BigComplexPoint> read_points_csv(std::istream& in, Precision prec);

}  // namespace shortc2
