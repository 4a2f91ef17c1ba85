#include "shortc2/render.hpp"

#include <algorithm>

#include "shortc2/parallel.hpp"

namespace shortc2 {

SliceSpec json_slice(const Json& j, Precision prec, const std::filesystem::path& base) {
  auto need = [&](const char* key) -> const Json& {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("spec: missing field '") + key + "'");
    return j[key];
  };
  std::string plane = need("plane").is_string() ? j["plane"].get<std::string>() : "";
  Plane p = Plane::Z;
  if (plane == "w") p = Plane::W;
  else if (plane == "real") p = Plane::Real;
  else if (plane != "z") throw ConfigError("spec.plane: expected \"z\", \"w\" or \"real\"");

  const Json& center = need("center");
  if (!center.is_array() || center.size() != 2) throw ConfigError("spec.center: expected [x, y]");
  BigComplex fixed(prec);
  if (j.contains("fixed")) fixed = json_complex(j["fixed"], "spec.fixed", prec);

  const Json& res = need("resolution");
  if (!res.is_array() || res.size() != 2) throw ConfigError("spec.resolution: expected [px_w, px_h]");
  std::int64_t px_w = json_integer(res[0], "spec.resolution[0]");
  std::int64_t px_h = json_integer(res[1], "spec.resolution[1]");
  if (px_w < 1 || px_h < 1) throw ConfigError("spec.resolution: must be at least 1x1");

  BigReal width = json_real(need("width"), "spec.width", prec);
  BigReal height = json_real(need("height"), "spec.height", prec);
  if (width.sign() <= 0 || height.sign() <= 0) throw ConfigError("spec: window width and height must be positive");

  std::int64_t depth = j.contains("depth") ? json_integer(j["depth"], "spec.depth") : 25;
  if (depth < 1) throw ConfigError("spec.depth: must be at least 1");

  Json seq;
  if (j.contains("sequence")) {
    seq = j["sequence"];
  } else if (j.contains("sequence_file") && j["sequence_file"].is_string()) {
    std::filesystem::path file = j["sequence_file"].get<std::string>();
    seq = read_json_file(file.is_relative() ? base / file : file);
  } else {
    throw ConfigError("spec: needs \"sequence\" or \"sequence_file\"");
  }
  ModelSequence sequence = json_sequence(seq, "spec.sequence");
  if (!sequence.has_level(static_cast<std::size_t>(depth)))
    throw ConfigError("spec.depth: sequence has fewer than " + std::to_string(depth) + " levels");

  return SliceSpec{p,
                   json_real(center[0], "spec.center[0]", prec),
                   json_real(center[1], "spec.center[1]", prec),
                   std::move(fixed),
                   std::move(width),
                   std::move(height),
                   static_cast<std::size_t>(px_w),
                   static_cast<std::size_t>(px_h),
                   std::move(sequence),
                   static_cast<std::size_t>(depth)};
}

BigComplexPoint pixel_point(const SliceSpec& spec, std::size_t i, std::size_t j) {
  Precision prec = spec.center_x.precision();
  BigReal half(0.5, prec);
  BigReal x = spec.center_x - spec.width * half +
              (BigReal(static_cast<long>(i), prec) + half) * spec.width / BigReal(static_cast<long>(spec.px_w), prec);
  BigReal y = spec.center_y + spec.height * half -
              (BigReal(static_cast<long>(j), prec) + half) * spec.height / BigReal(static_cast<long>(spec.px_h), prec);
  switch (spec.plane) {
    case Plane::Z: return {BigComplex(std::move(x), std::move(y)), spec.fixed};
    case Plane::W: return {spec.fixed, BigComplex(std::move(x), std::move(y))};
    case Plane::Real: return {BigComplex(std::move(x)), BigComplex(std::move(y))};
  }
  return BigComplexPoint(prec);
}

Rgb verdict_color(const BasinCertificate& cert) {
  auto shade = [&] { return static_cast<std::uint8_t>(std::max<std::int64_t>(0, 255 - 8 * static_cast<std::int64_t>(cert.k))); };
  switch (cert.verdict) {
    case Verdict::Inside: return {0, 0, shade()};
    case Verdict::Outside: return {shade(), 0, 0};
    case Verdict::Unknown: break;
  }
  return {128, 128, 128};
}

RenderOutput render_slice(const SliceSpec& spec, unsigned workers) {
  std::size_t count = spec.px_w * spec.px_h;
  std::vector<BasinCertificate> certs(count, BasinCertificate{Verdict::Unknown, 0, std::nullopt, std::nullopt,
                                                              std::nullopt, false});
  parallel_for(count, workers, [&](std::size_t idx) {
    certs[idx] = classify(spec.sequence, pixel_point(spec, idx % spec.px_w, idx / spec.px_w), spec.depth);
  });

  RenderOutput out;
  out.ppm = "P6\n" + std::to_string(spec.px_w) + " " + std::to_string(spec.px_h) + "\n255\n";
  out.ppm.reserve(out.ppm.size() + 3 * count);
  out.csv = "i,j,verdict,k,psi_tilde\n";
  for (std::size_t idx = 0; idx < count; ++idx) {
    const BasinCertificate& c = certs[idx];
    Rgb rgb = verdict_color(c);
    out.ppm.push_back(static_cast<char>(rgb.r));
    out.ppm.push_back(static_cast<char>(rgb.g));
    out.ppm.push_back(static_cast<char>(rgb.b));
    out.csv += std::to_string(idx % spec.px_w) + "," + std::to_string(idx / spec.px_w) + "," + verdict_name(c.verdict) +
               "," + std::to_string(c.k) + "," + (c.psi_tilde ? c.psi_tilde->to_string(12) : "") + "\n";
    if (c.verdict == Verdict::Inside) ++out.inside;
    else if (c.verdict == Verdict::Outside) ++out.outside;
    else ++out.unknown;
  }
  return out;
}

}  // namespace shortc2
