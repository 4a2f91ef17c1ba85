#pragma once

// Basin slices rendered as PPM (P6) images with a per-pixel CSV sidecar.
//
// Pixel (i, j), i counted from the left and j from the top, samples the
// center of its cell:
//   x = cx - W/2 + (i + 1/2) W / px_w
//   y = cy + H/2 - (j + 1/2) H / px_h
// The z-plane puts z = x + iy at fixed w, the w-plane w = x + iy at fixed z,
// and the real plane (z, w) = (x, y).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shortc2/io.hpp"
#include "shortc2/shortbasin.hpp"

namespace shortc2 {

enum class Plane { Z, W, Real };

struct SliceSpec {
  Plane plane = Plane::Z;
  BigReal center_x;
  BigReal center_y;
  BigComplex fixed;
  BigReal width;
  BigReal height;
  std::size_t px_w = 1;
  std::size_t px_h = 1;
  ModelSequence sequence;
  std::size_t depth = 25;
};

/// {"plane": "z" | "w" | "real", "center": [x, y], "fixed": c, "width", "height",
///  "resolution": [px_w, px_h], "sequence": {...} | "sequence_file": path, "depth"}.
/// A relative sequence_file is resolved against `base`.
SliceSpec json_slice(const Json& j, Precision prec, const std::filesystem::path& base = {});

BigComplexPoint pixel_point(const SliceSpec& spec, std::size_t i, std::size_t j);

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Inside(k): blue 255 - 8k, Outside(k): red 255 - 8k (both clamped at 0),
/// Unknown: gray 128.
Rgb verdict_color(const BasinCertificate& cert);

struct RenderOutput {
  std::string ppm;
  std::string csv;
  std::size_t inside = 0;
  std::size_t outside = 0;
  std::size_t unknown = 0;
};

/// Classifies every pixel; the output bytes do not depend on `workers`.
RenderOutput render_slice(const SliceSpec& spec, unsigned workers = 1);

}  // namespace shortc2
