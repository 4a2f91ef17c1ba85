#pragma once

// doctest printers so failed comparisons show values.

#include <doctest.h>

#include "shortc2/numerics.hpp"

namespace doctest {

template <>
struct StringMaker<shortc2::BigReal> {
  static String convert(const shortc2::BigReal& x) { return x.to_string(6).c_str(); }
};

template <>
struct StringMaker<shortc2::BigComplex> {
  static String convert(const shortc2::BigComplex& x) { return x.to_string(6).c_str(); }
};

}  // namespace doctest
