#pragma once

#include <fmt/format.h>

#include <cmath>
#include <string>

namespace refugium {

/// Fixed 12-significant-digit rendering used in every report and CSV.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  return fmt::format("{:.12g}", x);
}

}  // namespace refugium
