#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace eiv {

/// Reports carry 10 significant digits.
inline constexpr int kReportDigits = 10;

inline std::string format_number(double v, int digits = kReportDigits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// The double nearest to v rounded to `digits` significant digits; a JSON
/// writer emitting shortest round-trip text then prints at most that many.
inline double round_sig(double v, int digits = kReportDigits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  return std::strtod(format_number(v, digits).c_str(), nullptr);
}

}  // namespace eiv
