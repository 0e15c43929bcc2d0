#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace gqm {

// All documents cap numbers at six fractional digits so that values render
// to a unique byte sequence. This is the single rendering routine used by
// every serializer in the library.
inline std::string format_decimal(double v) {
  if (v == 0.0) {
    return "0";  // normalizes -0
  }
  if (std::fabs(v) < 9.0e12) {
    long long scaled = std::llround(v * 1e6);
    if (scaled == 0) {
      return "0";
    }
    bool negative = scaled < 0;
    unsigned long long magnitude =
        negative ? 0ULL - static_cast<unsigned long long>(scaled)
                 : static_cast<unsigned long long>(scaled);
    unsigned long long whole = magnitude / 1000000ULL;
    unsigned long long frac = magnitude % 1000000ULL;
    std::string out;
    if (negative) {
      out += '-';
    }
    out += std::to_string(whole);
    if (frac != 0) {
      char digits[8];
      std::snprintf(digits, sizeof digits, "%06llu", frac);
      std::string_view fd(digits, 6);
      while (fd.ends_with('0')) {
        fd.remove_suffix(1);
      }
      out += '.';
      out.append(fd);
    }
    return out;
  }
  // Out-of-range magnitudes cannot come from conforming documents; render
  // fixed and strip trailing zeros so the output stays canonical.
  char buf[512];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  std::string s(buf, p);
  if (s.find('.') != std::string::npos) {
    while (s.ends_with('0')) {
      s.pop_back();
    }
    if (s.ends_with('.')) {
      s.pop_back();
    }
  }
  return s;
}

// True when v is exactly representable with at most six fractional digits,
// i.e. rendering and re-parsing reproduces the same double.
inline bool fits_six_places(double v) {
  if (!std::isfinite(v)) {
    return false;
  }
  std::string s = format_decimal(v);
  double back = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
  if (ec != std::errc() || p != s.data() + s.size()) {
    return false;
  }
  return back == v;
}

}  // namespace gqm
