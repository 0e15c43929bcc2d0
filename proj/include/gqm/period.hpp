#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace gqm {

enum class Granularity { month, quarter };

inline std::string_view granularity_name(Granularity g) {
  return g == Granularity::month ? "month" : "quarter";
}

inline std::optional<Granularity> granularity_from_name(std::string_view s) {
  if (s == "month") return Granularity::month;
  if (s == "quarter") return Granularity::quarter;
  return std::nullopt;
}

// Fixed-offset designator "+HH:MM" / "-HH:MM", at most +/-14:00, applied to
// every timestamp before bucketing it into a period.
struct PeriodPolicy {
  Granularity granularity = Granularity::month;
  std::int32_t offset_seconds = 0;
  std::string offset_text = "+00:00";

  friend bool operator==(const PeriodPolicy&, const PeriodPolicy&) = default;
};

inline std::optional<std::int32_t> parse_offset_designator(std::string_view s) {
  if (s.size() != 6 || (s[0] != '+' && s[0] != '-') || s[3] != ':') {
    return std::nullopt;
  }
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!digit(s[1]) || !digit(s[2]) || !digit(s[4]) || !digit(s[5])) {
    return std::nullopt;
  }
  int hours = (s[1] - '0') * 10 + (s[2] - '0');
  int minutes = (s[4] - '0') * 10 + (s[5] - '0');
  if (minutes > 59) {
    return std::nullopt;
  }
  std::int32_t total = hours * 3600 + minutes * 60;
  if (total > 14 * 3600) {
    return std::nullopt;
  }
  return s[0] == '-' ? -total : total;
}

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

inline bool is_leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) {
    return 29;
  }
  return kDays[m - 1];
}

}  // namespace detail

// ISO-8601 instant, e.g. "2024-01-31T23:30:00Z" or with a "+HH:MM" offset.
// `canonical` is the same instant normalized to UTC with any fractional
// seconds stripped of trailing zeros.
struct InstantParse {
  bool ok = false;
  std::int64_t epoch = 0;  // seconds since Unix epoch, UTC
  std::string canonical;
  std::string error;
};

inline std::string format_instant_utc(std::int64_t epoch) {
  std::int64_t days = epoch / 86400;
  std::int64_t rem = epoch % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  auto [y, m, d] = detail::civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

inline InstantParse parse_instant(std::string_view s) {
  auto fail = [](std::string msg) {
    InstantParse r;
    r.error = std::move(msg);
    return r;
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  // date-time skeleton: YYYY-MM-DDTHH:MM:SS
  if (s.size() < 20) {
    return fail("timestamp too short");
  }
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u}) {
    if (!digit(s[i])) {
      return fail("malformed timestamp");
    }
  }
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') || s[13] != ':' || s[16] != ':') {
    return fail("malformed timestamp");
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  int year = num(0, 4), month = num(5, 2), day = num(8, 2);
  int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
  if (month < 1 || month > 12) {
    return fail("month out of range");
  }
  if (day < 1 || static_cast<unsigned>(day) > detail::days_in_month(year, static_cast<unsigned>(month))) {
    return fail("day out of range");
  }
  if (hour > 23 || minute > 59 || second > 60) {
    return fail("time out of range");
  }
  if (second == 60) {
    second = 59;  // fold leap seconds
  }
  std::size_t pos = 19;
  std::string frac;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && digit(s[pos])) {
      ++pos;
    }
    if (pos == start || pos - start > 9) {
      return fail("malformed fractional seconds");
    }
    frac = std::string(s.substr(start, pos - start));
    while (!frac.empty() && frac.back() == '0') {
      frac.pop_back();
    }
  }
  std::int32_t offset = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos + 6 <= s.size() && (s[pos] == '+' || s[pos] == '-')) {
    auto parsed = parse_offset_designator(s.substr(pos, 6));
    if (!parsed) {
      return fail("malformed UTC offset");
    }
    offset = *parsed;
    pos += 6;
  } else {
    return fail("missing UTC designator or offset");
  }
  if (pos != s.size()) {
    return fail("trailing characters after timestamp");
  }
  InstantParse r;
  r.ok = true;
  r.epoch = detail::days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) * 86400 +
            hour * 3600 + minute * 60 + second - offset;
  r.canonical = format_instant_utc(r.epoch);
  if (!frac.empty()) {
    r.canonical.insert(r.canonical.size() - 1, "." + frac);
  }
  return r;
}

// Period ids: month granularity "YYYY-MM", quarter granularity "YYYY-Qn".
inline std::string assign_period(std::int64_t epoch, const PeriodPolicy& policy) {
  std::int64_t shifted = epoch + policy.offset_seconds;
  std::int64_t days = shifted / 86400;
  if (shifted % 86400 < 0) {
    days -= 1;
  }
  auto [y, m, d] = detail::civil_from_days(days);
  char buf[16];
  if (policy.granularity == Granularity::month) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u", static_cast<long long>(y), m);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-Q%u", static_cast<long long>(y), (m - 1) / 3 + 1);
  }
  return buf;
}

inline bool period_id_valid(std::string_view id, Granularity g) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (id.size() != 7 || !digit(id[0]) || !digit(id[1]) || !digit(id[2]) || !digit(id[3]) || id[4] != '-') {
    return false;
  }
  if (g == Granularity::month) {
    if (!digit(id[5]) || !digit(id[6])) {
      return false;
    }
    int m = (id[5] - '0') * 10 + (id[6] - '0');
    return m >= 1 && m <= 12;
  }
  return id[5] == 'Q' && id[6] >= '1' && id[6] <= '4';
}

// First instant after the period, in UTC. Used as the deterministic
// evidence cut-off timestamp of a measurement run.
inline std::int64_t period_end_epoch(std::string_view period_id, const PeriodPolicy& policy) {
  std::int64_t year = (period_id[0] - '0') * 1000 + (period_id[1] - '0') * 100 +
                      (period_id[2] - '0') * 10 + (period_id[3] - '0');
  unsigned month_after;
  std::int64_t year_after = year;
  if (policy.granularity == Granularity::month) {
    unsigned m = static_cast<unsigned>((period_id[5] - '0') * 10 + (period_id[6] - '0'));
    month_after = m + 1;
  } else {
    unsigned q = static_cast<unsigned>(period_id[6] - '0');
    month_after = q * 3 + 1;
  }
  if (month_after > 12) {
    month_after -= 12;
    year_after += 1;
  }
  return detail::days_from_civil(year_after, month_after, 1) * 86400 - policy.offset_seconds;
}

}  // namespace gqm
