#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pfe {

// Proleptic Gregorian calendar date. Comparable by serial day number.
struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const CivilDate&) const = default;

  bool valid() const;
  // Days since 1970-01-01 (negative before the epoch).
  int64_t serial() const;
  // 0 = Monday .. 6 = Sunday.
  int weekday() const;
  // 1..4.
  int quarter() const { return (month - 1) / 3 + 1; }
  // ISO "YYYY-MM-DD".
  std::string to_string() const;
};

enum class DateFormat { YMD, MDY };

// Parses "YYYY-MM-DD" (YMD, also accepts '/') or "MM/DD/YYYY" (MDY, also
// accepts '-'). Returns nullopt on malformed or out-of-range dates.
std::optional<CivilDate> parse_date(std::string_view s, DateFormat fmt = DateFormat::YMD);

}  // namespace pfe
