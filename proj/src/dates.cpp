#include "perceptfe/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace pfe {

namespace {

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[m - 1];
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

bool CivilDate::valid() const {
  return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

int64_t CivilDate::serial() const {
  // Howard Hinnant's days-from-civil algorithm.
  int y = year - (month <= 2);
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

int CivilDate::weekday() const {
  // serial() == 0 is 1970-01-01, a Thursday (index 3 with Monday = 0).
  int64_t wd = (serial() + 3) % 7;
  return static_cast<int>(wd < 0 ? wd + 7 : wd);
}

std::string CivilDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<CivilDate> parse_date(std::string_view s, DateFormat fmt) {
  size_t a = s.find_first_of("-/");
  if (a == std::string_view::npos) return std::nullopt;
  size_t b = s.find_first_of("-/", a + 1);
  if (b == std::string_view::npos) return std::nullopt;
  int f1, f2, f3;
  if (!parse_int(s.substr(0, a), f1) || !parse_int(s.substr(a + 1, b - a - 1), f2) ||
      !parse_int(s.substr(b + 1), f3))
    return std::nullopt;
  CivilDate d;
  if (fmt == DateFormat::YMD) {
    d = {f1, f2, f3};
  } else {
    d = {f3, f1, f2};
  }
  if (d.year < 1900 || d.year > 2200 || !d.valid()) return std::nullopt;
  return d;
}

}  // namespace pfe
