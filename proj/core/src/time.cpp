#include "twcrawl/time.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <vector>

namespace twcrawl {
namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                       "Thu", "Fri", "Sat"};
constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

struct Civil {
  year_month_day ymd;
  weekday wd;
  int hour, minute, second, millis;
};

Civil to_civil(Timestamp t) {
  const sys_days day = floor<days>(t);
  const hh_mm_ss<Millis> hms{t - day};
  return {year_month_day{day}, weekday{day}, static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()),
          static_cast<int>(hms.subseconds().count())};
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<Timestamp> assemble(int y, unsigned mo, unsigned d, int h, int mi, int s, int ms) {
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60 || ms < 0 ||
      ms > 999) {
    return std::nullopt;
  }
  return time_point_cast<Millis>(sys_days{ymd} + hours{h} + minutes{mi} + seconds{s}) + Millis{ms};
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string format_api_time(Timestamp t) {
  const Civil c = to_civil(t);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %s %02u %02d:%02d:%02d +0000 %04d",
                kWeekdays[c.wd.c_encoding()].data(),
                kMonths[static_cast<unsigned>(c.ymd.month()) - 1].data(),
                static_cast<unsigned>(c.ymd.day()), c.hour, c.minute, c.second,
                static_cast<int>(c.ymd.year()));
  return buf;
}

std::optional<Timestamp> parse_api_time(std::string_view s) {
  const auto parts = split_spaces(s);
  if (parts.size() != 6) return std::nullopt;
  unsigned mo = 0;
  for (unsigned i = 0; i < kMonths.size(); ++i) {
    if (parts[1] == kMonths[i]) mo = i + 1;
  }
  if (mo == 0) return std::nullopt;
  unsigned d = 0;
  int y = 0;
  if (!parse_int(parts[2], d) || !parse_int(parts[5], y)) return std::nullopt;
  const std::string_view hms = parts[3];
  if (hms.size() != 8 || hms[2] != ':' || hms[5] != ':') return std::nullopt;
  int h = 0, mi = 0, sec = 0;
  if (!parse_int(hms.substr(0, 2), h) || !parse_int(hms.substr(3, 2), mi) ||
      !parse_int(hms.substr(6, 2), sec)) {
    return std::nullopt;
  }
  const std::string_view off = parts[4];
  if (off.size() != 5 || (off[0] != '+' && off[0] != '-')) return std::nullopt;
  int oh = 0, om = 0;
  if (!parse_int(off.substr(1, 2), oh) || !parse_int(off.substr(3, 2), om)) return std::nullopt;
  auto t = assemble(y, mo, d, h, mi, sec, 0);
  if (!t) return std::nullopt;
  const auto offset = hours{oh} + minutes{om};
  return off[0] == '+' ? *t - offset : *t + offset;
}

std::string format_iso8601(Timestamp t) {
  const Civil c = to_civil(t);
  char buf[64];
  if (c.millis != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(c.ymd.year()), static_cast<unsigned>(c.ymd.month()),
                  static_cast<unsigned>(c.ymd.day()), c.hour, c.minute, c.second, c.millis);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(c.ymd.year()), static_cast<unsigned>(c.ymd.month()),
                  static_cast<unsigned>(c.ymd.day()), c.hour, c.minute, c.second);
  }
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  if (s.size() < 20 || s.back() != 'Z' || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
      s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  int y = 0, h = 0, mi = 0, sec = 0, ms = 0;
  unsigned mo = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
      !parse_int(s.substr(8, 2), d) || !parse_int(s.substr(11, 2), h) ||
      !parse_int(s.substr(14, 2), mi) || !parse_int(s.substr(17, 2), sec)) {
    return std::nullopt;
  }
  const std::string_view frac = s.substr(19, s.size() - 20);
  if (!frac.empty()) {
    if (frac.size() != 4 || frac[0] != '.' || !parse_int(frac.substr(1), ms)) return std::nullopt;
  }
  return assemble(y, mo, d, h, mi, sec, ms);
}

}  // namespace twcrawl
