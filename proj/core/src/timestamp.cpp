#include "hpccarbon/timestamp.hpp"

#include <cstdio>
#include <string>

#include "hpccarbon/errors.hpp"

namespace hpccarbon {
namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) {
    return 29;
  }
  return lengths[month - 1];
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = static_cast<int>(y - era * 400);
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = static_cast<int>(z - era * 146097);
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = yoe + era * 400;
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      return false;
    }
  }
  return true;
}

int to_int(std::string_view s) {
  int value = 0;
  for (char c : s) {
    value = value * 10 + (c - '0');
  }
  return value;
}

[[noreturn]] void bad_timestamp(std::string_view text, const std::string& why) {
  throw ValidationError("invalid timestamp \"" + std::string(text) + "\": " + why);
}

void check_date_fields(std::string_view text, int year, int month, int day) {
  if (month < 1 || month > 12) {
    bad_timestamp(text, "month out of range");
  }
  if (day < 1 || day > days_in_month(year, month)) {
    bad_timestamp(text, "day out of range");
  }
}

} // namespace

UtcSeconds parse_rfc3339(std::string_view text) {
  // YYYY-MM-DD T hh:mm:ss (Z | +hh:mm | -hh:mm)
  if (text.size() < 20) {
    bad_timestamp(text, "expected YYYY-MM-DDThh:mm:ss with an explicit offset");
  }
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
      text[13] != ':' || text[16] != ':') {
    bad_timestamp(text, "expected YYYY-MM-DDThh:mm:ss with an explicit offset");
  }
  const std::string_view ys = text.substr(0, 4), mos = text.substr(5, 2),
                         ds = text.substr(8, 2), hs = text.substr(11, 2),
                         mis = text.substr(14, 2), ss = text.substr(17, 2);
  if (!all_digits(ys) || !all_digits(mos) || !all_digits(ds) || !all_digits(hs) ||
      !all_digits(mis) || !all_digits(ss)) {
    bad_timestamp(text, "non-digit in date or time field");
  }
  const int year = to_int(ys), month = to_int(mos), day = to_int(ds);
  const int hour = to_int(hs), minute = to_int(mis), second = to_int(ss);
  check_date_fields(text, year, month, day);
  if (hour > 23 || minute > 59 || second > 59) {
    bad_timestamp(text, "time of day out of range");
  }

  const std::string_view offset = text.substr(19);
  std::int64_t offset_seconds = 0;
  if (offset == "Z" || offset == "z") {
    offset_seconds = 0;
  } else if (offset.size() == 6 && (offset[0] == '+' || offset[0] == '-') &&
             offset[3] == ':' && all_digits(offset.substr(1, 2)) &&
             all_digits(offset.substr(4, 2))) {
    const int oh = to_int(offset.substr(1, 2));
    const int om = to_int(offset.substr(4, 2));
    if (oh > 23 || om > 59) {
      bad_timestamp(text, "UTC offset out of range");
    }
    offset_seconds = std::int64_t(oh) * 3600 + std::int64_t(om) * 60;
    if (offset[0] == '-') {
      offset_seconds = -offset_seconds;
    }
  } else {
    bad_timestamp(text, "offset must be Z or +hh:mm or -hh:mm");
  }

  const std::int64_t days = days_from_civil(year, month, day);
  const std::int64_t local = days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
  return local - offset_seconds;
}

std::string format_rfc3339_utc(UtcSeconds seconds) {
  const std::int64_t days = floor_div(seconds, kSecondsPerDay);
  std::int64_t rem = seconds - days * kSecondsPerDay;
  int y = 0, m = 0, d = 0;
  civil_from_days(days, y, m, d);
  const int hour = static_cast<int>(rem / 3600);
  rem %= 3600;
  const int minute = static_cast<int>(rem / 60);
  const int second = static_cast<int>(rem % 60);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d+00:00", y, m, d,
                hour, minute, second);
  return buf;
}

void check_calendar_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 2)) ||
      !all_digits(text.substr(8, 2))) {
    throw ValidationError("invalid date \"" + std::string(text) +
                          "\": expected YYYY-MM-DD");
  }
  const int year = to_int(text.substr(0, 4));
  const int month = to_int(text.substr(5, 2));
  const int day = to_int(text.substr(8, 2));
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
    throw ValidationError("invalid date \"" + std::string(text) +
                          "\": out of range");
  }
}

std::int64_t floor_div(std::int64_t value, std::int64_t divisor) {
  std::int64_t q = value / divisor;
  if ((value % divisor != 0) && ((value < 0) != (divisor < 0))) {
    --q;
  }
  return q;
}

} // namespace hpccarbon
