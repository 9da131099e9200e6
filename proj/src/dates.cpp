#include "polichange/dates.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "polichange/errors.hpp"

namespace polichange {

namespace {

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[static_cast<std::size_t>(month - 1)];
}

// Reads 1..max_digits decimal digits, advancing pos. Returns -1 on failure.
int read_int(std::string_view s, std::size_t& pos, int min_digits, int max_digits) {
  int value = 0;
  int digits = 0;
  while (pos < s.size() && digits < max_digits &&
         std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + (s[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits < min_digits) return -1;
  return value;
}

}  // namespace

bool is_valid_date(int year, int month, int day) {
  if (year < 1 || month < 1 || month > 12 || day < 1) return false;
  return day <= days_in_month(year, month);
}

YearMonth add_months(YearMonth ym, int n) {
  const int idx = month_index(ym) + n;
  // floor division keeps months valid for negative indices too
  int year = idx / 12;
  int month = idx % 12;
  if (month < 0) {
    month += 12;
    --year;
  }
  return {year, month + 1};
}

MonthSpan make_span(YearMonth first, YearMonth last) {
  if (last < first) throw ArgumentError("month span ends before it starts");
  return {first, last};
}

std::optional<MonthSpan> intersect(const MonthSpan& a, const MonthSpan& b) {
  const YearMonth first = a.first < b.first ? b.first : a.first;
  const YearMonth last = a.last < b.last ? a.last : b.last;
  if (last < first) return std::nullopt;
  return MonthSpan{first, last};
}

std::optional<ParsedTimestamp> parse_timestamp(std::string_view input, std::string_view format) {
  int year = -1, month = -1, day = -1;
  int hour = -1, minute = -1, second = -1;
  bool twelve_hour = false;
  int pm = -1;  // 0 = AM, 1 = PM

  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] != '%') {
      if (pos >= input.size() || input[pos] != format[f]) return std::nullopt;
      ++pos;
      continue;
    }
    if (++f >= format.size()) return std::nullopt;
    switch (format[f]) {
      case 'Y':
        year = read_int(input, pos, 4, 4);
        if (year < 0) return std::nullopt;
        break;
      case 'm':
        month = read_int(input, pos, 1, 2);
        if (month < 0) return std::nullopt;
        break;
      case 'd':
        day = read_int(input, pos, 1, 2);
        if (day < 0) return std::nullopt;
        break;
      case 'H':
        hour = read_int(input, pos, 1, 2);
        if (hour < 0 || hour > 23) return std::nullopt;
        break;
      case 'I':
        hour = read_int(input, pos, 1, 2);
        if (hour < 1 || hour > 12) return std::nullopt;
        twelve_hour = true;
        break;
      case 'M':
        minute = read_int(input, pos, 1, 2);
        if (minute < 0 || minute > 59) return std::nullopt;
        break;
      case 'S':
        second = read_int(input, pos, 1, 2);
        if (second < 0 || second > 59) return std::nullopt;
        break;
      case 'p': {
        if (pos + 2 > input.size()) return std::nullopt;
        const char a = static_cast<char>(std::toupper(static_cast<unsigned char>(input[pos])));
        const char b = static_cast<char>(std::toupper(static_cast<unsigned char>(input[pos + 1])));
        if (b != 'M' || (a != 'A' && a != 'P')) return std::nullopt;
        pm = a == 'P' ? 1 : 0;
        pos += 2;
        break;
      }
      case '%':
        if (pos >= input.size() || input[pos] != '%') return std::nullopt;
        ++pos;
        break;
      default:
        return std::nullopt;  // unsupported token
    }
  }
  if (pos != input.size()) return std::nullopt;
  if (!is_valid_date(year, month, day)) return std::nullopt;

  ParsedTimestamp out;
  out.date = {year, month, day};
  if (hour >= 0) {
    if (twelve_hour) {
      if (pm < 0) return std::nullopt;  // %I without %p is ambiguous
      hour = hour % 12 + (pm == 1 ? 12 : 0);
    }
    out.seconds_of_day =
        hour * 3600 + (minute >= 0 ? minute * 60 : 0) + (second >= 0 ? second : 0);
  }
  return out;
}

std::string format_year_month(YearMonth ym) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
  return buf;
}

std::optional<YearMonth> parse_year_month(std::string_view text) {
  std::size_t pos = 0;
  const int year = read_int(text, pos, 4, 4);
  if (year < 0 || pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  const int month = read_int(text, pos, 1, 2);
  if (month < 1 || month > 12 || pos != text.size()) return std::nullopt;
  return YearMonth{year, month};
}

}  // namespace polichange
