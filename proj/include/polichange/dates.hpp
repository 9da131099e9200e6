#ifndef POLICHANGE_DATES_HPP
#define POLICHANGE_DATES_HPP

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace polichange {

struct CivilDate {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31
  auto operator<=>(const CivilDate&) const = default;
};

bool is_valid_date(int year, int month, int day);

// Calendar month, the time axis of every series in this library.
struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12
  auto operator<=>(const YearMonth&) const = default;
};

inline int month_index(YearMonth ym) { return ym.year * 12 + (ym.month - 1); }

YearMonth add_months(YearMonth ym, int n);

// Months from a to b; positive when b is later.
inline int months_between(YearMonth a, YearMonth b) { return month_index(b) - month_index(a); }

inline YearMonth year_month_of(const CivilDate& d) { return {d.year, d.month}; }

// Inclusive month range.
struct MonthSpan {
  YearMonth first;
  YearMonth last;
  std::size_t length() const { return static_cast<std::size_t>(months_between(first, last)) + 1; }
  bool contains(YearMonth ym) const { return first <= ym && ym <= last; }
};

// Validates first <= last, throws ArgumentError otherwise.
MonthSpan make_span(YearMonth first, YearMonth last);

// Intersection of two spans, empty optional when disjoint.
std::optional<MonthSpan> intersect(const MonthSpan& a, const MonthSpan& b);

struct ParsedTimestamp {
  CivilDate date;
  int seconds_of_day = -1;  // -1 when the format carries no time of day
};

// Parses `input` against a strftime-like format. Supported tokens:
//   %Y four-digit year, %m month, %d day, %H hour (24h), %I hour (12h),
//   %M minute, %S second, %p AM/PM. Any other character matches literally.
// Returns nullopt on mismatch or calendar-invalid dates.
std::optional<ParsedTimestamp> parse_timestamp(std::string_view input, std::string_view format);

std::string format_year_month(YearMonth ym);                       // "2010-01"
std::optional<YearMonth> parse_year_month(std::string_view text);  // "2010-01"

}  // namespace polichange

#endif
