#ifndef POLICHANGE_SERIES_HPP
#define POLICHANGE_SERIES_HPP

#include <span>
#include <string>
#include <vector>

#include "polichange/dates.hpp"

namespace polichange {

enum class MatrixKind {
  counts,  // nonnegative integer entries
  shares,  // percentages in [0, 100]
  values,  // unconstrained reals (e.g. deseasonalized series)
};

// Per-category monthly values over a contiguous month span. Row c holds the
// series for categories[c]; all rows share the same length.
struct CategoryMatrix {
  YearMonth start_month;
  std::vector<std::string> categories;
  std::vector<std::vector<double>> values;  // [category][month]
  MatrixKind kind = MatrixKind::counts;

  std::size_t months() const { return values.empty() ? 0 : values.front().size(); }
  YearMonth month_at(std::size_t t) const { return add_months(start_month, static_cast<int>(t)); }
  std::span<const double> row(std::size_t c) const { return values[c]; }

  // Throws ArgumentError when rows are ragged, empty, or out of range for kind.
  void validate() const;
};

}  // namespace polichange

#endif
