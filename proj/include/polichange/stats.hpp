#ifndef POLICHANGE_STATS_HPP
#define POLICHANGE_STATS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polichange/series.hpp"

namespace polichange::stats {

// Sample Pearson correlation. Throws DegenerateError when either input is
// constant; a correlation with a flat series is undefined, not zero.
double pearson(std::span<const double> x, std::span<const double> y);

// Pairwise correlations between category rows. Entries involving a constant
// row are recorded as missing (NaN) rather than coerced.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // NaN marks an undefined entry

  bool defined(std::size_t i, std::size_t j) const;
};

CorrelationMatrix correlation_matrix(const CategoryMatrix& matrix);

// Connected components of the graph with an edge wherever r >= threshold.
// Each group lists member labels in catalog order; groups are ordered by
// their first member.
std::vector<std::vector<std::string>> collapse_groups(const CorrelationMatrix& corr,
                                                      double threshold = 0.7);

// "A+B+C" display label for a group.
std::string group_label(const std::vector<std::string>& members);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Goodness-of-fit statistic sum (O-E)^2 / E with df = cells - 1.
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected);

// Uniform expectation across cells.
ChiSquareResult chi_square_gof(std::span<const double> observed);

// Upper-tail probability of the chi-squared distribution, computed as the
// regularized incomplete gamma Q(df/2, x/2): power series below x = df + 1,
// continued fraction above.
double chi_square_sf(double x, int df);

struct AssociationResult {
  double observed_statistic = 0.0;
  int permutation_count = 0;
  double p_value = 1.0;
  int window_months = 0;
};

// Circular-shift permutation test: the statistic is the total of
// `bill_series` mass within +/- window months of any divider, and the null
// redraws it after rotating the series by uniform random offsets.
// p = (1 + #{shifts with statistic >= observed}) / (1 + n_perm).
AssociationResult permutation_association(const std::vector<std::size_t>& interior_dividers,
                                          std::span<const double> bill_series, int window_months,
                                          int n_perm, std::uint64_t seed);

}  // namespace polichange::stats

#endif
