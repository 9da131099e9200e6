#include "polichange/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "polichange/errors.hpp"
#include "polichange/rng.hpp"

namespace polichange::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CenteredMoments {
  double sxx = 0.0;
  double mean = 0.0;
};

CenteredMoments center(std::span<const double> x) {
  CenteredMoments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (const double v : x) m.sxx += (v - m.mean) * (v - m.mean);
  return m;
}

// Regularized lower incomplete gamma P(a, x) by power series, for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction,
// for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("pearson: length mismatch");
  if (x.size() < 2) throw ArgumentError("pearson: need at least two observations");
  const CenteredMoments mx = center(x);
  const CenteredMoments my = center(y);
  if (mx.sxx == 0.0 || my.sxx == 0.0)
    throw DegenerateError("pearson: correlation with a constant series is undefined");
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx.mean) * (y[i] - my.mean);
  return std::clamp(sxy / std::sqrt(mx.sxx * my.sxx), -1.0, 1.0);
}

bool CorrelationMatrix::defined(std::size_t i, std::size_t j) const {
  return !std::isnan(values[i][j]);
}

CorrelationMatrix correlation_matrix(const CategoryMatrix& matrix) {
  if (matrix.months() < 2) throw ArgumentError("correlation: need at least two months");
  const std::size_t n = matrix.categories.size();

  std::vector<bool> constant(n);
  for (std::size_t i = 0; i < n; ++i) constant[i] = center(matrix.row(i)).sxx == 0.0;

  CorrelationMatrix corr;
  corr.labels = matrix.categories;
  corr.values.assign(n, std::vector<double>(n, kNaN));
  for (std::size_t i = 0; i < n; ++i) {
    if (constant[i]) continue;
    corr.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (constant[j]) continue;
      const double r = pearson(matrix.row(i), matrix.row(j));
      corr.values[i][j] = r;
      corr.values[j][i] = r;
    }
  }
  return corr;
}

std::vector<std::vector<std::string>> collapse_groups(const CorrelationMatrix& corr,
                                                      double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw ArgumentError("collapse_groups: threshold must lie in (0, 1]");
  const std::size_t n = corr.labels.size();

  // union-find over categories
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (corr.defined(i, j) && corr.values[i][j] >= threshold) parent[find(i)] = find(j);
    }
  }

  std::vector<std::vector<std::string>> groups;
  std::vector<std::ptrdiff_t> group_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (group_of_root[root] < 0) {
      group_of_root[root] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(group_of_root[root])].push_back(corr.labels[i]);
  }
  return groups;
}

std::string group_label(const std::vector<std::string>& members) {
  std::string label;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i != 0) label.push_back('+');
    label += members[i];
  }
  return label;
}

ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected) {
  if (observed.size() != expected.size()) throw ArgumentError("chi-squared: length mismatch");
  if (observed.size() < 2) throw ArgumentError("chi-squared: need at least two cells");
  ChiSquareResult result;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw ArgumentError("chi-squared: expected cells must be positive");
    const double diff = observed[i] - expected[i];
    result.statistic += diff * diff / expected[i];
  }
  result.degrees_of_freedom = static_cast<int>(observed.size()) - 1;
  result.p_value = chi_square_sf(result.statistic, result.degrees_of_freedom);
  return result;
}

ChiSquareResult chi_square_gof(std::span<const double> observed) {
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const std::vector<double> expected(observed.size(),
                                     total / static_cast<double>(observed.size()));
  return chi_square_gof(observed, expected);
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw ArgumentError("chi-squared: df must be positive");
  if (x < 0.0 || std::isnan(x)) throw ArgumentError("chi-squared: statistic must be nonnegative");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * static_cast<double>(df);
  const double half_x = 0.5 * x;
  if (x < static_cast<double>(df) + 1.0) return 1.0 - gamma_p_series(a, half_x);
  return gamma_q_continued_fraction(a, half_x);
}

AssociationResult permutation_association(const std::vector<std::size_t>& interior_dividers,
                                          std::span<const double> bill_series, int window_months,
                                          int n_perm, std::uint64_t seed) {
  const std::size_t length = bill_series.size();
  if (length == 0) throw ArgumentError("association: empty bill series");
  if (window_months < 0) throw ArgumentError("association: window must be nonnegative");
  if (n_perm < 99) throw ArgumentError("association: need at least 99 permutations");
  if (interior_dividers.empty())
    throw DegenerateError("association: no change points, association undefined");
  for (const std::size_t d : interior_dividers) {
    if (d == 0 || d >= length) throw ArgumentError("association: divider outside the series");
  }

  // months within the window of any divider
  std::vector<bool> in_window(length, false);
  for (const std::size_t d : interior_dividers) {
    const std::size_t w = static_cast<std::size_t>(window_months);
    const std::size_t lo = d > w ? d - w : 0;
    const std::size_t hi = std::min(length - 1, d + w);
    for (std::size_t m = lo; m <= hi; ++m) in_window[m] = true;
  }

  const auto window_mass = [&](std::size_t shift) {
    double mass = 0.0;
    for (std::size_t m = 0; m < length; ++m) {
      if (in_window[m]) mass += bill_series[(m + length - shift) % length];
    }
    return mass;
  };

  AssociationResult result;
  result.window_months = window_months;
  result.permutation_count = n_perm;
  result.observed_statistic = window_mass(0);

  DeterministicRng rng(seed);
  int at_least_as_large = 0;
  for (int i = 0; i < n_perm; ++i) {
    const auto shift = static_cast<std::size_t>(rng.below(length));
    if (window_mass(shift) >= result.observed_statistic) ++at_least_as_large;
  }
  result.p_value = (1.0 + at_least_as_large) / (1.0 + n_perm);
  return result;
}

}  // namespace polichange::stats
