#ifndef POLICHANGE_SEGMENTATION_HPP
#define POLICHANGE_SEGMENTATION_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace polichange::segmentation {

// Signal components laid out one vector per dimension, equal lengths.
using MultiSeries = std::vector<std::vector<double>>;

// A segmentation of a length-T series: dividers[0] == 0, dividers.back() == T,
// strictly increasing; segment k is the half-open range
// [dividers[k], dividers[k+1]). total_cost is the sum of per-segment L1 costs
// recomputed directly over the chosen segments.
struct Segmentation {
  std::vector<std::size_t> dividers;
  double total_cost = 0.0;
  std::size_t series_length = 0;

  std::size_t interior_count() const { return dividers.size() - 2; }
  std::vector<std::size_t> interior() const {
    return {dividers.begin() + 1, dividers.end() - 1};
  }
};

// Lower-upper average median: middle element for odd lengths, mean of the two
// middle elements for even lengths.
double component_median(std::span<const double> values);

// Sum of absolute deviations from the segment median over series[a..b).
double segment_cost_l1(std::span<const double> series, std::size_t a, std::size_t b);

// Multivariate form: per-component deviations from per-component medians.
double segment_cost_l1(const MultiSeries& components, std::size_t a, std::size_t b);

// All O(T^2) segment costs with O(1) lookup. Built with incremental
// running-median accumulators in O(T^2 log T); immutable afterwards.
class CostCache {
 public:
  static CostCache build(std::span<const double> series);
  static CostCache build(const MultiSeries& components);

  double cost(std::size_t a, std::size_t b) const {
    return costs_[a * (2 * length_ - a + 1) / 2 + (b - a - 1)];
  }
  std::size_t length() const { return length_; }
  std::size_t entry_count() const { return costs_.size(); }

 private:
  CostCache(std::size_t length, std::vector<double> costs)
      : length_(length), costs_(std::move(costs)) {}
  std::size_t length_ = 0;
  std::vector<double> costs_;  // triangular layout over 0 <= a < b <= T
};

// Exact optimum with k interior dividers and every segment at least min_len
// long; ties resolved to the lexicographically smallest divider list.
Segmentation detect_fixed_k(std::span<const double> series, std::size_t k,
                            std::size_t min_len = 2);
Segmentation detect_fixed_k(const MultiSeries& components, std::size_t k,
                            std::size_t min_len = 2);

// Exact minimizer of total cost + beta * (interior divider count) over every
// feasible divider count. beta = +infinity collapses to a single segment.
Segmentation detect_penalized(std::span<const double> series, double beta,
                              std::size_t min_len = 2);
Segmentation detect_penalized(const MultiSeries& components, double beta,
                              std::size_t min_len = 2);

// Robust default penalty 2 * sigma * log(T) with sigma the scaled median
// absolute deviation (1.4826 * MAD) of the first differences.
double default_penalty(std::span<const double> series);

// Every admissible divider list for a length-T series, in lexicographic order.
std::vector<std::vector<std::size_t>> all_divider_placements(std::size_t length, std::size_t k,
                                                             std::size_t min_len);

// Exhaustive-search oracle, same tie rule as detect_fixed_k. Costs are
// evaluated by direct segment_cost_l1 calls, independent of CostCache.
// Guarded to T <= 30 and k <= 4.
Segmentation brute_force_segment(std::span<const double> series, std::size_t k,
                                 std::size_t min_len = 2);

enum class Inflection { positive, negative };

const char* to_string(Inflection direction);

// Sign of (median of the segment after `divider` - median of the segment
// before it); an exact zero difference reports positive.
Inflection classify_inflection(std::span<const double> series, const Segmentation& seg,
                               std::size_t divider);

}  // namespace polichange::segmentation

#endif
