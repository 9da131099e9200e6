#include "polichange/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "polichange/errors.hpp"

namespace polichange::segmentation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming sum of absolute deviations from the running median. Two balanced
// heaps hold the lower and upper halves; the cost follows from their sums:
//   sum |x - med| = sum_high - sum_low + med * (n_low - n_high).
class RunningL1Cost {
 public:
  void add(double x) {
    if (low_.empty() || x <= low_.top()) {
      low_.push(x);
      sum_low_ += x;
    } else {
      high_.push(x);
      sum_high_ += x;
    }
    if (low_.size() > high_.size() + 1) {
      const double moved = low_.top();
      low_.pop();
      sum_low_ -= moved;
      high_.push(moved);
      sum_high_ += moved;
    } else if (high_.size() > low_.size()) {
      const double moved = high_.top();
      high_.pop();
      sum_high_ -= moved;
      low_.push(moved);
      sum_low_ += moved;
    }
  }

  double cost() const {
    if (low_.size() == high_.size()) return sum_high_ - sum_low_;
    return sum_high_ - sum_low_ + low_.top();  // low holds the extra element
  }

 private:
  std::priority_queue<double> low_;  // max-heap, lower half
  std::priority_queue<double, std::vector<double>, std::greater<>> high_;
  double sum_low_ = 0.0;
  double sum_high_ = 0.0;
};

std::size_t checked_length(std::size_t length) {
  if (length == 0) throw ArgumentError("segmentation: empty series");
  return length;
}

std::size_t multi_length(const MultiSeries& components) {
  if (components.empty()) throw ArgumentError("segmentation: no components");
  const std::size_t t = components.front().size();
  for (const auto& comp : components) {
    if (comp.size() != t) throw ArgumentError("segmentation: ragged components");
  }
  return checked_length(t);
}

void check_segment(std::size_t length, std::size_t a, std::size_t b) {
  if (a >= b || b > length) throw ArgumentError("segmentation: empty or out-of-range segment");
}

// suffix[j][t] = minimal cost of cutting [t, T) into j segments of length
// >= min_len each; row 0 anchors the recursion at t == T.
std::vector<std::vector<double>> suffix_costs(const CostCache& cache, std::size_t max_segments,
                                              std::size_t min_len) {
  const std::size_t length = cache.length();
  std::vector<std::vector<double>> rows(max_segments + 1, std::vector<double>(length + 1, kInf));
  rows[0][length] = 0.0;
  for (std::size_t j = 1; j <= max_segments; ++j) {
    if (j * min_len > length) break;
    for (std::size_t t = 0; t + j * min_len <= length; ++t) {
      double best = kInf;
      for (std::size_t d = t + min_len; d + (j - 1) * min_len <= length; ++d) {
        const double tail = rows[j - 1][d];
        if (tail == kInf) continue;
        const double v = cache.cost(t, d) + tail;
        if (v < best) best = v;
      }
      rows[j][t] = best;
    }
  }
  return rows;
}

// Walks the table front to back, always taking the smallest next divider that
// still reaches the optimal remaining cost; the comparisons reuse the exact
// expressions the table was filled with, so equality is bitwise-safe.
std::vector<std::size_t> reconstruct_dividers(const CostCache& cache,
                                              const std::vector<std::vector<double>>& rows,
                                              std::size_t segments, std::size_t min_len) {
  const std::size_t length = cache.length();
  std::vector<std::size_t> dividers{0};
  std::size_t t = 0;
  for (std::size_t j = segments; j >= 1; --j) {
    const double target = rows[j][t];
    for (std::size_t d = t + min_len; d + (j - 1) * min_len <= length; ++d) {
      const double tail = rows[j - 1][d];
      if (tail == kInf) continue;
      if (cache.cost(t, d) + tail == target) {
        dividers.push_back(d);
        t = d;
        break;
      }
    }
  }
  return dividers;
}

using DirectCost = std::function<double(std::size_t, std::size_t)>;

double recompute_total(const std::vector<std::size_t>& dividers, const DirectCost& cost) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < dividers.size(); ++k) total += cost(dividers[k], dividers[k + 1]);
  return total;
}

Segmentation detect_fixed_k_impl(const CostCache& cache, const DirectCost& direct, std::size_t k,
                                 std::size_t min_len) {
  const std::size_t length = cache.length();
  if (min_len < 1) throw ArgumentError("segmentation: min_len must be positive");
  if (k < 1 || (k + 1) * min_len > length)
    throw ArgumentError("segmentation: k does not fit the series at this minimum segment length");
  const auto rows = suffix_costs(cache, k + 1, min_len);
  Segmentation seg;
  seg.series_length = length;
  seg.dividers = reconstruct_dividers(cache, rows, k + 1, min_len);
  seg.total_cost = recompute_total(seg.dividers, direct);
  return seg;
}

Segmentation detect_penalized_impl(const CostCache& cache, const DirectCost& direct, double beta,
                                   std::size_t min_len) {
  const std::size_t length = cache.length();
  if (min_len < 1) throw ArgumentError("segmentation: min_len must be positive");
  if (std::isnan(beta) || beta < 0.0)
    throw ArgumentError("segmentation: penalty must be nonnegative");

  Segmentation seg;
  seg.series_length = length;

  const double single_cost = cache.cost(0, length);
  const std::size_t max_interior = length / min_len > 0 ? length / min_len - 1 : 0;
  if (std::isinf(beta) || max_interior == 0) {
    seg.dividers = {0, length};
    seg.total_cost = direct(0, length);
    return seg;
  }

  const auto rows = suffix_costs(cache, max_interior + 1, min_len);
  double best = single_cost;  // k = 0; exempt from min_len because it cannot split
  std::vector<std::size_t> tied_ks;
  for (std::size_t k = 1; k <= max_interior; ++k) {
    const double cost_k = rows[k + 1][0];
    if (cost_k == kInf) continue;
    const double objective = cost_k + beta * static_cast<double>(k);
    if (objective < best) {
      best = objective;
      tied_ks.assign(1, k);
    } else if (objective == best) {
      tied_ks.push_back(k);
    }
  }
  std::vector<std::size_t> chosen;
  if (single_cost == best) chosen = {0, length};  // k = 0 attains the optimum
  for (const std::size_t k : tied_ks) {
    auto candidate = reconstruct_dividers(cache, rows, k + 1, min_len);
    if (chosen.empty() || std::lexicographical_compare(candidate.begin(), candidate.end(),
                                                       chosen.begin(), chosen.end()))
      chosen = std::move(candidate);
  }
  seg.dividers = std::move(chosen);
  seg.total_cost = recompute_total(seg.dividers, direct);
  return seg;
}

}  // namespace

double component_median(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("median of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid),
                   sorted.end());
  if (sorted.size() % 2 == 1) return sorted[mid];
  const double upper = sorted[mid];
  const double lower =
      *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double segment_cost_l1(std::span<const double> series, std::size_t a, std::size_t b) {
  check_segment(series.size(), a, b);
  const auto segment = series.subspan(a, b - a);
  const double med = component_median(segment);
  double total = 0.0;
  for (const double x : segment) total += std::abs(x - med);
  return total;
}

double segment_cost_l1(const MultiSeries& components, std::size_t a, std::size_t b) {
  check_segment(multi_length(components), a, b);
  double total = 0.0;
  for (const auto& comp : components) total += segment_cost_l1(comp, a, b);
  return total;
}

CostCache CostCache::build(std::span<const double> series) {
  const std::size_t length = checked_length(series.size());
  std::vector<double> costs(length * (length + 1) / 2);
  std::size_t slot = 0;
  for (std::size_t a = 0; a < length; ++a) {
    RunningL1Cost acc;
    for (std::size_t b = a + 1; b <= length; ++b) {
      acc.add(series[b - 1]);
      costs[slot++] = acc.cost();
    }
  }
  return CostCache(length, std::move(costs));
}

CostCache CostCache::build(const MultiSeries& components) {
  const std::size_t length = multi_length(components);
  std::vector<double> costs(length * (length + 1) / 2, 0.0);
  for (const auto& comp : components) {
    std::size_t slot = 0;
    for (std::size_t a = 0; a < length; ++a) {
      RunningL1Cost acc;
      for (std::size_t b = a + 1; b <= length; ++b) {
        acc.add(comp[b - 1]);
        costs[slot++] += acc.cost();
      }
    }
  }
  return CostCache(length, std::move(costs));
}

Segmentation detect_fixed_k(std::span<const double> series, std::size_t k, std::size_t min_len) {
  const CostCache cache = CostCache::build(series);
  return detect_fixed_k_impl(
      cache, [&series](std::size_t a, std::size_t b) { return segment_cost_l1(series, a, b); }, k,
      min_len);
}

Segmentation detect_fixed_k(const MultiSeries& components, std::size_t k, std::size_t min_len) {
  const CostCache cache = CostCache::build(components);
  return detect_fixed_k_impl(
      cache,
      [&components](std::size_t a, std::size_t b) { return segment_cost_l1(components, a, b); }, k,
      min_len);
}

Segmentation detect_penalized(std::span<const double> series, double beta, std::size_t min_len) {
  const CostCache cache = CostCache::build(series);
  return detect_penalized_impl(
      cache, [&series](std::size_t a, std::size_t b) { return segment_cost_l1(series, a, b); },
      beta, min_len);
}

Segmentation detect_penalized(const MultiSeries& components, double beta, std::size_t min_len) {
  const CostCache cache = CostCache::build(components);
  return detect_penalized_impl(
      cache,
      [&components](std::size_t a, std::size_t b) { return segment_cost_l1(components, a, b); },
      beta, min_len);
}

double default_penalty(std::span<const double> series) {
  const std::size_t length = checked_length(series.size());
  if (length < 3) return 0.0;
  std::vector<double> diffs(length - 1);
  for (std::size_t t = 0; t + 1 < length; ++t) diffs[t] = series[t + 1] - series[t];
  const double center = component_median(diffs);
  std::vector<double> deviations(diffs.size());
  for (std::size_t t = 0; t < diffs.size(); ++t) deviations[t] = std::abs(diffs[t] - center);
  const double sigma = 1.4826 * component_median(deviations);
  return 2.0 * sigma * std::log(static_cast<double>(length));
}

std::vector<std::vector<std::size_t>> all_divider_placements(std::size_t length, std::size_t k,
                                                             std::size_t min_len) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current{0};
  // depth-first in ascending divider order = lexicographic output order
  const std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t from,
                                                                   std::size_t remaining) {
    if (remaining == 0) {
      if (length - from >= min_len) {
        current.push_back(length);
        out.push_back(current);
        current.pop_back();
      }
      return;
    }
    for (std::size_t d = from + min_len; d + remaining * min_len <= length; ++d) {
      current.push_back(d);
      extend(d, remaining - 1);
      current.pop_back();
    }
  };
  extend(0, k);
  return out;
}

Segmentation brute_force_segment(std::span<const double> series, std::size_t k,
                                 std::size_t min_len) {
  const std::size_t length = checked_length(series.size());
  if (length > 30 || k > 4)
    throw ArgumentError("brute_force_segment: limited to series length 30 and 4 dividers");
  if (min_len < 1) throw ArgumentError("segmentation: min_len must be positive");
  if (k < 1 || (k + 1) * min_len > length)
    throw ArgumentError("segmentation: k does not fit the series at this minimum segment length");

  Segmentation best;
  best.series_length = length;
  best.total_cost = kInf;
  for (const auto& dividers : all_divider_placements(length, k, min_len)) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < dividers.size(); ++i)
      total += segment_cost_l1(series, dividers[i], dividers[i + 1]);
    if (total < best.total_cost) {  // first hit in lexicographic order wins ties
      best.total_cost = total;
      best.dividers = dividers;
    }
  }
  return best;
}

const char* to_string(Inflection direction) {
  return direction == Inflection::positive ? "positive" : "negative";
}

Inflection classify_inflection(std::span<const double> series, const Segmentation& seg,
                               std::size_t divider) {
  if (seg.dividers.size() < 3 || seg.dividers.front() != 0 ||
      seg.dividers.back() != series.size())
    throw ArgumentError("classify_inflection: segmentation does not match the series");
  const auto it = std::find(seg.dividers.begin() + 1, seg.dividers.end() - 1, divider);
  if (it == seg.dividers.end() - 1)
    throw ArgumentError("classify_inflection: divider is not interior to the segmentation");
  const double before = component_median(series.subspan(*(it - 1), divider - *(it - 1)));
  const double after = component_median(series.subspan(divider, *(it + 1) - divider));
  return after - before < 0.0 ? Inflection::negative : Inflection::positive;
}

}  // namespace polichange::segmentation
