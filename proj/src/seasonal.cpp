#include "polichange/seasonal.hpp"

#include <cstddef>

#include "polichange/errors.hpp"

namespace polichange::seasonal {

SeasonalProfile estimate_seasonal_profile(std::span<const double> series, int period,
                                          int first_phase) {
  if (period < 1) throw ArgumentError("seasonal: period must be positive");
  if (series.size() < static_cast<std::size_t>(period))
    throw ArgumentError("seasonal: series shorter than one period");
  if (first_phase < 0 || first_phase >= period)
    throw ArgumentError("seasonal: first_phase out of range");

  const auto p = static_cast<std::size_t>(period);
  std::vector<double> sums(p, 0.0);
  std::vector<std::size_t> counts(p, 0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    const std::size_t phase = (static_cast<std::size_t>(first_phase) + t) % p;
    sums[phase] += series[t];
    ++counts[phase];
  }

  SeasonalProfile profile;
  profile.period = period;
  profile.offsets.resize(p);
  double grand = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    profile.offsets[i] = sums[i] / static_cast<double>(counts[i]);
    grand += profile.offsets[i];
  }
  grand /= static_cast<double>(p);
  for (double& offset : profile.offsets) offset -= grand;
  return profile;
}

std::vector<double> remove_seasonal(std::span<const double> series, const SeasonalProfile& profile,
                                    int first_phase) {
  if (profile.period < 1 || profile.offsets.size() != static_cast<std::size_t>(profile.period))
    throw ArgumentError("seasonal: malformed profile");
  if (first_phase < 0 || first_phase >= profile.period)
    throw ArgumentError("seasonal: first_phase out of range");
  const auto p = static_cast<std::size_t>(profile.period);
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    out[t] = series[t] - profile.offsets[(static_cast<std::size_t>(first_phase) + t) % p];
  }
  return out;
}

}  // namespace polichange::seasonal
