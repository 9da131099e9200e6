#ifndef POLICHANGE_SEASONAL_HPP
#define POLICHANGE_SEASONAL_HPP

#include <span>
#include <vector>

namespace polichange::seasonal {

// Centered additive seasonal component. offsets[i] is the adjustment for
// cycle phase i; with a 12-month period and calendar-aligned phases,
// phase 0 is January.
struct SeasonalProfile {
  int period = 12;
  std::vector<double> offsets;  // size == period, sums to ~0
};

// Month-of-cycle mean removal: offset[i] = mean of observations at phase i
// minus the grand mean of the per-phase means. `first_phase` is the phase of
// series position 0 (calendar month - 1 for monthly data). Partial trailing
// cycles are fine; the series just has to cover one full period.
SeasonalProfile estimate_seasonal_profile(std::span<const double> series, int period = 12,
                                          int first_phase = 0);

// out[t] = series[t] - offsets[(first_phase + t) mod period].
std::vector<double> remove_seasonal(std::span<const double> series, const SeasonalProfile& profile,
                                    int first_phase = 0);

}  // namespace polichange::seasonal

#endif
