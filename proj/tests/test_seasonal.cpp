#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "polichange/errors.hpp"
#include "polichange/seasonal.hpp"
#include "support/generators.hpp"

using namespace polichange;
using namespace polichange::seasonal;

namespace {

double phase_mean(const std::vector<double>& series, int period, int phase) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t t = phase < 0 ? 0 : static_cast<std::size_t>(phase); t < series.size();
       t += static_cast<std::size_t>(period)) {
    sum += series[t];
    ++count;
  }
  return sum / count;
}

}  // namespace

TEST_SUITE("estimate_seasonal_profile") {
  TEST_CASE("constant series has a zero profile") {
    const std::vector<double> series(24, 5.0);
    const auto profile = estimate_seasonal_profile(series, 12);
    for (const double offset : profile.offsets) CHECK(offset == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("recovers an exact periodic pattern") {
    const std::vector<double> pattern{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8};
    std::vector<double> series;
    for (int rep = 0; rep < 2; ++rep) series.insert(series.end(), pattern.begin(), pattern.end());
    const auto profile = estimate_seasonal_profile(series, 12);
    const double mean = 52.0 / 12.0;
    for (std::size_t i = 0; i < 12; ++i)
      CHECK(profile.offsets[i] == doctest::Approx(pattern[i] - mean).epsilon(1e-12));
  }

  TEST_CASE("profile is centered") {
    const auto series = testgen::step_series({}, 11);
    const auto profile = estimate_seasonal_profile(series, 12);
    double sum = 0.0;
    for (const double offset : profile.offsets) sum += offset;
    CHECK(std::abs(sum) < 1e-9);
  }

  TEST_CASE("recovers a noisy seasonal component within tolerance") {
    // 96 months of mild trend + known seasonal + unit noise; the per-phase
    // mean of 8 cycles has sd sigma/sqrt(8), tested at 3 sigma.
    const double sigma = 1.0;
    testgen::Gaussian gauss(2024);
    std::vector<double> truth(12);
    for (int i = 0; i < 12; ++i)
      truth[static_cast<std::size_t>(i)] =
          3.0 * std::sin(2.0 * std::numbers::pi * i / 12.0);
    std::vector<double> series(96);
    for (std::size_t t = 0; t < series.size(); ++t)
      series[t] = 10.0 + 0.02 * static_cast<double>(t) + truth[t % 12] + sigma * gauss.next();

    const auto profile = estimate_seasonal_profile(series, 12);
    const double truth_mean = 0.0;  // sine over a full cycle

    const double tolerance = 3.0 * sigma / std::sqrt(96.0 / 12.0) + 0.15;  // + trend leakage
    for (std::size_t i = 0; i < 12; ++i)
      CHECK(std::abs(profile.offsets[i] - (truth[i] - truth_mean)) < tolerance);
  }

  TEST_CASE("phase alignment honors the first month") {
    // series starting in March: January observations sit at position 10
    std::vector<double> series(24, 0.0);
    for (std::size_t t = 0; t < series.size(); ++t) {
      if ((2 + t) % 12 == 0) series[t] = 12.0;  // spike every January
    }
    const auto profile = estimate_seasonal_profile(series, 12, 2);
    CHECK(profile.offsets[0] == doctest::Approx(11.0));  // January phase
    CHECK(profile.offsets[1] == doctest::Approx(-1.0));
  }

  TEST_CASE("series shorter than the period is rejected") {
    const std::vector<double> series(11, 1.0);
    CHECK_THROWS_AS(estimate_seasonal_profile(series, 12), ArgumentError);
  }
}

TEST_SUITE("remove_seasonal") {
  TEST_CASE("zero profile is the identity") {
    const std::vector<double> series{1, 2, 3, 4, 5};
    SeasonalProfile zero{12, std::vector<double>(12, 0.0)};
    CHECK(remove_seasonal(series, zero) == series);
  }

  TEST_CASE("a pure periodic series cancels exactly") {
    const std::vector<double> pattern{2, -1, 0.5, 3, -2, 1, 0, 4, -3, 2.5, 1.5, -0.5};
    std::vector<double> series;
    for (int rep = 0; rep < 2; ++rep) series.insert(series.end(), pattern.begin(), pattern.end());
    const auto residual = remove_seasonal(series, estimate_seasonal_profile(series, 12));
    double mean = 0.0;
    for (const double r : residual) mean += r;
    mean /= static_cast<double>(residual.size());
    double variance = 0.0;
    for (const double r : residual) variance += (r - mean) * (r - mean);
    variance /= static_cast<double>(residual.size());
    CHECK(variance <= 1e-18);
  }

  TEST_CASE("step plus seasonal leaves the step up to a constant") {
    std::vector<double> step(24, 0.0);
    for (std::size_t t = 12; t < 24; ++t) step[t] = 10.0;  // aligned with the cycle
    const std::vector<double> pattern{1, -2, 3, 0, 2, -1, 4, -3, 0.5, 1.5, -0.5, 2};
    std::vector<double> series(24);
    for (std::size_t t = 0; t < 24; ++t) series[t] = step[t] + pattern[t % 12];

    const auto residual = remove_seasonal(series, estimate_seasonal_profile(series, 12));
    const auto centered = [](std::vector<double> v) {
      double mean = 0.0;
      for (const double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      for (double& x : v) x -= mean;
      return v;
    };
    const auto residual_centered = centered(residual);
    const auto step_centered = centered(step);
    for (std::size_t t = 0; t < 24; ++t)
      CHECK(residual_centered[t] == doctest::Approx(step_centered[t]).epsilon(1e-9));
  }

  TEST_CASE("deseasonalized per-phase means all equal the grand mean") {
    const auto series = testgen::step_series({.length = 96}, 7);
    const auto residual = remove_seasonal(series, estimate_seasonal_profile(series, 12));
    double grand = 0.0;
    for (const double r : residual) grand += r;
    grand /= static_cast<double>(residual.size());
    std::vector<double> residual_vec(residual.begin(), residual.end());
    for (int phase = 0; phase < 12; ++phase)
      CHECK(phase_mean(residual_vec, 12, phase) == doctest::Approx(grand).epsilon(1e-9));
  }

  TEST_CASE("deseasonalization commutes with constant shifts") {
    const auto series = testgen::step_series({.length = 48}, 13);
    std::vector<double> shifted(series);
    for (double& v : shifted) v += 41.5;
    const auto base = remove_seasonal(series, estimate_seasonal_profile(series, 12));
    const auto moved = remove_seasonal(shifted, estimate_seasonal_profile(shifted, 12));
    for (std::size_t t = 0; t < base.size(); ++t)
      CHECK(moved[t] - base[t] == doctest::Approx(41.5).epsilon(1e-12));
  }
}
