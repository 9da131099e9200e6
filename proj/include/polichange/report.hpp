#ifndef POLICHANGE_REPORT_HPP
#define POLICHANGE_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polichange/dates.hpp"
#include "polichange/ingest.hpp"
#include "polichange/seasonal.hpp"
#include "polichange/series.hpp"
#include "polichange/stats.hpp"

namespace polichange::report {

struct StageStat {
  std::string name;
  std::int64_t records_in = 0;
  std::int64_t records_out = 0;
  std::int64_t dropped = 0;
  std::string note;
};

struct DividerReport {
  std::size_t index = 0;       // position in the deseasonalized series
  YearMonth month;             // first month of the new regime
  std::string direction;       // "positive" | "negative"
};

// Everything reported for one analysis group (a category or a merged set).
struct GroupAnalysis {
  std::string label;
  std::vector<std::string> members;
  std::vector<double> monthly_counts;
  seasonal::SeasonalProfile profile;
  std::vector<double> deseasonalized;
  double penalty = 0.0;  // beta actually used; 0 under fixed-k detection
  double segmentation_cost = 0.0;
  std::vector<DividerReport> dividers;
  std::optional<stats::ChiSquareResult> bills_per_year;
  std::optional<stats::AssociationResult> association;
};

struct AnalysisReport {
  std::string schema_version = "polichange-report/1";
  std::uint64_t seed = 0;
  std::string config_digest;
  nlohmann::json config;  // effective configuration echo
  std::optional<std::string> generated_at;
  std::vector<StageStat> stages;

  ingest::CategoryCatalog catalog;
  MonthSpan request_span{{0, 1}, {0, 1}};
  stats::CorrelationMatrix correlation;
  std::vector<std::vector<std::string>> groups;
  std::vector<GroupAnalysis> analyses;

  std::int64_t bills_total = 0;
  std::int64_t bills_classified = 0;
  std::vector<std::pair<std::string, std::int64_t>> bill_tallies;  // label -> count
  std::optional<MonthSpan> bill_span;
  std::optional<MonthSpan> association_span;
};

nlohmann::json to_json(const AnalysisReport& report);

// 17-significant-digit float formatting (round-trip exact), sorted keys,
// 2-space indent; identical inputs produce identical bytes.
std::string serialize_json(const nlohmann::json& value);

void emit_report_json(const AnalysisReport& report, const std::filesystem::path& destination);
void emit_report_json(const nlohmann::json& report, const std::filesystem::path& destination);

// One row per month (ISO year-month first), one column per category.
void emit_series_csv(const CategoryMatrix& matrix, const std::filesystem::path& destination);

// Inverse of emit_series_csv, used to feed emitted series back into tools.
CategoryMatrix parse_series_csv(std::istream& in, MatrixKind kind);

// Minimal deterministic line chart with dashed vertical divider markers.
std::string render_svg(const std::string& label, YearMonth start_month,
                       std::span<const double> values,
                       const std::vector<std::size_t>& dividers);

void write_svg_chart(const std::string& label, YearMonth start_month,
                     std::span<const double> values, const std::vector<std::size_t>& dividers,
                     const std::filesystem::path& destination);

// One SVG per category, named by a slug of its label.
void render_svg_charts(const CategoryMatrix& matrix,
                       const std::vector<std::vector<std::size_t>>& dividers_per_category,
                       const std::filesystem::path& directory);

}  // namespace polichange::report

#endif
