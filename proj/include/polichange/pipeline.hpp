#ifndef POLICHANGE_PIPELINE_HPP
#define POLICHANGE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polichange/errors.hpp"
#include "polichange/ingest.hpp"
#include "polichange/report.hpp"

namespace polichange::pipeline {

enum class DetectionMode { penalized, fixed_k };

struct PipelineConfig {
  std::string requests_csv;
  std::string bills_csv;
  std::string dictionary_json;
  std::string out_dir = "out";

  std::size_t subsample_n = 30000;
  std::uint64_t seed = 0;
  std::size_t max_categories = 13;
  double min_fraction = 0.005;
  double group_threshold = 0.7;

  DetectionMode mode = DetectionMode::penalized;
  std::size_t fixed_k = 1;      // interior dividers when mode == fixed_k
  std::optional<double> beta;   // empty = data-driven default penalty
  std::size_t min_segment_length = 2;

  int association_window = 3;
  int n_perm = 9999;
  bool deseasonalize_bills = false;
  bool strict_parse = false;

  ingest::RequestSchema request_schema;
  ingest::BillSchema bill_schema;
  std::optional<MonthSpan> association_span;  // default: request/bill span intersection
  std::optional<std::string> timestamp;       // echoed verbatim; omitted keeps runs byte-identical

  void validate() const;
  nlohmann::json to_json() const;
  // Overlays json fields onto `base`; unknown keys are ConfigErrors.
  static PipelineConfig from_json(const nlohmann::json& doc, PipelineConfig base);
};

// Thrown when --help is requested; carries the text to print.
struct HelpRequested {
  std::string text;
};

// Builds the effective config for the `run` subcommand: command-line flags
// override config-file values override defaults.
PipelineConfig make_run_config(const std::vector<std::string>& args);

// A failure inside run_pipeline, tagged with the stage that raised it and the
// process exit code it maps to.
struct StageError : Error {
  StageError(std::string stage_name, int code, const std::string& message)
      : Error("stage " + stage_name + ": " + message), stage(std::move(stage_name)),
        exit_code(code) {}
  std::string stage;
  int exit_code = 3;
};

struct PipelineResult {
  report::AnalysisReport analysis;
  std::vector<std::filesystem::path> written;
};

// End-to-end run: ingest, subsample, select categories, bin, correlate and
// group, deseasonalize, detect change points, classify bills, bill series,
// chi-squared and permutation tests, emit report/CSV/SVG. Deterministic for
// fixed inputs and config. On failure the partial outputs are removed and a
// StageError is thrown.
PipelineResult run_pipeline(const PipelineConfig& config);

// FNV-1a 64 hex digest, used to fingerprint the effective config.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace polichange::pipeline

#endif
