#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polichange/csv.hpp"
#include "polichange/errors.hpp"
#include "polichange/ingest.hpp"
#include "polichange/pipeline.hpp"
#include "polichange/report.hpp"
#include "polichange/seasonal.hpp"
#include "polichange/segmentation.hpp"
#include "polichange/stats.hpp"

namespace {

using nlohmann::json;
using namespace polichange;

constexpr const char* kUsage =
    "usage: polichange <command> [options]\n"
    "\n"
    "commands:\n"
    "  run       full pipeline: ingest, group, detect change points, test bills\n"
    "  detect    change points for one series CSV\n"
    "  classify  assign health areas to bill titles\n"
    "  stats     print p-values from an existing report.json\n"
    "\n"
    "run `polichange <command> --help` for the command's options.\n";

// usage 2, data/parse 3, numerical degeneracy 4
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const pipeline::HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const CLI::CallForHelp&) {
    return 0;
  } catch (const pipeline::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int parse_with(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("polichange");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    throw;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

int cmd_run(const std::vector<std::string>& args) {
  const auto config = pipeline::make_run_config(args);
  const auto result = pipeline::run_pipeline(config);
  for (const auto& entry : result.analysis.analyses) {
    std::cout << entry.label << ": " << entry.dividers.size() << " change point(s)";
    if (entry.association) std::cout << ", association p = " << entry.association->p_value;
    std::cout << "\n";
  }
  std::cout << "wrote " << result.written.size() << " files under " << config.out_dir << "\n";
  return 0;
}

int cmd_detect(const std::vector<std::string>& args) {
  CLI::App app{"detect change points in one monthly series"};
  app.name("polichange detect");
  std::string series_path, column, mode_str = "penalized", beta_str = "auto";
  std::size_t k = 1, min_len = 2;
  int period = 12;
  bool deseasonalize = false;
  app.add_option("--series", series_path, "CSV with a month column and one column per series")
      ->required();
  app.add_option("--column", column, "series column to analyse (default: first)");
  app.add_option("--mode", mode_str, "penalized or fixed-k");
  app.add_option("--k", k, "interior change points for fixed-k mode");
  app.add_option("--beta", beta_str, "penalty per change point, or \"auto\"");
  app.add_option("--min-segment-length", min_len, "minimum months per segment");
  app.add_flag("--deseasonalize", deseasonalize, "remove a monthly seasonal profile first");
  app.add_option("--period", period, "seasonal period in months");
  parse_with(app, args);

  std::ifstream in(series_path);
  if (!in) throw IoError("cannot open " + series_path);
  const CategoryMatrix matrix = report::parse_series_csv(in, MatrixKind::values);
  std::size_t col = 0;
  if (!column.empty()) {
    bool found = false;
    for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
      if (matrix.categories[c] == column) {
        col = c;
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("no column named \"" + column + "\" in " + series_path);
  }

  std::vector<double> series = matrix.values[col];
  if (deseasonalize) {
    const int phase = (matrix.start_month.month - 1) % period;
    const auto profile = seasonal::estimate_seasonal_profile(series, period, phase);
    series = seasonal::remove_seasonal(series, profile, phase);
  }

  segmentation::Segmentation seg;
  double beta = 0.0;
  if (mode_str == "fixed-k" || mode_str == "fixed") {
    seg = segmentation::detect_fixed_k(series, k, min_len);
  } else if (mode_str == "penalized") {
    beta = beta_str == "auto" ? segmentation::default_penalty(series) : std::stod(beta_str);
    seg = segmentation::detect_penalized(series, beta, min_len);
  } else {
    throw ConfigError("unknown detection mode \"" + mode_str + "\"");
  }

  json out;
  out["column"] = matrix.categories[col];
  out["length"] = seg.series_length;
  out["mode"] = mode_str == "penalized" ? "penalized" : "fixed-k";
  if (mode_str == "penalized") out["penalty"] = beta;
  out["total_cost"] = seg.total_cost;
  auto& dividers = out["dividers"] = json::array();
  for (const std::size_t d : seg.interior()) {
    dividers.push_back(
        {{"index", d},
         {"month", format_year_month(matrix.month_at(d))},
         {"direction", segmentation::to_string(segmentation::classify_inflection(series, seg, d))}});
  }
  std::cout << report::serialize_json(out);
  return 0;
}

int cmd_classify(const std::vector<std::string>& args) {
  CLI::App app{"classify bill titles into health areas"};
  app.name("polichange classify");
  std::string bills_path, dictionary_path, out_path, schema_path;
  bool strict = false;
  app.add_option("--bills", bills_path, "bill CSV")->required();
  app.add_option("--dictionary", dictionary_path, "keyword dictionary JSON")->required();
  app.add_option("--out", out_path, "output CSV (default: stdout)");
  app.add_option("--bills-schema", schema_path, "bill schema JSON");
  app.add_flag("--strict", strict, "fail on the first malformed row");
  parse_with(app, args);

  ingest::BillSchema schema;
  if (!schema_path.empty()) {
    std::ifstream sin(schema_path);
    if (!sin) throw IoError("cannot open " + schema_path);
    json doc = json::parse(sin);
    if (doc.contains("date_column")) schema.date_column = doc["date_column"];
    if (doc.contains("date_format")) schema.date_format = doc["date_format"];
    if (doc.contains("title_column")) schema.title_column = doc["title_column"];
    if (doc.contains("subject_column")) schema.subject_column = doc["subject_column"];
    if (doc.contains("area_column")) schema.area_column = doc["area_column"];
  }

  std::ifstream in(bills_path);
  if (!in) throw IoError("cannot open " + bills_path);
  auto outcome = ingest::parse_bills(in, schema, strict);
  const auto dict = ingest::KeywordDictionary::load_json_file(dictionary_path);
  ingest::classify_bills(outcome.records, dict);

  std::string csv_text = "create_date,title,health_area\n";
  for (const auto& bill : outcome.records) {
    char date[16];
    std::snprintf(date, sizeof(date), "%04d-%02d-%02d", bill.create_date.year,
                  bill.create_date.month, bill.create_date.day);
    csv_text += date;
    csv_text.push_back(',');
    csv_text += csv::escape(bill.title);
    csv_text.push_back(',');
    csv_text += csv::escape(bill.health_area ? *bill.health_area : "N/A");
    csv_text.push_back('\n');
  }
  if (out_path.empty()) {
    std::cout << csv_text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << csv_text;
  }
  if (!outcome.rejected.empty())
    std::cerr << outcome.rejected.size() << " malformed row(s) skipped\n";
  return 0;
}

int cmd_stats(const std::vector<std::string>& args) {
  CLI::App app{"print the p-values from a report"};
  app.name("polichange stats");
  std::string report_path;
  app.add_option("--report", report_path, "report.json from a pipeline run")->required();
  parse_with(app, args);

  std::ifstream in(report_path);
  if (!in) throw IoError("cannot open " + report_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(report_path + ": " + e.what());
  }
  if (!doc.contains("analyses") || !doc["analyses"].is_array())
    throw ParseError(report_path + ": not a pipeline report");

  std::cout << "label\tchi_square_p\tassociation_p\n";
  for (const auto& entry : doc["analyses"]) {
    std::cout << entry.value("label", std::string("?")) << '\t';
    if (entry.contains("bills_per_year") && !entry["bills_per_year"].is_null())
      std::cout << entry["bills_per_year"]["p_value"].get<double>();
    else
      std::cout << "n/a";
    std::cout << '\t';
    if (entry.contains("association") && !entry["association"].is_null())
      std::cout << entry["association"]["p_value"].get<double>();
    else
      std::cout << "n/a";
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    std::cout << kUsage;
    return args.empty() ? 2 : 0;
  }
  const std::string command = args[0];
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (command == "run") return guarded([&] { return cmd_run(rest); });
  if (command == "detect") return guarded([&] { return cmd_detect(rest); });
  if (command == "classify") return guarded([&] { return cmd_classify(rest); });
  if (command == "stats") return guarded([&] { return cmd_stats(rest); });
  std::cerr << "unknown command \"" << command << "\"\n\n" << kUsage;
  return 2;
}
