#include "polichange/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include <CLI11.hpp>

#include "polichange/seasonal.hpp"
#include "polichange/segmentation.hpp"
#include "polichange/stats.hpp"
#include "polichange/text.hpp"

namespace polichange::pipeline {

namespace {

using nlohmann::json;

constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

template <typename F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const DegenerateError& e) {
    throw StageError(name, kExitDegenerate, e.what());
  } catch (const Error& e) {
    throw StageError(name, kExitData, e.what());
  }
}

std::string span_to_string(const MonthSpan& span) {
  return format_year_month(span.first) + ":" + format_year_month(span.last);
}

MonthSpan span_from_string(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError("span must look like YYYY-MM:YYYY-MM, got \"" + text + "\"");
  const auto first = parse_year_month(text.substr(0, colon));
  const auto last = parse_year_month(text.substr(colon + 1));
  if (!first || !last) throw ConfigError("unparseable span \"" + text + "\"");
  if (*last < *first) throw ConfigError("span ends before it starts: \"" + text + "\"");
  return {*first, *last};
}

json schema_to_json(const ingest::RequestSchema& s) {
  return {{"date_column", s.date_column},
          {"date_format", s.date_format},
          {"type_column", s.type_column}};
}

json schema_to_json(const ingest::BillSchema& s) {
  return {{"date_column", s.date_column},
          {"date_format", s.date_format},
          {"title_column", s.title_column},
          {"subject_column", s.subject_column},
          {"area_column", s.area_column}};
}

void schema_from_json(const json& doc, ingest::RequestSchema& s) {
  for (const auto& [key, value] : doc.items()) {
    if (key == "date_column") s.date_column = value.get<std::string>();
    else if (key == "date_format") s.date_format = value.get<std::string>();
    else if (key == "type_column") s.type_column = value.get<std::string>();
    else throw ConfigError("unknown request schema key \"" + key + "\"");
  }
}

void schema_from_json(const json& doc, ingest::BillSchema& s) {
  for (const auto& [key, value] : doc.items()) {
    if (key == "date_column") s.date_column = value.get<std::string>();
    else if (key == "date_format") s.date_format = value.get<std::string>();
    else if (key == "title_column") s.title_column = value.get<std::string>();
    else if (key == "subject_column") s.subject_column = value.get<std::string>();
    else if (key == "area_column") s.area_column = value.get<std::string>();
    else throw ConfigError("unknown bill schema key \"" + key + "\"");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

DetectionMode mode_from_string(const std::string& text) {
  if (text == "penalized") return DetectionMode::penalized;
  if (text == "fixed-k" || text == "fixed") return DetectionMode::fixed_k;
  throw ConfigError("unknown detection mode \"" + text + "\" (penalized, fixed-k)");
}

}  // namespace

void PipelineConfig::validate() const {
  if (requests_csv.empty()) throw ConfigError("--requests path is required");
  if (bills_csv.empty()) throw ConfigError("--bills path is required");
  if (dictionary_json.empty()) throw ConfigError("--dictionary path is required");
  if (out_dir.empty()) throw ConfigError("--out directory is required");
  if (subsample_n < 1) throw ConfigError("--subsample-n must be positive");
  if (max_categories < 1) throw ConfigError("--max-categories must be positive");
  if (min_fraction < 0.0 || min_fraction > 1.0)
    throw ConfigError("--min-fraction must lie in [0, 1]");
  if (!(group_threshold > 0.0) || group_threshold > 1.0)
    throw ConfigError("--group-threshold must lie in (0, 1]");
  if (min_segment_length < 1) throw ConfigError("--min-segment-length must be positive");
  if (mode == DetectionMode::fixed_k && fixed_k < 1) throw ConfigError("--k must be positive");
  if (beta && (std::isnan(*beta) || *beta < 0.0))
    throw ConfigError("--beta must be nonnegative or \"auto\"");
  if (association_window < 0) throw ConfigError("--association-window must be nonnegative");
  if (n_perm < 99) throw ConfigError("--n-perm must be at least 99");
}

json PipelineConfig::to_json() const {
  json doc;
  doc["requests"] = requests_csv;
  doc["bills"] = bills_csv;
  doc["dictionary"] = dictionary_json;
  doc["out"] = out_dir;
  doc["subsample_n"] = subsample_n;
  doc["seed"] = seed;
  doc["max_categories"] = max_categories;
  doc["min_fraction"] = min_fraction;
  doc["group_threshold"] = group_threshold;
  doc["mode"] = mode == DetectionMode::penalized ? "penalized" : "fixed-k";
  doc["k"] = fixed_k;
  doc["beta"] = beta ? json(*beta) : json("auto");
  doc["min_segment_length"] = min_segment_length;
  doc["association_window"] = association_window;
  doc["n_perm"] = n_perm;
  doc["deseasonalize_bills"] = deseasonalize_bills;
  doc["strict"] = strict_parse;
  doc["request_schema"] = schema_to_json(request_schema);
  doc["bill_schema"] = schema_to_json(bill_schema);
  doc["association_span"] = association_span ? json(span_to_string(*association_span)) : json();
  if (timestamp) doc["timestamp"] = *timestamp;
  return doc;
}

PipelineConfig PipelineConfig::from_json(const json& doc, PipelineConfig base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "requests") base.requests_csv = value.get<std::string>();
      else if (key == "bills") base.bills_csv = value.get<std::string>();
      else if (key == "dictionary") base.dictionary_json = value.get<std::string>();
      else if (key == "out") base.out_dir = value.get<std::string>();
      else if (key == "subsample_n") base.subsample_n = value.get<std::size_t>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "max_categories") base.max_categories = value.get<std::size_t>();
      else if (key == "min_fraction") base.min_fraction = value.get<double>();
      else if (key == "group_threshold") base.group_threshold = value.get<double>();
      else if (key == "mode") base.mode = mode_from_string(value.get<std::string>());
      else if (key == "k") base.fixed_k = value.get<std::size_t>();
      else if (key == "beta") {
        if (value.is_string() && value.get<std::string>() == "auto") base.beta.reset();
        else base.beta = value.get<double>();
      } else if (key == "min_segment_length") base.min_segment_length = value.get<std::size_t>();
      else if (key == "association_window") base.association_window = value.get<int>();
      else if (key == "n_perm") base.n_perm = value.get<int>();
      else if (key == "deseasonalize_bills") base.deseasonalize_bills = value.get<bool>();
      else if (key == "strict") base.strict_parse = value.get<bool>();
      else if (key == "request_schema") schema_from_json(value, base.request_schema);
      else if (key == "bill_schema") schema_from_json(value, base.bill_schema);
      else if (key == "association_span") {
        if (value.is_null()) base.association_span.reset();
        else base.association_span = span_from_string(value.get<std::string>());
      } else if (key == "timestamp") base.timestamp = value.get<std::string>();
      else throw ConfigError("unknown config key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return base;
}

PipelineConfig make_run_config(const std::vector<std::string>& args) {
  CLI::App app{"run the full analysis pipeline"};
  app.name("polichange run");

  std::string config_path, mode_str, beta_str, assoc_span_str;
  std::string request_schema_path, bill_schema_path, timestamp;
  PipelineConfig flags;

  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--requests", flags.requests_csv, "service request CSV");
  app.add_option("--bills", flags.bills_csv, "bill CSV");
  app.add_option("--dictionary", flags.dictionary_json, "keyword dictionary JSON");
  app.add_option("--out", flags.out_dir, "output directory");
  app.add_option("--subsample-n", flags.subsample_n, "records kept before analysis");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--max-categories", flags.max_categories, "categories retained");
  app.add_option("--min-fraction", flags.min_fraction, "minimum category frequency")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--group-threshold", flags.group_threshold, "correlation grouping threshold");
  app.add_option("--mode", mode_str, "detection mode: penalized or fixed-k");
  app.add_option("--k", flags.fixed_k, "interior change points for fixed-k mode");
  app.add_option("--beta", beta_str, "penalty per change point, or \"auto\"");
  app.add_option("--min-segment-length", flags.min_segment_length, "minimum months per segment");
  app.add_option("--association-window", flags.association_window,
                 "months around a change point that count as coincident");
  app.add_option("--n-perm", flags.n_perm, "circular-shift permutations");
  app.add_flag("--deseasonalize-bills", flags.deseasonalize_bills,
               "remove seasonality from bill share series");
  app.add_flag("--strict", flags.strict_parse, "fail on the first malformed row");
  app.add_option("--requests-schema", request_schema_path, "request schema JSON");
  app.add_option("--bills-schema", bill_schema_path, "bill schema JSON");
  app.add_option("--association-span", assoc_span_str,
                 "override span for association tests, YYYY-MM:YYYY-MM");
  app.add_option("--timestamp", timestamp, "generated-at string echoed into the report");

  std::vector<const char*> argv;
  argv.push_back("polichange run");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  PipelineConfig cfg;
  if (app.count("--config") > 0) cfg = PipelineConfig::from_json(load_json_file(config_path), cfg);

  const auto take = [&](const char* flag, auto member) {
    if (app.count(flag) > 0) cfg.*member = flags.*member;
  };
  take("--requests", &PipelineConfig::requests_csv);
  take("--bills", &PipelineConfig::bills_csv);
  take("--dictionary", &PipelineConfig::dictionary_json);
  take("--out", &PipelineConfig::out_dir);
  take("--subsample-n", &PipelineConfig::subsample_n);
  take("--seed", &PipelineConfig::seed);
  take("--max-categories", &PipelineConfig::max_categories);
  take("--min-fraction", &PipelineConfig::min_fraction);
  take("--group-threshold", &PipelineConfig::group_threshold);
  take("--k", &PipelineConfig::fixed_k);
  take("--min-segment-length", &PipelineConfig::min_segment_length);
  take("--association-window", &PipelineConfig::association_window);
  take("--n-perm", &PipelineConfig::n_perm);
  take("--deseasonalize-bills", &PipelineConfig::deseasonalize_bills);
  take("--strict", &PipelineConfig::strict_parse);
  if (app.count("--mode") > 0) cfg.mode = mode_from_string(mode_str);
  if (app.count("--beta") > 0) {
    if (beta_str == "auto") {
      cfg.beta.reset();
    } else {
      try {
        cfg.beta = std::stod(beta_str);
      } catch (const std::exception&) {
        throw ConfigError("--beta expects a number or \"auto\", got \"" + beta_str + "\"");
      }
    }
  }
  if (app.count("--requests-schema") > 0)
    schema_from_json(load_json_file(request_schema_path), cfg.request_schema);
  if (app.count("--bills-schema") > 0)
    schema_from_json(load_json_file(bill_schema_path), cfg.bill_schema);
  if (app.count("--association-span") > 0) cfg.association_span = span_from_string(assoc_span_str);
  if (app.count("--timestamp") > 0) cfg.timestamp = timestamp;

  cfg.validate();
  return cfg;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

std::vector<double> sum_member_rows(const CategoryMatrix& matrix,
                                    const std::vector<std::string>& members) {
  std::vector<double> sum(matrix.months(), 0.0);
  for (const auto& member : members) {
    for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
      if (matrix.categories[c] != member) continue;
      for (std::size_t t = 0; t < sum.size(); ++t) sum[t] += matrix.values[c][t];
    }
  }
  return sum;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();

  PipelineResult result;
  auto& analysis = result.analysis;
  analysis.seed = config.seed;
  analysis.config = config.to_json();
  analysis.config_digest = fnv1a_hex(report::serialize_json(analysis.config));
  analysis.generated_at = config.timestamp;

  const auto add_stage = [&](std::string name, std::int64_t in, std::int64_t out,
                             std::int64_t dropped, std::string note = "") {
    analysis.stages.push_back({std::move(name), in, out, dropped, std::move(note)});
  };

  // ingest service requests
  auto requests = run_stage("parse_requests", [&] {
    std::ifstream in(config.requests_csv);
    if (!in) throw IoError("cannot open " + config.requests_csv);
    return ingest::parse_requests(in, config.request_schema, config.strict_parse);
  });
  if (requests.records.empty())
    throw StageError("parse_requests", kExitData,
                     "no usable service request rows in " + config.requests_csv);
  add_stage("parse_requests",
            static_cast<std::int64_t>(requests.records.size() + requests.rejected.size()),
            static_cast<std::int64_t>(requests.records.size()),
            static_cast<std::int64_t>(requests.rejected.size()), config.requests_csv);

  const auto sampled = run_stage("subsample", [&] {
    return ingest::subsample(requests.records, config.subsample_n, config.seed);
  });
  add_stage("subsample", static_cast<std::int64_t>(requests.records.size()),
            static_cast<std::int64_t>(sampled.size()),
            static_cast<std::int64_t>(requests.records.size() - sampled.size()),
            "seed " + std::to_string(config.seed));

  analysis.catalog = run_stage("select_categories", [&] {
    return ingest::select_top_categories(sampled, config.max_categories, config.min_fraction);
  });
  if (analysis.catalog.empty())
    throw StageError("select_categories", kExitData,
                     "no category reaches the minimum frequency");
  const auto in_catalog = static_cast<std::int64_t>(
      std::count_if(sampled.begin(), sampled.end(), [&](const auto& rec) {
        return analysis.catalog.index_of(rec.complaint_type).has_value();
      }));
  add_stage("select_categories", static_cast<std::int64_t>(sampled.size()), in_catalog,
            static_cast<std::int64_t>(sampled.size()) - in_catalog,
            std::to_string(analysis.catalog.size()) + " categories");

  const CategoryMatrix counts =
      run_stage("bin_monthly", [&] { return ingest::bin_monthly(sampled, analysis.catalog); });
  analysis.request_span = {counts.start_month, counts.month_at(counts.months() - 1)};
  const double binned_total = std::accumulate(
      counts.values.begin(), counts.values.end(), 0.0, [](double acc, const auto& row) {
        return acc + std::accumulate(row.begin(), row.end(), 0.0);
      });
  add_stage("bin_monthly", in_catalog, static_cast<std::int64_t>(binned_total),
            in_catalog - static_cast<std::int64_t>(binned_total),
            std::to_string(counts.months()) + " months from " +
                format_year_month(counts.start_month));

  // correlation structure and category grouping
  analysis.correlation =
      run_stage("correlate", [&] { return stats::correlation_matrix(counts); });
  analysis.groups = run_stage("correlate", [&] {
    return stats::collapse_groups(analysis.correlation, config.group_threshold);
  });
  add_stage("correlate", static_cast<std::int64_t>(analysis.catalog.size()),
            static_cast<std::int64_t>(analysis.groups.size()), 0,
            "grouping threshold " + std::to_string(config.group_threshold));

  CategoryMatrix grouped;
  grouped.start_month = counts.start_month;
  grouped.kind = MatrixKind::counts;
  for (const auto& members : analysis.groups) {
    grouped.categories.push_back(stats::group_label(members));
    grouped.values.push_back(sum_member_rows(counts, members));
  }

  // per-group deseasonalization and change point detection
  const int first_phase = grouped.start_month.month - 1;
  CategoryMatrix deseasonalized = grouped;
  deseasonalized.kind = MatrixKind::values;
  std::vector<std::vector<std::size_t>> dividers_per_group;
  std::int64_t total_dividers = 0;
  for (std::size_t g = 0; g < grouped.categories.size(); ++g) {
    auto& entry = analysis.analyses.emplace_back();
    entry.label = grouped.categories[g];
    entry.members = analysis.groups[g];
    entry.monthly_counts = grouped.values[g];

    run_stage("deseasonalize", [&] {
      entry.profile = seasonal::estimate_seasonal_profile(grouped.values[g], 12, first_phase);
      entry.deseasonalized =
          seasonal::remove_seasonal(grouped.values[g], entry.profile, first_phase);
      deseasonalized.values[g] = entry.deseasonalized;
      return 0;
    });

    const segmentation::Segmentation seg = run_stage("detect", [&] {
      if (config.mode == DetectionMode::fixed_k) {
        entry.penalty = 0.0;
        return segmentation::detect_fixed_k(entry.deseasonalized, config.fixed_k,
                                            config.min_segment_length);
      }
      entry.penalty =
          config.beta ? *config.beta : segmentation::default_penalty(entry.deseasonalized);
      return segmentation::detect_penalized(entry.deseasonalized, entry.penalty,
                                            config.min_segment_length);
    });
    entry.segmentation_cost = seg.total_cost;
    dividers_per_group.push_back(seg.interior());
    for (const std::size_t d : seg.interior()) {
      const auto direction = segmentation::classify_inflection(entry.deseasonalized, seg, d);
      entry.dividers.push_back({d, grouped.month_at(d), segmentation::to_string(direction)});
      ++total_dividers;
    }
  }
  add_stage("deseasonalize", static_cast<std::int64_t>(grouped.categories.size()),
            static_cast<std::int64_t>(grouped.categories.size()), 0, "period 12");
  add_stage("detect", static_cast<std::int64_t>(grouped.categories.size()), total_dividers, 0,
            config.mode == DetectionMode::fixed_k ? "fixed-k" : "penalized");

  // ingest and classify bills
  auto bills_outcome = run_stage("parse_bills", [&] {
    std::ifstream in(config.bills_csv);
    if (!in) throw IoError("cannot open " + config.bills_csv);
    return ingest::parse_bills(in, config.bill_schema, config.strict_parse);
  });
  auto& bills = bills_outcome.records;
  if (bills.empty())
    throw StageError("parse_bills", kExitData, "no usable bill rows in " + config.bills_csv);
  add_stage("parse_bills",
            static_cast<std::int64_t>(bills.size() + bills_outcome.rejected.size()),
            static_cast<std::int64_t>(bills.size()),
            static_cast<std::int64_t>(bills_outcome.rejected.size()), config.bills_csv);

  run_stage("classify_bills", [&] {
    const auto dict = ingest::KeywordDictionary::load_json_file(config.dictionary_json);
    ingest::classify_bills(bills, dict);
    return 0;
  });
  std::map<std::string, std::int64_t> tallies;
  for (const auto& bill : bills) {
    if (bill.health_area) ++tallies[*bill.health_area];
  }
  analysis.bills_total = static_cast<std::int64_t>(bills.size());
  analysis.bills_classified =
      std::accumulate(tallies.begin(), tallies.end(), std::int64_t{0},
                      [](std::int64_t acc, const auto& kv) { return acc + kv.second; });
  analysis.bill_tallies.assign(tallies.begin(), tallies.end());
  add_stage("classify_bills", analysis.bills_total, analysis.bills_classified,
            analysis.bills_total - analysis.bills_classified, config.dictionary_json);

  // monthly bill series over the bills' own span
  YearMonth bill_lo = year_month_of(bills.front().create_date);
  YearMonth bill_hi = bill_lo;
  for (const auto& bill : bills) {
    const YearMonth ym = year_month_of(bill.create_date);
    bill_lo = std::min(bill_lo, ym);
    bill_hi = std::max(bill_hi, ym);
  }
  analysis.bill_span = MonthSpan{bill_lo, bill_hi};
  const auto bill_counts = run_stage("bill_series", [&] {
    return ingest::bill_monthly_counts(bills, analysis.catalog, *analysis.bill_span);
  });
  auto bill_shares = run_stage("bill_series", [&] {
    return ingest::bill_monthly_share(bills, analysis.catalog, *analysis.bill_span);
  });
  if (config.deseasonalize_bills && bill_shares.months() >= 12) {
    const int bill_phase = bill_shares.start_month.month - 1;
    for (auto& row : bill_shares.values) {
      const auto profile = seasonal::estimate_seasonal_profile(row, 12, bill_phase);
      row = seasonal::remove_seasonal(row, profile, bill_phase);
    }
    bill_shares.kind = MatrixKind::values;
  }
  std::vector<std::int64_t> bills_per_month(bill_counts.months(), 0);
  for (const auto& bill : bills)
    ++bills_per_month[static_cast<std::size_t>(
        months_between(analysis.bill_span->first, year_month_of(bill.create_date)))];
  const auto zero_bill_months = std::count(bills_per_month.begin(), bills_per_month.end(), 0);
  add_stage("bill_series", analysis.bills_total,
            static_cast<std::int64_t>(bill_counts.months()), 0,
            "span " + span_to_string(*analysis.bill_span) + ", " +
                std::to_string(zero_bill_months) + " zero-bill month(s) reported as 0 shares");

  // chi-squared over bills per year, and bill/change-point association
  analysis.association_span = config.association_span
                                  ? config.association_span
                                  : intersect(analysis.request_span, *analysis.bill_span);
  std::optional<CategoryMatrix> assoc_counts;
  if (analysis.association_span) {
    assoc_counts = run_stage("association", [&] {
      return ingest::bill_monthly_counts(bills, analysis.catalog, *analysis.association_span);
    });
  }
  std::int64_t associations_done = 0;
  for (std::size_t g = 0; g < analysis.analyses.size(); ++g) {
    auto& entry = analysis.analyses[g];

    // yearly bill totals for the group's areas
    std::map<int, double> per_year;
    for (const auto& bill : bills) {
      if (!bill.health_area) continue;
      if (std::find(entry.members.begin(), entry.members.end(), *bill.health_area) ==
          entry.members.end())
        continue;
      if (!analysis.bill_span->contains(year_month_of(bill.create_date))) continue;
      per_year[bill.create_date.year] += 1.0;
    }
    std::vector<double> yearly;
    for (int year = bill_lo.year; year <= bill_hi.year; ++year)
      yearly.push_back(per_year.count(year) ? per_year[year] : 0.0);
    const double year_total = std::accumulate(yearly.begin(), yearly.end(), 0.0);
    if (yearly.size() >= 2 && year_total > 0.0) {
      entry.bills_per_year = run_stage("association", [&] {
        return stats::chi_square_gof(yearly);
      });
    }

    if (!assoc_counts) continue;
    const std::vector<double> bill_series = sum_member_rows(*assoc_counts, entry.members);
    const std::size_t assoc_len = bill_series.size();
    std::vector<std::size_t> mapped;
    for (const auto& d : entry.dividers) {
      const int idx = months_between(analysis.association_span->first, d.month);
      if (idx >= 1 && static_cast<std::size_t>(idx) < assoc_len)
        mapped.push_back(static_cast<std::size_t>(idx));
    }
    if (mapped.empty()) continue;  // association undefined without change points in span
    entry.association = run_stage("association", [&] {
      return stats::permutation_association(mapped, bill_series, config.association_window,
                                            config.n_perm,
                                            config.seed + 1000003 * (g + 1));
    });
    ++associations_done;
  }
  add_stage("association", static_cast<std::int64_t>(analysis.analyses.size()),
            associations_done,
            static_cast<std::int64_t>(analysis.analyses.size()) - associations_done,
            analysis.association_span ? "span " + span_to_string(*analysis.association_span)
                                      : "no span overlap");

  // emit everything; remove partial output on failure
  const std::filesystem::path out_dir(config.out_dir);
  const auto planned_files = static_cast<std::int64_t>(5 + grouped.categories.size() + 1);
  add_stage("emit", 0, planned_files, 0, out_dir.string());
  const auto emit = [&](const std::filesystem::path& path, auto&& writer) {
    writer(path);
    result.written.push_back(path);
  };
  try {
    run_stage("emit", [&] {
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create " + out_dir.string());
      emit(out_dir / "series" / "requests_monthly.csv",
           [&](const auto& p) { report::emit_series_csv(counts, p); });
      emit(out_dir / "series" / "requests_grouped.csv",
           [&](const auto& p) { report::emit_series_csv(grouped, p); });
      emit(out_dir / "series" / "requests_deseasonalized.csv",
           [&](const auto& p) { report::emit_series_csv(deseasonalized, p); });
      emit(out_dir / "series" / "bills_monthly.csv",
           [&](const auto& p) { report::emit_series_csv(bill_counts, p); });
      emit(out_dir / "series" / "bill_shares.csv",
           [&](const auto& p) { report::emit_series_csv(bill_shares, p); });
      for (std::size_t g = 0; g < grouped.categories.size(); ++g) {
        emit(out_dir / "charts" / (text::slugify(grouped.categories[g]) + ".svg"),
             [&](const auto& p) {
               report::write_svg_chart(grouped.categories[g], grouped.start_month,
                                       grouped.values[g], dividers_per_group[g], p);
             });
      }
      emit(out_dir / "report.json",
           [&](const auto& p) { report::emit_report_json(analysis, p); });
      return 0;
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& path : result.written) std::filesystem::remove(path, ec);
    throw;
  }

  return result;
}

}  // namespace polichange::pipeline
