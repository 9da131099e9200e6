#include "polichange/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polichange/csv.hpp"
#include "polichange/rng.hpp"
#include "polichange/text.hpp"

namespace polichange::ingest {

namespace {

using nlohmann::json;

// Column indices resolved against a header row; npos-like -1 for absent.
std::ptrdiff_t find_column(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (text::normalize_label(header[i]) == text::normalize_label(name))
      return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t require_column(const std::vector<std::string>& header, const std::string& name,
                              const char* what) {
  const std::ptrdiff_t idx = find_column(header, name);
  if (idx < 0)
    throw ConfigError(std::string("missing ") + what + " column \"" + name + "\" in header");
  return idx;
}

bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && text::trim(row[0]).empty();
}

void reject(std::vector<RowRejection>& sink, bool strict, std::size_t row, std::string reason) {
  if (strict) {
    throw ParseError("row " + std::to_string(row) + ": " + reason);
  }
  sink.push_back({row, std::move(reason)});
}

}  // namespace

std::optional<std::size_t> CategoryCatalog::index_of(std::string_view raw_label) const {
  const std::string key = text::normalize_label(raw_label);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (text::normalize_label(entries[i].label) == key) return i;
  }
  return std::nullopt;
}

ParseOutcome<ServiceRequestRecord> parse_requests(std::istream& in, const RequestSchema& schema,
                                                  bool strict) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw ParseError("requests file is empty, expected a header row");
  const auto date_col = require_column(row, schema.date_column, "date");
  const auto type_col = require_column(row, schema.type_column, "complaint type");
  const std::size_t width = row.size();

  ParseOutcome<ServiceRequestRecord> out;
  std::size_t data_row = 0;
  while (reader.next(row)) {
    if (blank_row(row)) continue;
    ++data_row;
    if (row.size() != width) {
      reject(out.rejected, strict, data_row,
             "expected " + std::to_string(width) + " fields, got " + std::to_string(row.size()));
      continue;
    }
    const auto stamp =
        parse_timestamp(text::trim(row[static_cast<std::size_t>(date_col)]), schema.date_format);
    if (!stamp) {
      reject(out.rejected, strict, data_row,
             "unparseable date \"" + row[static_cast<std::size_t>(date_col)] + "\"");
      continue;
    }
    std::string type(text::trim(row[static_cast<std::size_t>(type_col)]));
    if (type.empty()) {
      reject(out.rejected, strict, data_row, "empty complaint type");
      continue;
    }
    out.records.push_back({stamp->date, stamp->seconds_of_day, std::move(type)});
  }
  return out;
}

ParseOutcome<BillRecord> parse_bills(std::istream& in, const BillSchema& schema, bool strict) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw ParseError("bills file is empty, expected a header row");
  const auto date_col = require_column(row, schema.date_column, "date");
  const auto title_col = require_column(row, schema.title_column, "title");
  const auto subject_col =
      schema.subject_column.empty() ? -1 : find_column(row, schema.subject_column);
  const auto area_col = schema.area_column.empty() ? -1 : find_column(row, schema.area_column);
  const std::size_t width = row.size();

  ParseOutcome<BillRecord> out;
  std::size_t data_row = 0;
  while (reader.next(row)) {
    if (blank_row(row)) continue;
    ++data_row;
    if (row.size() != width) {
      reject(out.rejected, strict, data_row,
             "expected " + std::to_string(width) + " fields, got " + std::to_string(row.size()));
      continue;
    }
    const auto stamp =
        parse_timestamp(text::trim(row[static_cast<std::size_t>(date_col)]), schema.date_format);
    if (!stamp) {
      reject(out.rejected, strict, data_row,
             "unparseable date \"" + row[static_cast<std::size_t>(date_col)] + "\"");
      continue;
    }
    BillRecord bill;
    bill.create_date = stamp->date;
    bill.title = std::string(text::trim(row[static_cast<std::size_t>(title_col)]));
    if (subject_col >= 0)
      bill.subject = std::string(text::trim(row[static_cast<std::size_t>(subject_col)]));
    if (area_col >= 0) {
      const auto area = text::trim(row[static_cast<std::size_t>(area_col)]);
      if (!area.empty() && text::normalize_label(area) != "n/a")
        bill.health_area = std::string(area);
    }
    out.records.push_back(std::move(bill));
  }
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("subsample: n must be positive");
  if (n >= size) {
    std::vector<std::size_t> all(size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  // Partial Fisher-Yates over the index array, then sort to preserve the
  // records' original relative order.
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  DeterministicRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

CategoryCatalog select_top_categories(const std::vector<ServiceRequestRecord>& records,
                                      std::size_t max_categories, double min_fraction) {
  if (records.empty()) throw ArgumentError("select_top_categories: no records");

  // Count by normalized label; the canonical spelling is the most frequent raw
  // variant (ties to the lexicographically smallest) so mixed-case data maps
  // to one stable display label.
  struct Variants {
    std::size_t total = 0;
    std::map<std::string, std::size_t> spellings;
  };
  std::map<std::string, Variants> counts;
  for (const auto& rec : records) {
    auto& v = counts[text::normalize_label(rec.complaint_type)];
    ++v.total;
    ++v.spellings[std::string(text::trim(rec.complaint_type))];
  }

  struct Candidate {
    std::string canonical;
    std::string key;
    std::size_t count;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(counts.size());
  for (const auto& [key, v] : counts) {
    const auto best = std::max_element(
        v.spellings.begin(), v.spellings.end(),
        [](const auto& a, const auto& b) {
          return a.second < b.second || (a.second == b.second && a.first > b.first);
        });
    candidates.push_back({best->first, key, v.total});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });

  const double total = static_cast<double>(records.size());
  CategoryCatalog catalog;
  for (const auto& c : candidates) {
    if (catalog.entries.size() >= max_categories) break;
    const double freq = static_cast<double>(c.count) / total;
    if (freq < min_fraction) break;  // frequencies are non-increasing
    catalog.entries.push_back({c.canonical, freq});
  }
  return catalog;
}

CategoryMatrix bin_monthly(const std::vector<ServiceRequestRecord>& records,
                           const CategoryCatalog& catalog, std::optional<MonthSpan> span) {
  if (catalog.empty()) throw ArgumentError("bin_monthly: empty catalog");

  // Resolve each record's category once.
  std::vector<std::pair<YearMonth, std::size_t>> hits;  // (month, category index)
  hits.reserve(records.size());
  for (const auto& rec : records) {
    if (const auto idx = catalog.index_of(rec.complaint_type)) {
      hits.emplace_back(year_month_of(rec.created_date), *idx);
    }
  }
  if (!span) {
    if (hits.empty())
      throw ArgumentError("bin_monthly: no in-catalog records and no explicit span");
    YearMonth lo = hits.front().first, hi = hits.front().first;
    for (const auto& [ym, _] : hits) {
      lo = std::min(lo, ym);
      hi = std::max(hi, ym);
    }
    span = MonthSpan{lo, hi};
  } else if (span->last < span->first) {
    throw ArgumentError("bin_monthly: span ends before it starts");
  }

  CategoryMatrix matrix;
  matrix.start_month = span->first;
  matrix.kind = MatrixKind::counts;
  for (const auto& entry : catalog.entries) matrix.categories.push_back(entry.label);
  matrix.values.assign(catalog.size(), std::vector<double>(span->length(), 0.0));
  for (const auto& [ym, c] : hits) {
    if (!span->contains(ym)) continue;
    matrix.values[c][static_cast<std::size_t>(months_between(span->first, ym))] += 1.0;
  }
  return matrix;
}

std::optional<std::string> classify_bill(const BillRecord& bill, const KeywordDictionary& dict) {
  const std::string title = text::to_lower(bill.title);
  for (const auto& rule : dict.rules) {
    for (const auto& keyword : rule.keywords) {
      if (title.find(keyword) != std::string::npos) return rule.label;
    }
  }
  return std::nullopt;
}

void classify_bills(std::vector<BillRecord>& bills, const KeywordDictionary& dict) {
  for (auto& bill : bills) bill.health_area = classify_bill(bill, dict);
}

namespace {

CategoryMatrix bill_matrix_shell(const CategoryCatalog& catalog, const MonthSpan& span,
                                 MatrixKind kind) {
  if (span.last < span.first) throw ArgumentError("bill span ends before it starts");
  CategoryMatrix matrix;
  matrix.start_month = span.first;
  matrix.kind = kind;
  for (const auto& entry : catalog.entries) matrix.categories.push_back(entry.label);
  matrix.values.assign(catalog.size(), std::vector<double>(span.length(), 0.0));
  return matrix;
}

}  // namespace

CategoryMatrix bill_monthly_counts(const std::vector<BillRecord>& bills,
                                   const CategoryCatalog& catalog, const MonthSpan& span) {
  CategoryMatrix matrix = bill_matrix_shell(catalog, span, MatrixKind::counts);
  for (const auto& bill : bills) {
    const YearMonth ym = year_month_of(bill.create_date);
    if (!span.contains(ym) || !bill.health_area) continue;
    if (const auto idx = catalog.index_of(*bill.health_area)) {
      matrix.values[*idx][static_cast<std::size_t>(months_between(span.first, ym))] += 1.0;
    }
  }
  return matrix;
}

CategoryMatrix bill_monthly_share(const std::vector<BillRecord>& bills,
                                  const CategoryCatalog& catalog, const MonthSpan& span) {
  CategoryMatrix matrix = bill_matrix_shell(catalog, span, MatrixKind::shares);
  std::vector<double> monthly_totals(span.length(), 0.0);
  for (const auto& bill : bills) {
    const YearMonth ym = year_month_of(bill.create_date);
    if (!span.contains(ym)) continue;
    const auto t = static_cast<std::size_t>(months_between(span.first, ym));
    monthly_totals[t] += 1.0;
    if (!bill.health_area) continue;
    if (const auto idx = catalog.index_of(*bill.health_area)) matrix.values[*idx][t] += 1.0;
  }
  for (std::size_t c = 0; c < matrix.values.size(); ++c) {
    for (std::size_t t = 0; t < monthly_totals.size(); ++t) {
      // months with zero bills report 0 shares
      matrix.values[c][t] =
          monthly_totals[t] == 0.0 ? 0.0 : 100.0 * matrix.values[c][t] / monthly_totals[t];
    }
  }
  return matrix;
}

KeywordDictionary KeywordDictionary::load_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("keyword dictionary: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("order") || !doc["order"].is_array())
    throw ConfigError("keyword dictionary must be an object with an \"order\" array");

  KeywordDictionary dict;
  for (const auto& label_node : doc["order"]) {
    if (!label_node.is_string())
      throw ConfigError("keyword dictionary: \"order\" entries must be strings");
    const std::string label = label_node.get<std::string>();
    for (const auto& rule : dict.rules) {
      if (text::normalize_label(rule.label) == text::normalize_label(label))
        throw ConfigError("keyword dictionary: duplicate label \"" + label + "\"");
    }
    if (!doc.contains(label) || !doc[label].is_array())
      throw ConfigError("keyword dictionary: no keyword array for \"" + label + "\"");
    Rule rule;
    rule.label = label;
    for (const auto& kw : doc[label]) {
      if (!kw.is_string() || kw.get<std::string>().empty())
        throw ConfigError("keyword dictionary: keywords must be non-empty strings");
      rule.keywords.push_back(text::to_lower(kw.get<std::string>()));
    }
    if (rule.keywords.empty())
      throw ConfigError("keyword dictionary: empty keyword list for \"" + label + "\"");
    dict.rules.push_back(std::move(rule));
  }
  // every keyword array must be reachable through the order array
  for (const auto& [key, value] : doc.items()) {
    if (key == "order") continue;
    if (std::none_of(dict.rules.begin(), dict.rules.end(),
                     [&](const Rule& r) { return r.label == key; }))
      throw ConfigError("keyword dictionary: label \"" + key + "\" missing from \"order\"");
  }
  return dict;
}

KeywordDictionary KeywordDictionary::load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keyword dictionary: " + path);
  return load_json(in);
}

}  // namespace polichange::ingest
