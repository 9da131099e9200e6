#ifndef POLICHANGE_INGEST_HPP
#define POLICHANGE_INGEST_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "polichange/dates.hpp"
#include "polichange/errors.hpp"
#include "polichange/series.hpp"

namespace polichange::ingest {

// One 311-style complaint event.
struct ServiceRequestRecord {
  CivilDate created_date;
  int seconds_of_day = -1;  // retained from the timestamp, unused downstream
  std::string complaint_type;
};

// One legislative bill.
struct BillRecord {
  CivilDate create_date;
  std::string title;
  std::string subject;
  std::optional<std::string> health_area;  // absent = unclassified ("N/A")
};

// Complaint categories retained for analysis, ordered by descending frequency.
struct CategoryCatalog {
  struct Entry {
    std::string label;
    double frequency = 0.0;  // fraction of all records, in [0, 1]
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.size() == 0; }
  std::size_t size() const { return entries.size(); }
  // Case-insensitive, whitespace-trimmed lookup.
  std::optional<std::size_t> index_of(std::string_view raw_label) const;
};

// Ordered first-match-wins rules mapping lowercase keywords to a category.
struct KeywordDictionary {
  struct Rule {
    std::string label;
    std::vector<std::string> keywords;  // stored lowercase
  };
  std::vector<Rule> rules;

  // Loads {"order": [labels...], "<label>": ["keyword", ...], ...}.
  // Throws ConfigError on duplicate labels, empty keyword lists, or labels
  // missing from/extra to the order array.
  static KeywordDictionary load_json(std::istream& in);
  static KeywordDictionary load_json_file(const std::string& path);
};

struct RequestSchema {
  std::string date_column = "Created Date";
  std::string date_format = "%m/%d/%Y %I:%M:%S %p";
  std::string type_column = "Complaint Type";
};

struct BillSchema {
  std::string date_column = "Create Date";
  std::string date_format = "%Y-%m-%d";
  std::string title_column = "Bill Title";
  std::string subject_column = "Bill Subject";
  std::string area_column = "Health Area";  // optional in the file
};

struct RowRejection {
  std::size_t row_number = 0;  // 1-based data row, header excluded
  std::string reason;
};

template <typename Record>
struct ParseOutcome {
  std::vector<Record> records;
  std::vector<RowRejection> rejected;
};

// Parses a header-bearing CSV of service requests. Malformed rows are
// collected in `rejected` unless `strict`, in which case the first one
// throws ParseError naming the row.
ParseOutcome<ServiceRequestRecord> parse_requests(std::istream& in, const RequestSchema& schema,
                                                  bool strict = false);

// Same contract for bills. A missing subject/area column is tolerated; a
// missing date or title column is a ConfigError.
ParseOutcome<BillRecord> parse_bills(std::istream& in, const BillSchema& schema,
                                     bool strict = false);

// Deterministic order-preserving pick of n distinct positions out of `size`.
std::vector<std::size_t> subsample_indices(std::size_t size, std::size_t n, std::uint64_t seed);

template <typename Record>
std::vector<Record> subsample(const std::vector<Record>& records, std::size_t n,
                              std::uint64_t seed) {
  if (n == 0) throw ArgumentError("subsample: n must be positive");
  if (n >= records.size()) return records;
  std::vector<Record> out;
  out.reserve(n);
  for (const std::size_t i : subsample_indices(records.size(), n, seed)) out.push_back(records[i]);
  return out;
}

// Most frequent complaint types: descending frequency, ties alphabetical,
// every retained entry has frequency >= min_fraction of ALL records.
CategoryCatalog select_top_categories(const std::vector<ServiceRequestRecord>& records,
                                      std::size_t max_categories = 13,
                                      double min_fraction = 0.005);

// Monthly counts per catalog category. Without an explicit span the range is
// the min..max month over in-catalog records.
CategoryMatrix bin_monthly(const std::vector<ServiceRequestRecord>& records,
                           const CategoryCatalog& catalog,
                           std::optional<MonthSpan> span = std::nullopt);

// First rule whose keyword occurs (case-insensitively) in the title.
std::optional<std::string> classify_bill(const BillRecord& bill, const KeywordDictionary& dict);

// Fills health_area on every bill in place.
void classify_bills(std::vector<BillRecord>& bills, const KeywordDictionary& dict);

// Monthly counts of bills per catalog category over `span`.
CategoryMatrix bill_monthly_counts(const std::vector<BillRecord>& bills,
                                   const CategoryCatalog& catalog, const MonthSpan& span);

// Percentage of each month's bills targeting each category; months with no
// bills at all yield 0 for every category.
CategoryMatrix bill_monthly_share(const std::vector<BillRecord>& bills,
                                  const CategoryCatalog& catalog, const MonthSpan& span);

}  // namespace polichange::ingest

#endif
