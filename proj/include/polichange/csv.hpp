#ifndef POLICHANGE_CSV_HPP
#define POLICHANGE_CSV_HPP

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace polichange::csv {

// RFC-4180 record reader: comma-delimited, double-quote quoting with "" escapes,
// quoted fields may span physical lines. Accepts LF and CRLF endings.
class Reader {
 public:
  explicit Reader(std::istream& in);

  // Fills `fields` with the next logical record. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  // 1-based index of the record most recently returned by next().
  std::size_t record_number() const { return record_number_; }

 private:
  std::string buffer_;
  std::size_t pos_ = 0;
  std::size_t record_number_ = 0;
};

// Quotes a value when it contains commas, quotes, or line breaks.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace polichange::csv

#endif
