#include "polichange/csv.hpp"

#include <iterator>

#include "polichange/errors.hpp"

namespace polichange::csv {

Reader::Reader(std::istream& in) {
  if (!in) throw IoError("csv: unreadable input stream");
  buffer_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("csv: read failure");
}

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (pos_ >= buffer_.size()) return false;

  std::string field;
  bool quoted = false;
  while (pos_ < buffer_.size()) {
    const char c = buffer_[pos_];
    if (quoted) {
      if (c == '"') {
        if (pos_ + 1 < buffer_.size() && buffer_[pos_ + 1] == '"') {
          field.push_back('"');
          pos_ += 2;
        } else {
          quoted = false;
          ++pos_;
        }
      } else {
        field.push_back(c);
        ++pos_;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        ++pos_;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        ++pos_;
        break;
      case '\r':
        if (pos_ + 1 < buffer_.size() && buffer_[pos_ + 1] == '\n') ++pos_;
        [[fallthrough]];
      case '\n':
        ++pos_;
        fields.push_back(std::move(field));
        ++record_number_;
        return true;
      default:
        field.push_back(c);
        ++pos_;
    }
  }
  // final record without trailing newline
  fields.push_back(std::move(field));
  ++record_number_;
  return true;
}

std::string escape(std::string_view field) {
  const bool needs_quoting = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quoting) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace polichange::csv
