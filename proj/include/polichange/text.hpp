#ifndef POLICHANGE_TEXT_HPP
#define POLICHANGE_TEXT_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace polichange::text {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Canonical key for case-insensitive label comparison.
inline std::string normalize_label(std::string_view s) { return to_lower(trim(s)); }

// Lowercase filesystem-safe name: non-alphanumerics collapse to single '_'.
inline std::string slugify(std::string_view s) {
  std::string out;
  bool pending_sep = false;
  for (unsigned char c : trim(s)) {
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_sep = true;
    }
  }
  return out;
}

}  // namespace polichange::text

#endif
