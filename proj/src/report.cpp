#include "polichange/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polichange/csv.hpp"
#include "polichange/errors.hpp"
#include "polichange/text.hpp"

namespace polichange::report {

namespace {

using nlohmann::json;

std::string format_double(double v, int precision) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

// Shortest representation that parses back to the same double.
std::string format_double_shortest(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool integral(double v) { return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15; }

std::string format_cell(double v) {
  if (integral(v)) return std::to_string(static_cast<long long>(v));
  return format_double_shortest(v);
}

void dump(const json& node, std::string& out, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (node.type()) {
    case json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, value] : node.items()) {
        out += inner;
        out += json(key).dump();
        out += ": ";
        dump(value, out, depth + 1);
        if (++i != node.size()) out += ",";
        out += "\n";
      }
      out += indent + "}";
      return;
    }
    case json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        out += inner;
        dump(node[i], out, depth + 1);
        if (i + 1 != node.size()) out += ",";
        out += "\n";
      }
      out += indent + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = node.get<double>();
      if (!std::isfinite(v)) throw ArgumentError("report: non-finite number in JSON output");
      out += format_double(v, 17);
      return;
    }
    default:
      out += node.dump();  // integers, strings, booleans, null
  }
}

json span_json(const MonthSpan& span) {
  return {{"first", format_year_month(span.first)}, {"last", format_year_month(span.last)}};
}

json chi_square_json(const stats::ChiSquareResult& r) {
  return {{"statistic", r.statistic},
          {"degrees_of_freedom", r.degrees_of_freedom},
          {"p_value", r.p_value},
          {"expected", "uniform-per-year"}};
}

json association_json(const stats::AssociationResult& r) {
  return {{"observed_statistic", r.observed_statistic},
          {"permutations", r.permutation_count},
          {"p_value", r.p_value},
          {"window_months", r.window_months}};
}

void write_file(const std::filesystem::path& destination, const std::string& bytes) {
  if (destination.has_parent_path()) std::filesystem::create_directories(destination.parent_path());
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + destination.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure: " + destination.string());
}

}  // namespace

json to_json(const AnalysisReport& report) {
  json doc;
  doc["schema"] = report.schema_version;
  doc["metadata"] = {{"seed", report.seed},
                     {"config_digest", report.config_digest},
                     {"config", report.config}};
  if (report.generated_at) doc["metadata"]["generated_at"] = *report.generated_at;
  auto& stages = doc["metadata"]["stages"] = json::array();
  for (const auto& s : report.stages) {
    json stage = {{"name", s.name},
                  {"records_in", s.records_in},
                  {"records_out", s.records_out},
                  {"dropped", s.dropped}};
    if (!s.note.empty()) stage["note"] = s.note;
    stages.push_back(std::move(stage));
  }

  auto& catalog = doc["catalog"] = json::array();
  for (const auto& entry : report.catalog.entries)
    catalog.push_back({{"label", entry.label}, {"frequency", entry.frequency}});
  doc["request_span"] = span_json(report.request_span);

  json corr;
  corr["labels"] = report.correlation.labels;
  auto& rows = corr["values"] = json::array();
  for (std::size_t i = 0; i < report.correlation.values.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < report.correlation.values[i].size(); ++j) {
      if (report.correlation.defined(i, j))
        row.push_back(report.correlation.values[i][j]);
      else
        row.push_back(nullptr);  // undefined stays missing, never coerced to 0
    }
    rows.push_back(std::move(row));
  }
  doc["correlation"] = std::move(corr);

  auto& groups = doc["groups"] = json::array();
  for (const auto& members : report.groups)
    groups.push_back({{"label", stats::group_label(members)}, {"members", members}});

  auto& analyses = doc["analyses"] = json::array();
  for (const auto& a : report.analyses) {
    json node;
    node["label"] = a.label;
    node["members"] = a.members;
    node["monthly_counts"] = a.monthly_counts;
    node["seasonal_profile"] = {{"period", a.profile.period}, {"offsets", a.profile.offsets}};
    node["deseasonalized"] = a.deseasonalized;
    node["penalty"] = a.penalty;
    node["segmentation_cost"] = a.segmentation_cost;
    auto& dividers = node["dividers"] = json::array();
    for (const auto& d : a.dividers) {
      dividers.push_back({{"index", d.index},
                          {"month", format_year_month(d.month)},
                          {"direction", d.direction}});
    }
    node["bills_per_year"] = a.bills_per_year ? chi_square_json(*a.bills_per_year) : json(nullptr);
    node["association"] = a.association ? association_json(*a.association) : json(nullptr);
    analyses.push_back(std::move(node));
  }

  json bills;
  bills["total"] = report.bills_total;
  bills["classified"] = report.bills_classified;
  bills["unclassified"] = report.bills_total - report.bills_classified;
  json tallies = json::object();
  for (const auto& [label, count] : report.bill_tallies) tallies[label] = count;
  bills["tallies"] = std::move(tallies);
  bills["span"] = report.bill_span ? span_json(*report.bill_span) : json(nullptr);
  doc["bills"] = std::move(bills);
  doc["association_span"] =
      report.association_span ? span_json(*report.association_span) : json(nullptr);
  return doc;
}

std::string serialize_json(const json& value) {
  std::string out;
  dump(value, out, 0);
  out.push_back('\n');
  return out;
}

void emit_report_json(const AnalysisReport& report, const std::filesystem::path& destination) {
  emit_report_json(to_json(report), destination);
}

void emit_report_json(const json& report, const std::filesystem::path& destination) {
  write_file(destination, serialize_json(report));
}

void emit_series_csv(const CategoryMatrix& matrix, const std::filesystem::path& destination) {
  matrix.validate();
  std::string out = "month";
  for (const auto& label : matrix.categories) {
    out.push_back(',');
    out += csv::escape(label);
  }
  out.push_back('\n');
  for (std::size_t t = 0; t < matrix.months(); ++t) {
    out += format_year_month(matrix.month_at(t));
    for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
      out.push_back(',');
      out += format_cell(matrix.values[c][t]);
    }
    out.push_back('\n');
  }
  write_file(destination, out);
}

CategoryMatrix parse_series_csv(std::istream& in, MatrixKind kind) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row.size() < 2)
    throw ParseError("series csv: expected a header with a month column and categories");
  CategoryMatrix matrix;
  matrix.kind = kind;
  matrix.categories.assign(row.begin() + 1, row.end());
  matrix.values.assign(matrix.categories.size(), {});

  bool first = true;
  YearMonth expected{};
  while (reader.next(row)) {
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    if (row.size() != matrix.categories.size() + 1)
      throw ParseError("series csv: ragged row " + std::to_string(reader.record_number()));
    const auto ym = parse_year_month(text::trim(row[0]));
    if (!ym) throw ParseError("series csv: bad month \"" + row[0] + "\"");
    if (first) {
      matrix.start_month = *ym;
      first = false;
    } else if (*ym != expected) {
      throw ParseError("series csv: months must be contiguous");
    }
    expected = add_months(*ym, 1);
    for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
      const std::string cell(text::trim(row[c + 1]));
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("series csv: bad number \"" + cell + "\"");
      matrix.values[c].push_back(value);
    }
  }
  if (first) throw ParseError("series csv: no data rows");
  return matrix;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::string& label, YearMonth start_month,
                       std::span<const double> values, const std::vector<std::size_t>& dividers) {
  if (values.empty()) throw ArgumentError("svg: empty series");
  constexpr int kWidth = 880, kHeight = 320;
  constexpr double kLeft = 56, kRight = 16, kTop = 28, kBottom = 40;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t t_count = values.size();

  double lo = values[0], hi = values[0];
  for (const double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const auto x_at = [&](double t) {
    if (t_count == 1) return kLeft + plot_w / 2.0;
    return kLeft + t * plot_w / static_cast<double>(t_count - 1);
  };
  const auto y_at = [&](double v) { return kTop + (hi - v) * plot_h / (hi - lo); };
  const auto fmt = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "  <title>" << xml_escape(label) << "</title>\n";
  svg << "  <text x=\"" << fmt(kLeft) << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(label) << "</text>\n";
  svg << "  <rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#888\"/>\n";

  // y ticks: five evenly spaced levels
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg << "  <text x=\"4\" y=\"" << fmt(y_at(v) + 4) << "\" font-family=\"sans-serif\""
        << " font-size=\"10\">" << format_double(v, 6) << "</text>\n";
  }
  // x ticks at each January
  for (std::size_t t = 0; t < t_count; ++t) {
    const YearMonth ym = add_months(start_month, static_cast<int>(t));
    if (ym.month != 1) continue;
    svg << "  <text x=\"" << fmt(x_at(static_cast<double>(t)) - 14) << "\" y=\""
        << fmt(kHeight - 14) << "\" font-family=\"sans-serif\" font-size=\"10\">" << ym.year
        << "</text>\n";
  }

  svg << "  <polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t t = 0; t < t_count; ++t) {
    if (t != 0) svg << ' ';
    svg << fmt(x_at(static_cast<double>(t))) << ',' << fmt(y_at(values[t]));
  }
  svg << "\"/>\n";

  for (const std::size_t d : dividers) {
    const double x = x_at(static_cast<double>(d));
    svg << "  <line class=\"divider\" x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
        << fmt(x) << "\" y2=\"" << fmt(kTop + plot_h)
        << "\" stroke=\"#c23\" stroke-dasharray=\"5 4\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg_chart(const std::string& label, YearMonth start_month,
                     std::span<const double> values, const std::vector<std::size_t>& dividers,
                     const std::filesystem::path& destination) {
  write_file(destination, render_svg(label, start_month, values, dividers));
}

void render_svg_charts(const CategoryMatrix& matrix,
                       const std::vector<std::vector<std::size_t>>& dividers_per_category,
                       const std::filesystem::path& directory) {
  if (dividers_per_category.size() != matrix.categories.size())
    throw ArgumentError("svg: one divider list required per category");
  for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
    const std::string body = render_svg(matrix.categories[c], matrix.start_month, matrix.row(c),
                                        dividers_per_category[c]);
    write_file(directory / (text::slugify(matrix.categories[c]) + ".svg"), body);
  }
}

}  // namespace polichange::report
