#include "zbsplinet/io/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace zbsplinet::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, std::string_view context) {
  const auto t = trim(text);
  double v = 0;
  const char* begin = t.data();
  if (!t.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw IoError("cannot parse number '" + std::string(t) + "'" +
                  (context.empty() ? std::string() : " in " + std::string(context)));
  }
  return v;
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw IoError(std::string(source) + ": row " + std::to_string(table.rows.size() + 1) + " has " +
                    std::to_string(cells.size()) + " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw IoError(std::string(source) + ": empty CSV");
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
  close_out(out, path);
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw IoError("header and column count differ for '" + path.string() + "'");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != n) throw IoError("columns of unequal length for '" + path.string() + "'");
  }
  auto out = open_out(path);
  write_header(out, header);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double(columns[c][r]);
    out << '\n';
  }
  close_out(out, path);
}

void write_labelled_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                         const std::vector<std::string>& labels, const std::vector<std::vector<double>>& rows) {
  if (labels.size() != rows.size()) throw IoError("label and row count differ for '" + path.string() + "'");
  auto out = open_out(path);
  write_header(out, header);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << labels[r];
    for (double v : rows[r]) out << ',' << format_double(v);
    out << '\n';
  }
  close_out(out, path);
}

HistogramTable read_histograms(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  if (csv.header.size() < 2) throw IoError(path.string() + ": histogram header needs an id column and bins");
  HistogramTable table;
  for (std::size_t c = 1; c < csv.header.size(); ++c) {
    table.midpoints.push_back(parse_double(csv.header[c], path.string() + " header"));
  }
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    table.ids.push_back(csv.rows[r][0]);
    std::vector<double> f;
    for (std::size_t c = 1; c < csv.rows[r].size(); ++c) {
      f.push_back(parse_double(csv.rows[r][c], path.string() + " row " + std::to_string(r + 1)));
    }
    table.freqs.push_back(std::move(f));
  }
  return table;
}

void write_histograms(const std::filesystem::path& path, const HistogramTable& table) {
  std::vector<std::string> header{"id"};
  for (double m : table.midpoints) header.push_back(format_double(m));
  write_labelled_rows(path, header, table.ids, table.freqs);
}

std::vector<double> read_knots_file(const std::filesystem::path& path) {
  std::string text = read_text(path);
  for (auto& ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  }
  std::vector<double> knots;
  std::istringstream ss(text);
  std::string token;
  while (ss >> token) knots.push_back(parse_double(token, path.string()));
  return knots;
}

}  // namespace zbsplinet::io
