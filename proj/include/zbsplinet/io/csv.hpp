#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zbsplinet::io {

/// File-system or parse failure of an input/output file.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error("IoError: " + msg) {}
};

/// Shortest-safe decimal text: 17 significant digits, '.' separator,
/// independent of the locale.
std::string format_double(double v);

/// Parses a full token as a double; throws IoError on trailing junk.
double parse_double(std::string_view text, std::string_view context = "");

/// Raw CSV: header plus string cells. Blank lines are skipped; cells are
/// trimmed; quoting is not supported.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view text, std::string_view source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes named numeric columns of equal length.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

/// Writes rows that start with a text label followed by numbers.
void write_labelled_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                         const std::vector<std::string>& labels, const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Wide histogram file: header `id,x_1,...,x_n`, rows `label,f_1,...,f_n`.
struct HistogramTable {
  std::vector<double> midpoints;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> freqs;
};

HistogramTable read_histograms(const std::filesystem::path& path);
void write_histograms(const std::filesystem::path& path, const HistogramTable& table);

/// Inner knots separated by commas, whitespace or newlines.
std::vector<double> read_knots_file(const std::filesystem::path& path);

}  // namespace zbsplinet::io
