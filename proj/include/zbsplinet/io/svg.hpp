#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace zbsplinet::io {

struct Series {
  std::string name;
  std::vector<double> ys;
};

/// Minimal line plot: one polyline per series over shared abscissae,
/// framed axes with end-point tick labels.
std::string render_svg(const std::vector<double>& xs, const std::vector<Series>& series, const std::string& title);

void write_svg(const std::filesystem::path& path, const std::vector<double>& xs, const std::vector<Series>& series,
               const std::string& title);

}  // namespace zbsplinet::io
