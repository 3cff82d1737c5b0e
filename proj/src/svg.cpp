#include "zbsplinet/io/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "zbsplinet/io/csv.hpp"

namespace zbsplinet::io {
namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 500;
constexpr double kMargin = 60;
constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v, int digits = 2) {
  std::array<char, 48> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  return std::string(buf.data(), res.ptr);
}

std::string label(double v) {
  std::array<char, 48> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
  return std::string(buf.data(), res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<double>& xs, const std::vector<Series>& series, const std::string& title) {
  if (xs.size() < 2) throw IoError("plot needs at least two abscissae");
  for (const auto& s : series) {
    if (s.ys.size() != xs.size()) throw IoError("series '" + s.name + "' length differs from abscissae");
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const double xmin = *xmin_it;
  const double xmax = *xmax_it > xmin ? *xmax_it : xmin + 1;
  double ymin = 0;
  double ymax = 0;
  bool first = true;
  for (const auto& s : series) {
    for (double y : s.ys) {
      if (!std::isfinite(y)) continue;
      ymin = first ? y : std::min(ymin, y);
      ymax = first ? y : std::max(ymax, y);
      first = false;
    }
  }
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto px = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); };
  const auto py = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
      << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (ymin < 0 && ymax > 0) {
    out << "<line x1=\"" << kMargin << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
        << fixed(py(0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  }
  const auto tick = [&](double x, double y, const char* anchor, const std::string& text) {
    out << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" text-anchor=\"" << anchor
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(text) << "</text>\n";
  };
  tick(kMargin, kHeight - kMargin + 18, "start", label(xmin));
  tick(kWidth - kMargin, kHeight - kMargin + 18, "end", label(xmax));
  tick(kMargin - 6, kHeight - kMargin, "end", label(ymin));
  tick(kMargin - 6, kMargin + 10, "end", label(ymax));
  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[s % kPalette.size()] << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(series[s].ys[i])) continue;
      out << fixed(px(xs[i])) << ',' << fixed(py(series[s].ys[i])) << ' ';
    }
    out << "\"><title>" << escape(series[s].name) << "</title></polyline>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::filesystem::path& path, const std::vector<double>& xs, const std::vector<Series>& series,
               const std::string& title) {
  write_text(path, render_svg(xs, series, title));
}

}  // namespace zbsplinet::io
