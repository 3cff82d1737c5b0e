#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "zbsplinet/io/csv.hpp"
#include "zbsplinet/io/svg.hpp"

using namespace zbsplinet::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "zbsplinet_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("17-digit text round-trips doubles exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  for (double v : {0.0, -0.0, 1.0, 0.1, std::numeric_limits<double>::min(), std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min()}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("number parsing rejects junk") {
  CHECK(parse_double(" 2.5 ") == 2.5);
  CHECK(parse_double("+3") == 3.0);
  CHECK(parse_double("1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_double(""), IoError);
  CHECK_THROWS_AS(parse_double("1.2x"), IoError);
  CHECK_THROWS_AS(parse_double("abc", "cell"), IoError);
  try {
    parse_double("abc", "cell");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).rfind("IoError:", 0) == 0);
    CHECK(std::string(e.what()).find("cell") != std::string::npos);
  }
}

TEST_CASE("CSV parsing") {
  const auto t = parse_csv("a, b ,c\r\n1,2,3\n\n4,5,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][2] == "6");
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), IoError);
  CHECK_THROWS_AS(parse_csv("\n\n"), IoError);
  CHECK_THROWS_AS(read_csv(scratch("does_not_exist.csv")), IoError);
}

TEST_CASE("columns and labelled rows round-trip") {
  const auto p = scratch("cols.csv");
  const std::vector<double> x{0.1, 1.0 / 3.0, -2e-17};
  const std::vector<double> y{std::exp(1.0), 0.0, 1e300};
  write_columns(p, {"x", "y"}, {x, y});
  const auto t = read_csv(p);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(parse_double(t.rows[r][0]) == x[r]);
    CHECK(parse_double(t.rows[r][1]) == y[r]);
  }
  CHECK_THROWS_AS(write_columns(p, {"x"}, {x, y}), IoError);
  CHECK_THROWS_AS(write_columns(p, {"x", "y"}, {x, {1.0}}), IoError);
  CHECK_THROWS_AS(write_labelled_rows(p, {"id", "v"}, {"a", "b"}, {{1.0}}), IoError);
  CHECK_THROWS_AS(write_columns(scratch("missing_dir") / "x.csv", {"x"}, {x}), IoError);
}

TEST_CASE("histogram files") {
  const auto p = scratch("hist.csv");
  HistogramTable h{{2, 7, 12}, {"c1", "c2"}, {{0.2, 0.3, 0.5}, {0.0, 0.25, 0.75}}};
  write_histograms(p, h);
  const auto back = read_histograms(p);
  CHECK(back.midpoints == h.midpoints);
  CHECK(back.ids == h.ids);
  CHECK(back.freqs == h.freqs);
  write_text(p, "id\nc1\n");
  CHECK_THROWS_AS(read_histograms(p), IoError);
  write_text(p, "id,1,2\nc1,0.5,oops\n");
  CHECK_THROWS_AS(read_histograms(p), IoError);
}

TEST_CASE("knots file separators") {
  const auto p = scratch("knots.txt");
  write_text(p, "10, 20\n30\t40\r\n 50 ");
  CHECK(read_knots_file(p) == std::vector<double>{10, 20, 30, 40, 50});
  write_text(p, "10,x");
  CHECK_THROWS_AS(read_knots_file(p), IoError);
}

TEST_CASE("SVG rendering") {
  const std::vector<double> xs{0, 1, 2, 3};
  const auto svg = render_svg(xs, {{"up", {0, 1, 2, 3}}, {"down", {3, 2, 1, 0}}}, "demo & test");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t lines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
  CHECK(lines == 2);
  CHECK(svg.find("demo &amp; test") != std::string::npos);
  const auto flat = render_svg(xs, {{"c", {1, 1, 1, 1}}}, "flat");
  CHECK(flat.find("nan") == std::string::npos);
  const auto p = scratch("plot.svg");
  write_svg(p, xs, {{"up", {0, 1, 2, 3}}}, "t");
  CHECK(read_text(p).find("<polyline") != std::string::npos);
}
