#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthetic.hpp"
#include "zbsplinet.hpp"
#include "zbsplinet/io/csv.hpp"

namespace fs = std::filesystem;
using namespace zbsplinet;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "zbsplinet_test_cli";

struct Outcome {
  int code;
  std::string err;
};

Outcome run(const std::string& args) {
  fs::create_directories(kRoot);
  const auto err = kRoot / "stderr.txt";
  const std::string cmd = std::string(ZBSPLINET_CLI) + " " + args + " > " + (kRoot / "stdout.txt").string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_text(err)};
}

std::string dir(const std::string& name) {
  const auto d = kRoot / name;
  fs::remove_all(d);
  return d.string();
}

/// Histograms of random smooth densities on the 19 bins 2, 7, ..., 92.
std::string write_input(const std::string& name, int n, unsigned seed) {
  std::mt19937 rng(seed);
  io::HistogramTable t;
  t.midpoints = synthetic::bin_midpoints();
  for (int i = 0; i < n; ++i) {
    t.ids.push_back("s" + std::to_string(i));
    t.freqs.push_back(synthetic::histogram(synthetic::random_density(rng, 0, 95), t.midpoints).freqs);
  }
  fs::create_directories(kRoot);
  const auto p = kRoot / name;
  io::write_histograms(p, t);
  return p.string();
}

std::vector<double> numeric_column(const io::CsvTable& t, std::size_t c) {
  std::vector<double> out;
  for (const auto& r : t.rows) out.push_back(io::parse_double(r[c]));
  return out;
}

const std::string kHistogramKnots = "-k 2 -g 7 --domain 0,95";

}  // namespace

TEST_CASE("basis column counts") {
  auto d = dir("basis_k1");
  REQUIRE(run("basis -k 1 -g 29 --ortho splinet -o " + d).code == 0);
  CHECK(io::read_csv(fs::path(d) / "basis.csv").header.size() == 31);
  d = dir("basis_k2");
  REQUIRE(run("basis " + kHistogramKnots + " --svg -o " + d).code == 0);
  const auto t = io::read_csv(fs::path(d) / "basis.csv");
  CHECK(t.header.size() == 10);
  CHECK(t.header[0] == "x");
  CHECK(t.rows.size() == 501);
  CHECK(fs::exists(fs::path(d) / "basis.svg"));
  CHECK(fs::exists(fs::path(d) / "manifest.json"));
}

TEST_CASE("validation and I/O exit codes") {
  auto r = run("basis -k 0 -g 0 -o " + dir("degenerate"));
  CHECK(r.code == 2);
  CHECK(r.err.find("DegenerateSpace") != std::string::npos);
  r = run("bench -k 2 -g 10 --strategy splinet -o " + dir("nondyadic"));
  CHECK(r.code == 2);
  CHECK(r.err.find("NonDyadicKnots") != std::string::npos);
  r = run("smooth " + (kRoot / "no_such_file.csv").string() + " " + kHistogramKnots + " -o " + dir("missing"));
  CHECK(r.code == 3);
  CHECK(r.err.find("IoError") != std::string::npos);
  CHECK(run("basis -k 2 -g 7 --bogus").code == 2);
  CHECK(run("smooth " + write_input("one.csv", 1, 1) + " " + kHistogramKnots + " --alpha 0 -o " + dir("alpha")).code == 2);
  r = run("fpca " + write_input("single.csv", 1, 2) + " " + kHistogramKnots + " -o " + dir("single"));
  CHECK(r.code == 2);
  CHECK(r.err.find("TooFewObservations") != std::string::npos);
}

TEST_CASE("rank-check failure names the interlacing index") {
  fs::create_directories(kRoot);
  const auto p = kRoot / "sparse_bins.csv";
  io::write_text(p, "id,10,20,30\nh,0.2,0.3,0.5\n");
  const auto r = run("smooth " + p.string() + " " + kHistogramKnots + " -o " + dir("rank"));
  CHECK(r.code == 2);
  CHECK(r.err.find("InfeasibleDesign") != std::string::npos);
  CHECK(r.err.find("index") != std::string::npos);
}

TEST_CASE("uniform histogram gives the uniform density") {
  fs::create_directories(kRoot);
  const auto p = kRoot / "uniform.csv";
  io::HistogramTable t{synthetic::bin_midpoints(), {"u"}, {std::vector<double>(19, 1.0 / 19)}};
  io::write_histograms(p, t);
  const auto d = dir("uniform");
  REQUIRE(run("smooth " + p.string() + " " + kHistogramKnots + " -o " + d).code == 0);
  for (double v : numeric_column(io::read_csv(fs::path(d) / "densities.csv"), 1)) CHECK(std::abs(v - 1.0 / 95) < 1e-12);
}

TEST_CASE("smooth output shapes, strategy invariance and round trip") {
  const auto two = write_input("two.csv", 2, 3);
  auto d = dir("two");
  REQUIRE(run("smooth " + two + " " + kHistogramKnots + " -o " + d).code == 0);
  const auto coeffs = io::read_csv(fs::path(d) / "coefficients.csv");
  CHECK(coeffs.rows.size() == 2);
  CHECK(coeffs.header.size() == 10);

  const auto input = write_input("ten.csv", 10, 4);
  std::vector<io::CsvTable> dens;
  std::vector<std::string> bytes;
  for (const std::string s : {"gs-lr", "gs-rl", "gs-two-sided", "splinet"}) {
    d = dir("inv_" + s);
    REQUIRE(run("smooth " + input + " " + kHistogramKnots + " --strategy " + s + " -o " + d).code == 0);
    dens.push_back(io::read_csv(fs::path(d) / "densities.csv"));
    bytes.push_back(io::read_text(fs::path(d) / "densities.csv"));
  }
  for (std::size_t s = 1; s < dens.size(); ++s) {
    double worst = 0;
    for (std::size_t c = 1; c <= 10; ++c) {
      const auto a = numeric_column(dens[0], c);
      const auto b = numeric_column(dens[s], c);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    CHECK(worst < 1e-8);
  }
  CHECK(bytes[0] != bytes[3]);

  // coefficients re-read and re-expanded reproduce the written clr curves
  const auto coeff_tab = io::read_csv(fs::path(d) / "coefficients.csv");
  const auto curves = io::read_csv(fs::path(d) / "clr_curves.csv");
  const auto basis = orthogonalize(make_equispaced_knots(0.0, 95.0, 7, 2), Strategy::Splinet);
  const auto xs = numeric_column(curves, 0);
  CHECK(xs == uniform_grid(0.0, 95.0, 501));
  for (std::size_t r = 0; r < coeff_tab.rows.size(); ++r) {
    VectorX<double> o(9);
    for (int j = 0; j < 9; ++j) o(j) = io::parse_double(coeff_tab.rows[r][static_cast<std::size_t>(j) + 1]);
    const VectorX<double> v = basis.expand(o).evaluate(xs);
    const auto written = numeric_column(curves, r + 1);
    double worst = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(v(static_cast<Eigen::Index>(i)) - written[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("runs are deterministic") {
  const auto input = write_input("det.csv", 8, 5);
  const auto a = dir("det_a");
  const auto b = dir("det_b");
  REQUIRE(run("fpca " + input + " " + kHistogramKnots + " --sparsity-grid 0:0.25:1 -o " + a).code == 0);
  REQUIRE(run("fpca " + input + " " + kHistogramKnots + " --sparsity-grid 0:0.25:1 -o " + b).code == 0);
  for (const auto* f : {"coefficients.csv", "eigenvalues.csv", "loadings.csv", "pc_curves.csv", "active_mask.csv",
                        "sparse_explained.csv", "sparse_active_counts.csv"}) {
    CHECK_MESSAGE(io::read_text(fs::path(a) / f) == io::read_text(fs::path(b) / f), f);
  }
}

TEST_CASE("fpca outputs") {
  const auto input = write_input("fifty.csv", 50, 6);
  const auto d = dir("fpca");
  REQUIRE(run("fpca " + input + " " + kHistogramKnots + " --sparsity-grid 0:0.1:1 -o " + d).code == 0);
  const auto eig = io::read_csv(fs::path(d) / "eigenvalues.csv");
  double sum = 0;
  for (double v : numeric_column(eig, 2)) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-12);
  const auto counts = io::read_csv(fs::path(d) / "sparse_active_counts.csv");
  const auto expl = io::read_csv(fs::path(d) / "sparse_explained.csv");
  CHECK(counts.rows.size() == 11);
  const auto c1 = numeric_column(counts, 1);
  const auto e1 = numeric_column(expl, 1);
  for (std::size_t i = 1; i < c1.size(); ++i) {
    CHECK(c1[i] <= c1[i - 1]);
    CHECK(e1[i] <= e1[i - 1] + 1e-12);
  }
  const auto pcs = io::read_csv(fs::path(d) / "pc_curves.csv");
  CHECK(pcs.header == std::vector<std::string>{"x", "mean", "PC1", "PC2", "PC3"});

  // identical observations: zero eigenvalues and empty masks
  fs::create_directories(kRoot);
  const auto same = kRoot / "same.csv";
  io::HistogramTable t{synthetic::bin_midpoints(), {"a", "b", "c"}, {}};
  std::mt19937 rng(9);
  const auto h = synthetic::histogram(synthetic::random_density(rng, 0, 95), t.midpoints).freqs;
  t.freqs = {h, h, h};
  io::write_histograms(same, t);
  const auto ds = dir("same");
  REQUIRE(run("fpca " + same.string() + " " + kHistogramKnots + " -o " + ds).code == 0);
  for (double v : numeric_column(io::read_csv(fs::path(ds) / "eigenvalues.csv"), 1)) CHECK(v == 0.0);
  const auto mask = io::read_csv(fs::path(ds) / "active_mask.csv");
  for (std::size_t c = 1; c < mask.header.size(); ++c) {
    for (double v : numeric_column(mask, c)) CHECK(v == 0.0);
  }
}

TEST_CASE("bench table") {
  const auto d = dir("bench");
  REQUIRE(run("bench -k 2 -g 7,19 --domain 0,95 --collocation-points 2:5:92 -o " + d).code == 0);
  const auto t = io::read_csv(fs::path(d) / "table1.csv");
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[3] == std::vector<std::string>{"splinet", "63", "243", "114", "169"});
  CHECK(t.rows[0] == std::vector<std::string>{"gs-lr", "81", "441", "122", "238"});
  const auto b = io::read_csv(fs::path(d) / "bench.csv");
  CHECK(b.rows.size() == 8);
  for (const auto& r : b.rows) {
    if (r[2] == "gs-lr" || r[2] == "gs-rl") CHECK(r[5] == r[6]);
    CHECK(std::abs(io::parse_double(r[3]) - io::parse_double(r[4])) < 1e-12);
  }
  const auto p = dir("plot");
  fs::create_directories(p);
  REQUIRE(run("basis " + kHistogramKnots + " -o " + p).code == 0);
  REQUIRE(run("plot " + (fs::path(p) / "basis.csv").string() + " --title basis").code == 0);
  CHECK(fs::exists(fs::path(p) / "basis.svg"));
}
