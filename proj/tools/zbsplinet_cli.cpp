#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zbsplinet.hpp"
#include "zbsplinet/io/csv.hpp"
#include "zbsplinet/io/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace zbsplinet;

namespace {

constexpr const char* kVersion = "1.0.0";

struct KnotOptions {
  int degree = 2;
  std::string inner_knots;
  std::string knots_file;
  std::string domain = "0,1";
};

struct FitOptions {
  double alpha = 0.5;
  int penalty_order = 1;
  std::string strategy = "splinet";
  int grid = 501;
  std::string zero_policy = "reject";
  double zero_epsilon = 0.5;
};

struct Config {
  KnotOptions knots;
  FitOptions fit;
  std::string output_dir = ".";
  std::string input;
  std::string ortho;
  bool svg = false;
  double threshold = 0.1;
  int components = 3;
  std::string sparsity_grid;
  std::string collocation_points;
  std::string strategies = "all";
  double nonzero_threshold = 1e-10;
  std::string plot_output;
  std::string plot_columns;
  std::string title;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidParameter, msg); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    out.push_back(first == std::string::npos ? std::string() : item.substr(first, last - first + 1));
  }
  return out;
}

double to_number(const std::string& s) {
  try {
    return io::parse_double(s);
  } catch (const io::IoError&) {
    invalid("not a number: '" + s + "'");
  }
}

/// `a,b,c` or `start:step:stop` (stop included).
std::vector<double> parse_list(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) invalid("range must be start:step:stop, got '" + text + "'");
    const double start = to_number(parts[0]);
    const double step = to_number(parts[1]);
    const double stop = to_number(parts[2]);
    if (!(step > 0) || stop < start) invalid("range '" + text + "' needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) invalid("range '" + text + "' is too long");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(to_number(p));
  return out;
}

int to_count(double v, const std::string& what) {
  if (v < 0 || v != std::floor(v) || v > 1e6) invalid(what + " must be a nonnegative integer");
  return static_cast<int>(v);
}

std::pair<double, double> parse_domain(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) invalid("--domain must be a,b");
  return {v[0], v[1]};
}

/// Knot sequences for every requested g (one unless bench lists several).
std::vector<KnotSequence<double>> make_knot_sequences(const KnotOptions& o) {
  const auto [a, b] = parse_domain(o.domain);
  if (!o.knots_file.empty()) {
    if (!o.inner_knots.empty()) invalid("--inner-knots and --knots-file are exclusive");
    auto inner = io::read_knots_file(o.knots_file);
    const int g = static_cast<int>(inner.size());
    return {make_knots<double>(a, b, g, o.degree, std::move(inner))};
  }
  if (o.inner_knots.empty()) invalid("one of --inner-knots or --knots-file is required");
  std::vector<KnotSequence<double>> out;
  for (double g : parse_list(o.inner_knots)) out.push_back(make_equispaced_knots(a, b, to_count(g, "--inner-knots"), o.degree));
  return out;
}

KnotSequence<double> single_knots(const KnotOptions& o) {
  auto all = make_knot_sequences(o);
  if (all.size() != 1) invalid("this command takes a single --inner-knots count");
  return all.front();
}

std::string index_label(const char* prefix, int i) { return std::string(prefix) + "_" + std::to_string(i); }

std::vector<std::string> function_labels(const char* prefix, const KnotSequence<double>& knots) {
  std::vector<std::string> out;
  for (int m = 0; m < zb_dimension(knots); ++m) out.push_back(index_label(prefix, m - knots.degree()));
  return out;
}

std::vector<double> column(const MatrixX<double>& m, Eigen::Index c) {
  return {m.col(c).data(), m.col(c).data() + m.rows()};
}

std::vector<double> row(const MatrixX<double>& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

json knots_json(const KnotSequence<double>& k) {
  return {{"a", k.a()}, {"b", k.b()}, {"degree", k.degree()}, {"g", k.g()}, {"inner", k.inner()}};
}

class Run {
 public:
  Run(std::string command, const Config& cfg, const CLI::App& sub) : command_(std::move(command)), cfg_(cfg) {
    for (const auto* opt : sub.get_options()) {
      if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
      if (opt->count() == 0 && !opt->get_default_str().empty()) defaults_.push_back(opt->get_name());
    }
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw io::IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  }

  fs::path out(const std::string& name) {
    outputs_.push_back(name);
    return fs::path(cfg_.output_dir) / name;
  }

  json& results() { return results_; }
  json& config() { return config_; }

  void finish() {
    json manifest{{"command", command_},      {"version", kVersion},     {"config", config_},
                  {"defaults_applied", defaults_}, {"outputs", outputs_}, {"results", results_}};
    outputs_.push_back("manifest.json");
    manifest["outputs"] = outputs_;
    io::write_text(fs::path(cfg_.output_dir) / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Config& cfg_;
  std::vector<std::string> defaults_;
  std::vector<std::string> outputs_;
  json config_ = json::object();
  json results_ = json::object();
};

void plot_columns(const fs::path& path, const std::vector<double>& xs, const std::vector<std::string>& names,
                  const MatrixX<double>& values, const std::string& title) {
  std::vector<io::Series> series;
  for (Eigen::Index c = 0; c < values.cols(); ++c) series.push_back({names[static_cast<std::size_t>(c)], column(values, c)});
  io::write_svg(path, xs, series, title);
}

int cmd_basis(const Config& cfg, const CLI::App& sub) {
  Run run("basis", cfg, sub);
  const auto knots = single_knots(cfg.knots);
  const auto xs = uniform_grid(knots.a(), knots.b(), cfg.fit.grid);
  MatrixX<double> values;
  std::vector<std::string> names;
  if (cfg.ortho.empty()) {
    values = zb_design_matrix(knots, xs);
    names = function_labels("Z", knots);
  } else {
    const auto basis = orthogonalize(knots, parse_strategy(cfg.ortho));
    values = basis.collocation(xs);
    names = function_labels("O", knots);
    run.results()["ip_count"] = basis.ip_count;
  }
  std::vector<std::vector<double>> cols{xs};
  for (Eigen::Index c = 0; c < values.cols(); ++c) cols.push_back(column(values, c));
  std::vector<std::string> header{"x"};
  header.insert(header.end(), names.begin(), names.end());
  io::write_columns(run.out("basis.csv"), header, cols);
  if (cfg.svg) {
    plot_columns(run.out("basis.svg"), xs, names, values,
                 cfg.ortho.empty() ? "ZB-splines" : "Orthonormal basis (" + cfg.ortho + ")");
  }
  run.config() = {{"knots", knots_json(knots)}, {"basis", cfg.ortho.empty() ? "zb" : cfg.ortho}, {"grid", cfg.fit.grid}};
  run.results()["basis_functions"] = values.cols();
  run.finish();
  return 0;
}

bool is_equispaced(const KnotSequence<double>& knots) {
  const auto ref = make_equispaced_knots(knots.a(), knots.b(), knots.g(), knots.degree());
  for (int i = 0; i < knots.g(); ++i) {
    if (std::abs(ref.inner()[static_cast<std::size_t>(i)] - knots.inner()[static_cast<std::size_t>(i)]) >
        1e-12 * knots.eta()) {
      return false;
    }
  }
  return true;
}

int cmd_ortho(const Config& cfg, const CLI::App& sub) {
  Run run("ortho", cfg, sub);
  const auto knots = single_knots(cfg.knots);
  const Strategy strategy = parse_strategy(cfg.fit.strategy);
  const auto basis = orthogonalize(knots, strategy);
  const auto labels = function_labels("O", knots);
  std::vector<std::string> header{"function"};
  for (const auto& z : function_labels("Z", knots)) header.push_back(z);
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < basis.size(); ++r) rows.push_back(row(basis.transform(), r));
  io::write_labelled_rows(run.out("phi.csv"), header, labels, rows);

  const auto blocks = zb_interval_grams(knots, 0);
  std::vector<std::vector<double>> sup_rows;
  for (int r = 0; r < basis.size(); ++r) {
    const auto& s = basis.supports[static_cast<std::size_t>(r)];
    const VectorX<double> o = basis.transform().row(r).transpose();
    double measured = 0;
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      if (std::sqrt(std::max(o.dot(blocks[c] * o), 0.0)) > 1e-11) measured += knots.breakpoints()[c + 1] - knots.breakpoints()[c];
    }
    sup_rows.push_back({static_cast<double>(s.first - knots.degree()), static_cast<double>(s.last - knots.degree()),
                        basis.levels.empty() ? 0.0 : static_cast<double>(basis.levels[static_cast<std::size_t>(r)]),
                        measured / knots.eta()});
  }
  io::write_labelled_rows(run.out("supports.csv"), {"function", "first_knot", "last_knot", "level", "relative_support"},
                          labels, sup_rows);
  const MatrixX<double> gram_err = basis.penalty(0) - MatrixX<double>::Identity(basis.size(), basis.size());
  run.config() = {{"knots", knots_json(knots)}, {"strategy", cfg.fit.strategy}};
  auto& res = run.results();
  res["ip_count"] = basis.ip_count;
  res["relative_total_support"] = relative_total_support(basis);
  res["max_gram_error"] = gram_err.cwiseAbs().maxCoeff();
  if (is_equispaced(knots) && dyadic_levels(knots.g(), knots.degree()) > 0) {
    res["predicted_ip_count"] = predicted_ip_count(strategy, knots.g(), knots.degree());
    res["predicted_support"] = predicted_support(strategy, knots.g(), knots.degree());
  }
  run.finish();
  std::cout << "strategy " << cfg.fit.strategy << ": ip_count " << basis.ip_count << ", relative total support "
            << io::format_double(relative_total_support(basis)) << "\n";
  return 0;
}

ZeroHandling<double> zero_handling(const FitOptions& f) {
  ZeroHandling<double> z;
  if (f.zero_policy == "replace") {
    z.policy = ZeroPolicy::Replace;
  } else if (f.zero_policy != "reject") {
    invalid("--zero-policy must be reject or replace");
  }
  z.epsilon = f.zero_epsilon;
  return z;
}

struct Smoothed {
  io::HistogramTable data;
  OrthoBasis<double> basis;
  MatrixX<double> coeffs;
  std::vector<double> grid;
  MatrixX<double> clr_curves;
  MatrixX<double> densities;
};

Smoothed smooth_all(const Config& cfg, Run& run) {
  if (cfg.input.empty()) invalid("an input histogram CSV is required");
  auto data = io::read_histograms(cfg.input);
  if (data.ids.empty()) invalid("input has no observations");
  const auto knots = single_knots(cfg.knots);
  const auto rank = interlacing(knots, data.midpoints);
  run.results()["rank_check"] = {{"full_rank", rank.full_rank},
                                 {"violated_index", rank.violated_index ? json(*rank.violated_index) : json(nullptr)}};
  if (!rank.full_rank) {
    const int i = *rank.violated_index;
    throw Error(ErrorCode::InfeasibleDesign,
                "interlacing condition fails at index " + std::to_string(i) + ": no bin midpoint u with " +
                    io::format_double(knots.lambda(i)) + " < u < " +
                    io::format_double(knots.lambda(i + knots.degree() + 1)) + " left for it");
  }
  Smoothed s{std::move(data), orthogonalize(knots, parse_strategy(cfg.fit.strategy)), {}, {}, {}, {}};
  const auto zeros = zero_handling(cfg.fit);
  const auto n = static_cast<Eigen::Index>(s.data.ids.size());
  s.coeffs.resize(n, s.basis.size());
  s.grid = uniform_grid(knots.a(), knots.b(), cfg.fit.grid);
  s.clr_curves.resize(static_cast<Eigen::Index>(s.grid.size()), n);
  s.densities.resize(static_cast<Eigen::Index>(s.grid.size()), n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const DiscreteDensity<double> d{s.data.midpoints, s.data.freqs[static_cast<std::size_t>(r)]};
    auto [fitted, density] = fit_density(d, s.basis, cfg.fit.alpha, cfg.fit.penalty_order, cfg.fit.grid, zeros);
    s.coeffs.row(r) = fitted.coeffs.transpose();
    s.clr_curves.col(r) = fitted.spline.evaluate(s.grid);
    s.densities.col(r) = Eigen::Map<const VectorX<double>>(density.values.data(), s.clr_curves.rows());
  }
  run.config() = {{"knots", knots_json(knots)},
                  {"strategy", cfg.fit.strategy},
                  {"alpha", cfg.fit.alpha},
                  {"penalty_order", cfg.fit.penalty_order},
                  {"grid", cfg.fit.grid},
                  {"weights", "ones"},
                  {"zero_policy", cfg.fit.zero_policy},
                  {"zero_epsilon", cfg.fit.zero_epsilon},
                  {"input", cfg.input}};
  run.results()["observations"] = n;
  run.results()["ip_count"] = s.basis.ip_count;
  return s;
}

void write_curves(const fs::path& path, const std::vector<double>& xs, const std::vector<std::string>& ids,
                  const MatrixX<double>& values) {
  std::vector<std::string> header{"x"};
  header.insert(header.end(), ids.begin(), ids.end());
  std::vector<std::vector<double>> cols{xs};
  for (Eigen::Index c = 0; c < values.cols(); ++c) cols.push_back(column(values, c));
  io::write_columns(path, header, cols);
}

void write_coefficients(Run& run, const Smoothed& s) {
  std::vector<std::string> header{"id"};
  for (const auto& o : function_labels("O", s.basis.knots)) header.push_back(o);
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < s.coeffs.rows(); ++r) rows.push_back(row(s.coeffs, r));
  io::write_labelled_rows(run.out("coefficients.csv"), header, s.data.ids, rows);
}

int cmd_smooth(const Config& cfg, const CLI::App& sub) {
  Run run("smooth", cfg, sub);
  const auto s = smooth_all(cfg, run);
  write_coefficients(run, s);
  write_curves(run.out("clr_curves.csv"), s.grid, s.data.ids, s.clr_curves);
  write_curves(run.out("densities.csv"), s.grid, s.data.ids, s.densities);
  if (cfg.svg) plot_columns(run.out("densities.svg"), s.grid, s.data.ids, s.densities, "Smoothed densities");
  run.finish();
  return 0;
}

int cmd_fpca(const Config& cfg, const CLI::App& sub) {
  Run run("fpca", cfg, sub);
  const auto s = smooth_all(cfg, run);
  if (s.coeffs.rows() < 2) throw Error(ErrorCode::TooFewObservations, "FPCA needs at least two observations");
  write_coefficients(run, s);
  const CoefficientDataset<double> data{s.basis, s.coeffs, s.data.ids};
  const auto res = fpca(data);
  const int p = s.basis.size();
  if (cfg.components < 1) invalid("--components must be positive");
  const int m = std::min(cfg.components, p);

  std::vector<double> comp;
  std::vector<double> cumulative;
  double acc = 0;
  for (int c = 0; c < p; ++c) {
    comp.push_back(c + 1);
    acc += res.explained(c);
    cumulative.push_back(acc);
  }
  io::write_columns(run.out("eigenvalues.csv"), {"component", "eigenvalue", "explained", "cumulative"},
                    {comp, column(res.eigenvalues, 0), column(res.explained, 0), cumulative});

  std::vector<std::string> pc_names;
  for (int c = 0; c < p; ++c) pc_names.push_back("PC" + std::to_string(c + 1));
  std::vector<std::string> lh{"function"};
  lh.insert(lh.end(), pc_names.begin(), pc_names.end());
  std::vector<std::vector<double>> lrows;
  for (int r = 0; r < p; ++r) lrows.push_back(row(res.loadings, r));
  io::write_labelled_rows(run.out("loadings.csv"), lh, function_labels("O", s.basis.knots), lrows);

  MatrixX<double> curves(static_cast<Eigen::Index>(s.grid.size()), m + 1);
  curves.col(0) = s.basis.expand(res.mean_coeffs).evaluate(s.grid);
  for (int c = 0; c < m; ++c) curves.col(c + 1) = res.pc_curves[static_cast<std::size_t>(c)].evaluate(s.grid);
  std::vector<std::string> curve_names{"mean"};
  curve_names.insert(curve_names.end(), pc_names.begin(), pc_names.begin() + m);
  write_curves(run.out("pc_curves.csv"), s.grid, curve_names, curves);
  if (cfg.svg) plot_columns(run.out("pc_curves.svg"), s.grid, curve_names, curves, "Mean and principal component curves");

  std::vector<std::vector<double>> mask_rows(static_cast<std::size_t>(p));
  json active_counts = json::array();
  for (int c = 0; c < m; ++c) {
    const auto mask = active_basis(res, c, cfg.threshold);
    int count = 0;
    for (int r = 0; r < p; ++r) {
      mask_rows[static_cast<std::size_t>(r)].push_back(mask[static_cast<std::size_t>(r)] ? 1.0 : 0.0);
      count += mask[static_cast<std::size_t>(r)] ? 1 : 0;
    }
    active_counts.push_back(count);
  }
  std::vector<std::string> mh{"function"};
  mh.insert(mh.end(), pc_names.begin(), pc_names.begin() + m);
  io::write_labelled_rows(run.out("active_mask.csv"), mh, function_labels("O", s.basis.knots), mask_rows);

  if (!cfg.sparsity_grid.empty()) {
    const auto grid = parse_list(cfg.sparsity_grid);
    std::vector<std::vector<double>> count_cols(static_cast<std::size_t>(m) + 1);
    std::vector<std::vector<double>> expl_cols(static_cast<std::size_t>(m) + 2);
    for (double sp : grid) {
      const auto sparse = sparse_fpca(data, sp, m);
      count_cols[0].push_back(sp);
      expl_cols[0].push_back(sp);
      double total = 0;
      for (int c = 0; c < m; ++c) {
        const auto mask = active_basis(sparse, c, 0.0);
        count_cols[static_cast<std::size_t>(c) + 1].push_back(static_cast<double>(std::count(mask.begin(), mask.end(), true)));
        expl_cols[static_cast<std::size_t>(c) + 1].push_back(sparse.explained(c));
        total += sparse.explained(c);
      }
      expl_cols.back().push_back(total);
    }
    std::vector<std::string> ch{"sparsity"};
    ch.insert(ch.end(), pc_names.begin(), pc_names.begin() + m);
    io::write_columns(run.out("sparse_active_counts.csv"), ch, count_cols);
    ch.push_back("total");
    io::write_columns(run.out("sparse_explained.csv"), ch, expl_cols);
    run.config()["sparsity_grid"] = grid;
  }
  run.config()["threshold"] = cfg.threshold;
  run.config()["components"] = m;
  run.results()["eigenvalues"] = column(res.eigenvalues, 0);
  run.results()["explained"] = column(res.explained, 0);
  run.results()["active_counts"] = active_counts;
  run.finish();
  return 0;
}

std::vector<Strategy> selected_strategies(const std::string& text) {
  if (text == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<Strategy> out;
  for (const auto& name : split(text, ',')) out.push_back(parse_strategy(name));
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string aligned(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "  " : "") << pad(cells[c], width[c]);
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

std::string short_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

int cmd_bench(const Config& cfg, const CLI::App& sub) {
  Run run("bench", cfg, sub);
  const auto sequences = make_knot_sequences(cfg.knots);
  const auto strategies = selected_strategies(cfg.strategies);
  std::optional<std::vector<double>> points;
  if (!cfg.collocation_points.empty()) points = parse_list(cfg.collocation_points);
  const int l = cfg.fit.penalty_order;

  std::vector<std::string> header{"g", "k", "strategy", "support_measured", "support_predicted", "ip_measured",
                                  "ip_predicted"};
  if (points) {
    header.push_back("nonzero_penalty");
    header.push_back("nonzero_collocation");
  }
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  // Summary layout: one row per strategy, penalty counts then collocation counts per g.
  std::vector<std::vector<std::string>> table1(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) table1[s].push_back(std::string(strategy_name(strategies[s])));
  std::vector<std::vector<std::string>> table1_coll(strategies.size());

  for (const auto& knots : sequences) {
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const Strategy st = strategies[s];
      if (st == Strategy::Splinet && dyadic_levels(knots.g(), knots.degree()) == 0) {
        throw Error(ErrorCode::NonDyadicKnots, "splinet needs g = (2^N-1)(k+1)-k; g=" + std::to_string(knots.g()) +
                                                   " is not dyadic for k=" + std::to_string(knots.degree()));
      }
      const auto basis = orthogonalize(knots, st);
      const double sup = relative_total_support(basis);
      const double sup_pred = predicted_support(st, knots.g(), knots.degree());
      const long ip_pred = predicted_ip_count(st, knots.g(), knots.degree());
      std::vector<std::string> r{std::to_string(knots.g()), std::to_string(knots.degree()), std::string(strategy_name(st)),
                                 short_number(sup), short_number(sup_pred), std::to_string(basis.ip_count),
                                 std::to_string(ip_pred)};
      json jr{{"g", knots.g()},      {"k", knots.degree()}, {"strategy", strategy_name(st)},
              {"support_measured", sup}, {"support_predicted", sup_pred}, {"ip_measured", basis.ip_count},
              {"ip_predicted", ip_pred}};
      if (points) {
        const auto np = nonzero_count(basis.penalty(l), cfg.nonzero_threshold);
        const auto nc = nonzero_count(basis.collocation(*points), cfg.nonzero_threshold);
        r.push_back(std::to_string(np));
        r.push_back(std::to_string(nc));
        jr["nonzero_penalty"] = np;
        jr["nonzero_collocation"] = nc;
        table1[s].push_back(std::to_string(np));
        table1_coll[s].push_back(std::to_string(nc));
      }
      rows.push_back(r);
      jrows.push_back(jr);
    }
  }
  {
    std::ostringstream csv;
    for (std::size_t c = 0; c < header.size(); ++c) csv << (c ? "," : "") << header[c];
    csv << '\n';
    for (const auto& r : jrows) {
      csv << r["g"].get<int>() << ',' << r["k"].get<int>() << ',' << r["strategy"].get<std::string>() << ','
          << io::format_double(r["support_measured"]) << ',' << io::format_double(r["support_predicted"]) << ','
          << r["ip_measured"].get<long>() << ',' << r["ip_predicted"].get<long>();
      if (points) csv << ',' << r["nonzero_penalty"].get<long>() << ',' << r["nonzero_collocation"].get<long>();
      csv << '\n';
    }
    io::write_text(run.out("bench.csv"), csv.str());
  }
  std::string text = aligned(header, rows);
  if (points) {
    std::vector<std::string> th{"strategy"};
    for (const auto& knots : sequences) th.push_back("N_kl(g=" + std::to_string(knots.g()) + ")");
    for (const auto& knots : sequences) th.push_back("O(x)(g=" + std::to_string(knots.g()) + ")");
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      table1[s].insert(table1[s].end(), table1_coll[s].begin(), table1_coll[s].end());
    }
    const std::string t1 = aligned(th, table1);
    std::ostringstream csv;
    for (std::size_t c = 0; c < th.size(); ++c) csv << (c ? "," : "") << th[c];
    csv << '\n';
    for (const auto& r : table1) {
      for (std::size_t c = 0; c < r.size(); ++c) csv << (c ? "," : "") << r[c];
      csv << '\n';
    }
    io::write_text(run.out("table1.csv"), csv.str());
    text += "\nNon-zero entries (|entry| > " + short_number(cfg.nonzero_threshold) + ", l=" + std::to_string(l) +
            ", " + std::to_string(points->size()) + " collocation points)\n" + t1;
    run.config()["collocation_points"] = *points;
  }
  io::write_text(run.out("bench.txt"), text);
  std::cout << text;
  json gs = json::array();
  for (const auto& k : sequences) gs.push_back(k.g());
  run.config()["inner_knots"] = gs;
  run.config()["degree"] = cfg.knots.degree;
  run.config()["domain"] = {sequences.front().a(), sequences.front().b()};
  run.config()["penalty_order"] = l;
  run.config()["nonzero_threshold"] = cfg.nonzero_threshold;
  run.results()["rows"] = jrows;
  run.finish();
  return 0;
}

int cmd_plot(const Config& cfg) {
  if (cfg.input.empty()) invalid("an input CSV is required");
  const auto csv = io::read_csv(cfg.input);
  if (csv.header.size() < 2) invalid("plot input needs an x column and at least one series");
  std::vector<std::size_t> picks;
  if (cfg.plot_columns.empty()) {
    for (std::size_t c = 1; c < csv.header.size(); ++c) picks.push_back(c);
  } else {
    for (const auto& name : split(cfg.plot_columns, ',')) {
      const auto it = std::find(csv.header.begin() + 1, csv.header.end(), name);
      if (it == csv.header.end()) invalid("no column named '" + name + "'");
      picks.push_back(static_cast<std::size_t>(it - csv.header.begin()));
    }
  }
  std::vector<double> xs;
  std::vector<io::Series> series;
  for (auto c : picks) series.push_back({csv.header[c], {}});
  for (const auto& r : csv.rows) {
    xs.push_back(io::parse_double(r[0], cfg.input));
    for (std::size_t s = 0; s < picks.size(); ++s) series[s].ys.push_back(io::parse_double(r[picks[s]], cfg.input));
  }
  fs::path target = cfg.plot_output.empty() ? fs::path(cfg.input).replace_extension(".svg") : fs::path(cfg.plot_output);
  io::write_svg(target, xs, series, cfg.title.empty() ? fs::path(cfg.input).filename().string() : cfg.title);
  std::cout << target.string() << "\n";
  return 0;
}

void add_knot_options(CLI::App& sub, Config& cfg, bool list_allowed) {
  sub.add_option("--degree,-k", cfg.knots.degree, "spline degree k")->capture_default_str()->check(CLI::Range(0, 20));
  sub.add_option("--inner-knots,-g", cfg.knots.inner_knots,
                 list_allowed ? "equispaced inner-knot counts (a,b,c or start:step:stop)" : "number of equispaced inner knots");
  sub.add_option("--knots-file", cfg.knots.knots_file, "file with explicit inner knots");
  sub.add_option("--domain", cfg.knots.domain, "interval a,b")->capture_default_str();
  sub.add_option("--output-dir,-o", cfg.output_dir, "directory for output files")->capture_default_str();
}

void add_fit_options(CLI::App& sub, Config& cfg) {
  sub.add_option("input", cfg.input, "wide histogram CSV (id,x_1..x_n / label,f_1..f_n)")->required();
  sub.add_option("--alpha", cfg.fit.alpha, "smoothing parameter in (0,1]")->capture_default_str();
  sub.add_option("--penalty-order,-l", cfg.fit.penalty_order, "derivative order l of the penalty")->capture_default_str();
  sub.add_option("--strategy", cfg.fit.strategy, "gs-lr, gs-rl, gs-two-sided or splinet")->capture_default_str();
  sub.add_option("--grid", cfg.fit.grid, "points of the output curve grid")->capture_default_str();
  sub.add_option("--zero-policy", cfg.fit.zero_policy, "reject or replace zero frequencies")->capture_default_str();
  sub.add_option("--zero-epsilon", cfg.fit.zero_epsilon, "replacement factor of the smallest positive frequency")
      ->capture_default_str();
  sub.add_flag("--svg", cfg.svg, "also write an SVG plot");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-integral splines, ZB-splinets and simplicial FPCA"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config cfg;

  auto* basis = app.add_subcommand("basis", "evaluate the ZB basis or an orthonormal basis on a grid");
  add_knot_options(*basis, cfg, false);
  basis->add_option("--grid", cfg.fit.grid, "grid points")->capture_default_str();
  basis->add_option("--ortho", cfg.ortho, "emit the basis orthogonalized by this strategy");
  basis->add_flag("--svg", cfg.svg, "also write an SVG plot");

  auto* ortho = app.add_subcommand("ortho", "orthogonalize and report transform, supports and counts");
  add_knot_options(*ortho, cfg, false);
  ortho->add_option("--strategy", cfg.fit.strategy, "gs-lr, gs-rl, gs-two-sided or splinet")->capture_default_str();

  auto* smooth = app.add_subcommand("smooth", "smooth histograms into densities");
  add_knot_options(*smooth, cfg, false);
  add_fit_options(*smooth, cfg);

  auto* fpca_cmd = app.add_subcommand("fpca", "simplicial functional PCA of smoothed histograms");
  add_knot_options(*fpca_cmd, cfg, false);
  add_fit_options(*fpca_cmd, cfg);
  fpca_cmd->add_option("--threshold", cfg.threshold, "active-basis threshold on |loading|")->capture_default_str();
  fpca_cmd->add_option("--components", cfg.components, "principal components reported")->capture_default_str();
  fpca_cmd->add_option("--sparsity-grid", cfg.sparsity_grid, "sparsity values (a,b,c or start:step:stop)");

  auto* bench = app.add_subcommand("bench", "measured vs predicted supports, inner products and non-zero counts");
  add_knot_options(*bench, cfg, true);
  bench->add_option("--strategy", cfg.strategies, "all or a comma list of strategies")->capture_default_str();
  bench->add_option("--collocation-points", cfg.collocation_points, "points for the collocation matrix");
  bench->add_option("--penalty-order,-l", cfg.fit.penalty_order, "derivative order of N_kl")->capture_default_str();
  bench->add_option("--nonzero-threshold", cfg.nonzero_threshold, "absolute threshold for non-zero entries")
      ->capture_default_str();

  auto* plot = app.add_subcommand("plot", "render an x-first CSV as an SVG line plot");
  plot->add_option("input", cfg.input, "CSV whose first column is x")->required();
  plot->add_option("--output", cfg.plot_output, "SVG path (default: input with .svg)");
  plot->add_option("--columns", cfg.plot_columns, "comma list of columns to draw");
  plot->add_option("--title", cfg.title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return 2;
  }

  try {
    if (basis->parsed()) return cmd_basis(cfg, *basis);
    if (ortho->parsed()) return cmd_ortho(cfg, *ortho);
    if (smooth->parsed()) return cmd_smooth(cfg, *smooth);
    if (fpca_cmd->parsed()) return cmd_fpca(cfg, *fpca_cmd);
    if (bench->parsed()) return cmd_bench(cfg, *bench);
    if (plot->parsed()) return cmd_plot(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
