#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "zbsplinet/sfpca.hpp"
#include "zbsplinet/smoothing.hpp"

using namespace zbsplinet;

namespace {

const auto kKnots = make_equispaced_knots(0.0, 95.0, 7, 2);

std::vector<DiscreteDensity<double>> histograms(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<DiscreteDensity<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(synthetic::histogram(synthetic::random_density(rng, 0, 95), synthetic::bin_midpoints()));
  return out;
}

CoefficientDataset<double> smoothed(const OrthoBasis<double>& basis, const std::vector<DiscreteDensity<double>>& hs) {
  CoefficientDataset<double> data{basis, MatrixX<double>(static_cast<Eigen::Index>(hs.size()), basis.size()), {}};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    data.coeffs.row(static_cast<Eigen::Index>(i)) = fit_density(hs[i], basis, 0.5, 1).first.coeffs.transpose();
    data.ids.push_back("obs" + std::to_string(i));
  }
  return data;
}

CoefficientDataset<double> raw(const OrthoBasis<double>& basis, MatrixX<double> coeffs) {
  return {basis, std::move(coeffs), {}};
}

}  // namespace

TEST_CASE("identical observations") {
  const auto basis = orthogonalize(kKnots, Strategy::Splinet);
  MatrixX<double> c(5, 9);
  c.rowwise() = VectorX<double>::LinSpaced(9, -1, 1).transpose();
  const auto res = fpca(raw(basis, c));
  CHECK(res.eigenvalues.isZero(0.0));
  CHECK(res.explained.isZero(0.0));
  for (int comp = 0; comp < 9; ++comp) {
    const auto mask = active_basis(res, comp);
    CHECK(std::count(mask.begin(), mask.end(), true) == 0);
  }
}

TEST_CASE("rank-one data") {
  const auto basis = orthogonalize(kKnots, Strategy::GsTwoSided);
  std::mt19937 rng(1);
  std::normal_distribution<double> nrm;
  VectorX<double> v(9);
  for (auto& x : v) x = nrm(rng);
  MatrixX<double> c(12, 9);
  for (int i = 0; i < 12; ++i) c.row(i) = nrm(rng) * v.transpose();
  const auto res = fpca(raw(basis, c));
  CHECK(res.eigenvalues(0) > 0.0);
  CHECK(res.eigenvalues.tail(8).isZero(0.0));
  const VectorX<double> unit = v.normalized();
  CHECK(std::min((res.loadings.col(0) - unit).norm(), (res.loadings.col(0) + unit).norm()) < 1e-10);
  // explicit covariance oracle: lambda = var(c_i) |v|^2
  VectorX<double> cs(12);
  for (int i = 0; i < 12; ++i) cs(i) = c(i, 0) / v(0);
  const double var = (cs.array() - cs.mean()).square().sum() / 11;
  CHECK(res.eigenvalues(0) == doctest::Approx(var * v.squaredNorm()).epsilon(1e-12));
  CHECK(res.explained(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equal weight on two basis functions activates two") {
  const auto basis = orthogonalize(kKnots, Strategy::Splinet);
  MatrixX<double> c = MatrixX<double>::Zero(6, 9);
  for (int i = 0; i < 6; ++i) c(i, 2) = c(i, 5) = i - 2.5;
  const auto res = fpca(raw(basis, c));
  CHECK(std::abs(res.loadings(2, 0)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  const auto mask = active_basis(res, 0);
  CHECK(std::count(mask.begin(), mask.end(), true) == 2);
  CHECK(mask[2]);
  CHECK(mask[5]);
  CHECK(oracle::throws_code([&] { (void)active_basis(res, 9); }, ErrorCode::ComponentOutOfRange));
  CHECK(oracle::throws_code([&] { (void)active_basis(res, -1); }, ErrorCode::ComponentOutOfRange));
}

TEST_CASE("unit loading and zero threshold") {
  const auto basis = orthogonalize(kKnots, Strategy::Splinet);
  MatrixX<double> c = MatrixX<double>::Zero(4, 9);
  c(0, 4) = 1;
  c(1, 4) = -1;
  const auto res = fpca(raw(basis, c));
  const auto mask = active_basis(res, 0);
  CHECK(std::count(mask.begin(), mask.end(), true) == 1);
  std::mt19937 rng(2);
  std::normal_distribution<double> nrm;
  MatrixX<double> d(20, 9);
  for (auto& x : d.reshaped()) x = nrm(rng);
  const auto r2 = fpca(raw(basis, d));
  const auto m0 = active_basis(r2, 0, 0.0);
  for (int i = 0; i < 9; ++i) CHECK(m0[static_cast<std::size_t>(i)] == (r2.loadings(i, 0) != 0.0));
}

TEST_CASE("PCA invariants on smoothed densities") {
  const auto hs = histograms(50, 3);
  const auto basis = orthogonalize(kKnots, Strategy::Splinet);
  const auto data = smoothed(basis, hs);
  const auto res = fpca(data);
  for (int i = 0; i + 1 < res.eigenvalues.size(); ++i) CHECK(res.eigenvalues(i) >= res.eigenvalues(i + 1));
  CHECK(res.eigenvalues.minCoeff() >= -1e-12);
  CHECK((res.loadings.transpose() * res.loadings - MatrixX<double>::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(res.explained.sum() - 1.0) < 1e-12);
  const MatrixX<double> centred = data.coeffs.rowwise() - data.coeffs.colwise().mean();
  const double total = centred.squaredNorm() / 49;
  CHECK(std::abs(res.eigenvalues.sum() - total) < 1e-10);
  const MatrixX<double> back = centred * res.loadings * res.loadings.transpose();
  CHECK((back - centred).cwiseAbs().maxCoeff() < 1e-10);
  for (int c = 0; c < 9; ++c) {
    Eigen::Index at = 0;
    res.loadings.col(c).cwiseAbs().maxCoeff(&at);
    CHECK(res.loadings(at, c) > 0.0);
  }
  CHECK(oracle::throws_code([&] { (void)fpca(raw(basis, MatrixX<double>::Ones(1, 9))); }, ErrorCode::TooFewObservations));
}

TEST_CASE("basis invariance of eigenvalues and the first component curve") {
  const auto hs = histograms(50, 4);
  const auto grid = uniform_grid(0.0, 95.0, 500);
  std::optional<FpcaResult<double>> ref;
  VectorX<double> ref_curve;
  for (Strategy s : kAllStrategies) {
    const auto res = fpca(smoothed(orthogonalize(kKnots, s), hs));
    const VectorX<double> curve = res.pc_curves[0].evaluate(grid);
    if (!ref) {
      ref = res;
      ref_curve = curve;
      continue;
    }
    for (int i = 0; i < 9; ++i) {
      CHECK(std::abs(res.eigenvalues(i) - ref->eigenvalues(i)) <= 1e-8 * ref->eigenvalues(0));
    }
    CHECK(std::min((curve - ref_curve).cwiseAbs().maxCoeff(), (curve + ref_curve).cwiseAbs().maxCoeff()) < 1e-8);
  }
}

TEST_CASE("sparse PCA") {
  const auto hs = histograms(50, 5);
  const auto basis = orthogonalize(kKnots, Strategy::Splinet);
  const auto data = smoothed(basis, hs);
  const auto full = fpca(data);
  const auto s0 = sparse_fpca(data, 0.0, 3);
  for (int c = 0; c < 3; ++c) {
    CHECK((s0.loadings.col(c) - full.loadings.col(c)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(s0.explained(c) == doctest::Approx(full.explained(c)).epsilon(1e-8));
  }
  const auto s1 = sparse_fpca(data, 1.0, 3);
  for (int c = 0; c < 3; ++c) {
    const auto nz = (s1.loadings.col(c).array() != 0.0).count();
    CHECK((nz <= 1 || s1.broken_down[static_cast<std::size_t>(c)]));
  }
  // non-increasing explained variability and active counts along the grid
  double prev_expl = INFINITY;
  long prev_active = 1000;
  for (int i = 0; i <= 10; ++i) {
    const auto sp = sparse_fpca(data, 0.1 * i, 1);
    const long active = (sp.loadings.col(0).array() != 0.0).count();
    CHECK(sp.explained(0) <= prev_expl + 1e-12);
    CHECK(active <= prev_active);
    prev_expl = sp.explained(0);
    prev_active = active;
  }
  CHECK(oracle::throws_code([&] { (void)sparse_fpca(data, 1.5, 1); }, ErrorCode::InvalidParameter));
  CHECK(oracle::throws_code([&] { (void)sparse_fpca(raw(basis, MatrixX<double>::Ones(1, 9)), 0.5, 1); },
                            ErrorCode::TooFewObservations));
}
