#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "zbsplinet/inner_product.hpp"
#include "zbsplinet/spline.hpp"

#include <Eigen/Eigenvalues>

using namespace zbsplinet;

namespace {

std::vector<Spline<double>> zb_list(const KnotSequence<double>& k) {
  std::vector<Spline<double>> out;
  const int n = zb_dimension(k);
  for (int m = 0; m < n; ++m) out.push_back(Spline<double>::zbspline(k, VectorX<double>::Unit(n, m)));
  return out;
}

/// Trapezoid with n points on every knot interval, evaluating one-sided
/// limits at the interval ends so jumps at knots cost nothing.
double trapezoid_n(const Spline<double>& s1, const Spline<double>& s2, int l, int n) {
  const auto& br = s1.knots().breakpoints();
  double total = 0;
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    const double lo = br[c];
    const double hi = br[c + 1];
    const double h = (hi - lo) / (n - 1);
    const auto f = [&](double x) { return s1(x, l) * s2(x, l); };
    double acc = 0.5 * (f(std::nextafter(lo, hi)) + f(std::nextafter(hi, lo)));
    for (int i = 1; i < n - 1; ++i) acc += f(lo + i * h);
    total += acc * h;
  }
  return total;
}

/// The 10 000-point rule alone is off by about h^2 f''/12 (1e-7 relative
/// here); one Richardson step with the halved spacing removes that term.
double piecewise_trapezoid(const Spline<double>& s1, const Spline<double>& s2, int l, int n) {
  const double coarse = trapezoid_n(s1, s2, l, n);
  const double fine = trapezoid_n(s1, s2, l, 2 * n - 1);
  return (4 * fine - coarse) / 3;
}

}  // namespace

TEST_CASE("piecewise constant ZB-spline norm") {
  const auto k = make_knots<double>(0.0, 2.0, 1, 0, std::vector<double>{1.0});
  const auto z = Spline<double>::zbspline(k, VectorX<double>::Ones(1));
  InnerProductCounter ctx;
  CHECK(l2_inner(z, z, 0, &ctx) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ctx.count == 1);
}

TEST_CASE("disjoint supports give zero without a count") {
  const auto k = make_equispaced_knots(0.0, 1.0, 9, 1);
  const auto zs = zb_list(k);
  InnerProductCounter ctx;
  CHECK(l2_inner(zs[0], zs[5], 0, &ctx) == 0.0);
  CHECK(l2_inner(zs[1], zs[8], 1, &ctx) == 0.0);
  CHECK(ctx.count == 0);
  CHECK(l2_inner(zs[0], zs[2], 0, &ctx) != 0.0);
  CHECK(ctx.count == 1);
}

TEST_CASE("agreement with a fine trapezoid rule") {
  std::mt19937 rng(17);
  std::normal_distribution<double> nrm;
  for (int deg = 0; deg <= 3; ++deg) {
    const auto inner = oracle::random_knots(rng, 0.0, 2.0, 5, 0.05);
    const auto k = make_knots<double>(0.0, 2.0, 5, deg, inner);
    for (int trial = 0; trial < 3; ++trial) {
      VectorX<double> z1(zb_dimension(k));
      VectorX<double> z2(zb_dimension(k));
      for (auto& v : z1) v = nrm(rng);
      for (auto& v : z2) v = nrm(rng);
      const auto s1 = Spline<double>::zbspline(k, z1);
      const auto s2 = Spline<double>::zbspline(k, z2);
      for (int l = 0; l <= deg; ++l) {
        const double exact = l2_inner(s1, s2, l);
        const double trap = piecewise_trapezoid(s1, s2, l, 10000);
        const double scale = std::sqrt(l2_inner(s1, s1, l) * l2_inner(s2, s2, l));
        CHECK(std::abs(exact - trap) < 1e-8 * scale);
      }
      CHECK(l2_inner(s1, s1, 0) >= 0.0);
    }
  }
}

TEST_CASE("Gram matrix of the raw ZB basis") {
  for (int deg = 0; deg <= 3; ++deg) {
    for (int g : {1, 4, 9}) {
      const auto k = make_equispaced_knots(-1.0, 3.0, g, deg);
      const auto zs = zb_list(k);
      InnerProductCounter ctx;
      const auto gm = gram(zs, 0, &ctx);
      CHECK((gm.entries - gm.entries.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      const Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(gm.entries);
      CHECK(eig.eigenvalues().minCoeff() > -1e-10);
      for (int i = 0; i < gm.entries.rows(); ++i) {
        for (int j = 0; j < gm.entries.cols(); ++j) {
          if (std::abs(i - j) > deg + 1) CHECK(gm.entries(i, j) == 0.0);
        }
      }
      // enumerate pairs whose coordinate supports overlap on an interval
      const auto& t = k.extended();
      std::size_t pairs = 0;
      for (int i = 0; i < zb_dimension(k); ++i) {
        for (int j = i; j < zb_dimension(k); ++j) {
          const double lo = std::max(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
          const double hi = std::min(t[static_cast<std::size_t>(i + deg + 2)], t[static_cast<std::size_t>(j + deg + 2)]);
          if (hi > lo) ++pairs;
        }
      }
      CHECK(ctx.count == pairs);
      CHECK(gm.entries.isApprox(zb_gram(k, 0), 1e-13));
    }
  }
}

TEST_CASE("penalty quadratic form equals the integrated squared derivative") {
  std::mt19937 rng(2);
  std::normal_distribution<double> nrm;
  for (int deg = 1; deg <= 3; ++deg) {
    const auto k = make_equispaced_knots(0.0, 95.0, 7, deg);
    for (int l = 1; l <= deg; ++l) {
      VectorX<double> z(zb_dimension(k));
      for (auto& v : z) v = nrm(rng);
      const auto s = Spline<double>::zbspline(k, z);
      const double form = z.dot(zb_gram(k, l) * z);
      const double trap = piecewise_trapezoid(s, s, l, 10000);
      CHECK(std::abs(form - trap) < 1e-8 * form);
    }
  }
}

TEST_CASE("non-zero counting") {
  CHECK(nonzero_count(MatrixX<double>::Zero(4, 5), 0.0) == 0);
  MatrixX<double> m(2, 2);
  m << 1e-12, -2e-10, 0.5, 0.0;
  CHECK(nonzero_count(m, 1e-10) == 2);
  CHECK(nonzero_count(m, 0.0) == 3);
}

TEST_CASE("inner product preconditions") {
  const auto k1 = make_equispaced_knots(0.0, 1.0, 3, 2);
  const auto k2 = make_equispaced_knots(0.0, 1.0, 4, 2);
  const auto a = Spline<double>::zbspline(k1, VectorX<double>::Ones(5));
  const auto b = Spline<double>::zbspline(k2, VectorX<double>::Ones(6));
  CHECK(oracle::throws_code([&] { (void)l2_inner(a, b, 0); }, ErrorCode::KnotMismatch));
  CHECK(oracle::throws_code([&] { (void)l2_inner(a, a, 3); }, ErrorCode::DerivOrderTooHigh));
}
