#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "zbsplinet/bayes_clr.hpp"
#include "zbsplinet/error.hpp"
#include "zbsplinet/orthogonalize.hpp"
#include "zbsplinet/spline.hpp"

namespace zbsplinet {

/// Data and settings of J_l(s) = (1-alpha) int (s^(l))^2 + alpha sum w_j (y_j - s(x_j))^2.
template <typename Scalar = double>
struct SmoothingProblem {
  std::vector<Scalar> xs;
  std::vector<Scalar> ys;
  std::vector<Scalar> weights;  // empty means all ones
  Scalar alpha = Scalar(0.5);
  int l = 1;
  OrthoBasis<Scalar> basis;
};

template <typename Scalar = double>
struct FitResult {
  VectorX<Scalar> coeffs;
  Spline<Scalar> spline;
  Scalar residual_ss = 0;
  Scalar penalty = 0;
  Scalar objective = 0;
};

/// Outcome of the interlacing scan. violated_index is the signed index i of
/// the first condition lambda_i < u_i < lambda_{i+k+1} that no remaining
/// data point satisfies.
struct RankCheck {
  bool full_rank = false;
  std::optional<int> violated_index;
};

/// Greedy search for u_{-k} < ... < u_{g-1} drawn from xs with
/// lambda_i < u_i < lambda_{i+k+1}. Repeated abscissae count once.
template <typename Scalar>
RankCheck interlacing(const KnotSequence<Scalar>& knots, std::vector<Scalar> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const int k = knots.degree();
  std::size_t p = 0;
  for (int i = -k; i <= knots.g() - 1; ++i) {
    const Scalar lo = knots.lambda(i);
    const Scalar hi = knots.lambda(i + k + 1);
    while (p < xs.size() && xs[p] <= lo) ++p;
    if (p == xs.size() || xs[p] >= hi) return {false, i};
    ++p;
  }
  return {true, std::nullopt};
}

/// True iff the collocation matrix at xs has full column rank.
template <typename Scalar>
bool check_rank(const OrthoBasis<Scalar>& basis, const std::vector<Scalar>& xs) {
  return interlacing(basis.knots, xs).full_rank;
}

namespace detail {

template <typename Scalar>
VectorX<Scalar> problem_weights(const SmoothingProblem<Scalar>& p) {
  const auto n = static_cast<Eigen::Index>(p.xs.size());
  if (p.weights.empty()) return VectorX<Scalar>::Ones(n);
  VectorX<Scalar> w(n);
  for (Eigen::Index j = 0; j < n; ++j) w(j) = p.weights[static_cast<std::size_t>(j)];
  return w;
}

template <typename Scalar>
void validate(const SmoothingProblem<Scalar>& p) {
  const int k = p.basis.knots.degree();
  require(!p.xs.empty(), ErrorCode::InvalidParameter, "no data points");
  require(p.xs.size() == p.ys.size(), ErrorCode::DimensionMismatch, "xs and ys differ in length");
  require(p.weights.empty() || p.weights.size() == p.xs.size(), ErrorCode::DimensionMismatch,
          "weights and xs differ in length");
  for (Scalar w : p.weights) require(w > Scalar(0), ErrorCode::InvalidParameter, "weights must be positive");
  for (Scalar x : p.xs) require(p.basis.knots.contains(x), ErrorCode::PointOutsideDomain, "data point outside [a,b]");
  require(p.alpha > Scalar(0) && p.alpha <= Scalar(1), ErrorCode::InvalidParameter, "alpha must lie in (0,1]");
  require(p.l >= 1 && p.l <= k - 1, ErrorCode::InvalidParameter,
          "penalty order l must lie in 1..k-1 (k=" + std::to_string(k) + ")");
}

}  // namespace detail

/// J_l at coefficient vector o in the problem's basis.
template <typename Scalar>
Scalar smoothing_objective(const SmoothingProblem<Scalar>& p, const VectorX<Scalar>& o) {
  detail::validate(p);
  const VectorX<Scalar> w = detail::problem_weights(p);
  const VectorX<Scalar> y = Eigen::Map<const VectorX<Scalar>>(p.ys.data(), static_cast<Eigen::Index>(p.ys.size()));
  const VectorX<Scalar> r = y - p.basis.collocation(p.xs) * o;
  const Scalar rss = r.dot(w.asDiagonal() * r);
  const Scalar pen = o.dot(p.basis.penalty(p.l) * o);
  return (Scalar(1) - p.alpha) * pen + p.alpha * rss;
}

/// Minimizer o* = [(1-alpha) N + alpha O^T W O]^{-1} alpha O^T W y, solved by
/// Cholesky. A Hessian that is not numerically positive definite raises
/// InfeasibleDesign when the interlacing scan also fails (naming the
/// violated index) and SingularSystem otherwise.
template <typename Scalar>
FitResult<Scalar> fit(const SmoothingProblem<Scalar>& p) {
  detail::validate(p);
  const VectorX<Scalar> w = detail::problem_weights(p);
  const VectorX<Scalar> y = Eigen::Map<const VectorX<Scalar>>(p.ys.data(), static_cast<Eigen::Index>(p.ys.size()));
  const MatrixX<Scalar> O = p.basis.collocation(p.xs);
  const MatrixX<Scalar> N = p.basis.penalty(p.l);
  const MatrixX<Scalar> H = (Scalar(1) - p.alpha) * N + p.alpha * O.transpose() * w.asDiagonal() * O;
  const VectorX<Scalar> rhs = p.alpha * O.transpose() * (w.asDiagonal() * y);
  const Eigen::LLT<MatrixX<Scalar>> llt(H);
  const Scalar scale = H.diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().cwiseAbs2().minCoeff() <= scale * Scalar(1e-14)) {
    const RankCheck rank = interlacing(p.basis.knots, p.xs);
    if (!rank.full_rank) {
      throw Error(ErrorCode::InfeasibleDesign, "collocation matrix is rank deficient: interlacing fails at index " +
                                                   std::to_string(*rank.violated_index));
    }
    throw Error(ErrorCode::SingularSystem, "smoothing Hessian is not numerically positive definite");
  }
  VectorX<Scalar> o = llt.solve(rhs);
  const VectorX<Scalar> r = y - O * o;
  FitResult<Scalar> out{o, p.basis.expand(o), r.dot(w.asDiagonal() * r), o.dot(N * o), 0};
  out.objective = (Scalar(1) - p.alpha) * out.penalty + p.alpha * out.residual_ss;
  return out;
}

/// Uniform grid of n points on [a,b].
template <typename Scalar>
std::vector<Scalar> uniform_grid(Scalar a, Scalar b, int n) {
  detail::require(n >= 2, ErrorCode::InvalidParameter, "grid needs at least two points");
  std::vector<Scalar> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + (b - a) * Scalar(i) / Scalar(n - 1);
  xs.back() = b;
  return xs;
}

/// Histogram to density: discrete clr at the bin centres, smoothing fit
/// in the given basis, inverse clr of the fitted spline on a uniform grid.
template <typename Scalar>
std::pair<FitResult<Scalar>, GridFunction<Scalar>> fit_density(const DiscreteDensity<Scalar>& d,
                                                               const OrthoBasis<Scalar>& basis, Scalar alpha, int l,
                                                               int grid_points = 501,
                                                               const ZeroHandling<Scalar>& zeros = {}) {
  detail::require(d.midpoints.size() == d.freqs.size(), ErrorCode::DimensionMismatch,
                  "midpoints and frequencies differ in length");
  SmoothingProblem<Scalar> p{d.midpoints, clr_discrete(d, zeros), {}, alpha, l, basis};
  auto result = fit(p);
  GridFunction<Scalar> curve{uniform_grid(basis.knots.a(), basis.knots.b(), grid_points), {}};
  const VectorX<Scalar> values = result.spline.evaluate(curve.xs);
  curve.values.assign(values.data(), values.data() + values.size());
  return {std::move(result), inv_clr(curve)};
}

template <typename Scalar>
std::pair<FitResult<Scalar>, GridFunction<Scalar>> fit_density(const DiscreteDensity<Scalar>& d,
                                                               const KnotSequence<Scalar>& knots, Scalar alpha, int l,
                                                               Strategy strategy, int grid_points = 501) {
  return fit_density(d, orthogonalize(knots, strategy), alpha, l, grid_points);
}

}  // namespace zbsplinet
