#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zbsplinet/error.hpp"
#include "zbsplinet/knots.hpp"

namespace zbsplinet {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Scalar>
Scalar safe_ratio(Scalar num, Scalar den) {
  return den > Scalar(0) ? num / den : Scalar(0);
}

/// Degree-0 indicator on the extended sequence, with the last non-empty
/// interval closed at b.
template <typename Scalar>
Scalar indicator(const std::vector<Scalar>& t, std::size_t j, Scalar x, Scalar b) {
  if (t[j] <= x && x < t[j + 1]) return Scalar(1);
  if (x == b && t[j + 1] == b && t[j] < b) return Scalar(1);
  return Scalar(0);
}

template <typename Scalar>
Scalar cox_de_boor(const std::vector<Scalar>& t, std::size_t j, int order, Scalar x, Scalar b) {
  if (order == 1) return indicator(t, j, x, b);
  const auto p = static_cast<std::size_t>(order);
  Scalar value = 0;
  const Scalar left_den = t[j + p - 1] - t[j];
  if (left_den > Scalar(0)) value += (x - t[j]) / left_den * cox_de_boor(t, j, order - 1, x, b);
  const Scalar right_den = t[j + p] - t[j + 1];
  if (right_den > Scalar(0)) value += (t[j + p] - x) / right_den * cox_de_boor(t, j + 1, order - 1, x, b);
  return value;
}

}  // namespace detail

/// B_i^order(x) by the Cox-de Boor recurrence, i in signed indexing
/// (-k..g+k+1-order). Zero-width denominators contribute nothing.
template <typename Scalar>
Scalar eval_bspline(const KnotSequence<Scalar>& knots, int i, int order, Scalar x) {
  const auto& t = knots.extended();
  const int j = i + knots.degree();
  detail::require(order >= 1, ErrorCode::InvalidParameter, "B-spline order must be positive");
  detail::require(j >= 0 && j + order < static_cast<int>(t.size()), ErrorCode::IndexOutOfRange,
                  "B-spline index " + std::to_string(i) + " of order " + std::to_string(order) +
                      " outside the extended knot sequence");
  detail::require(knots.contains(x), ErrorCode::PointOutsideDomain, "x outside [a,b]");
  return detail::cox_de_boor(t, static_cast<std::size_t>(j), order, x, knots.b());
}

/// All B-splines of the given order (or their deriv-th derivative) at x,
/// indexed by extended index j = i + k. Length: |extended| - order.
///
/// Values come from the triangular recurrence; derivatives by lifting
/// order-(order-deriv) values through the derivative difference formula.
template <typename Scalar>
VectorX<Scalar> bspline_values(const KnotSequence<Scalar>& knots, Scalar x, int order, int deriv = 0) {
  const auto& t = knots.extended();
  const int m = static_cast<int>(t.size());
  detail::require(order >= 1 && order < m, ErrorCode::InvalidParameter, "invalid B-spline order");
  detail::require(deriv >= 0, ErrorCode::InvalidParameter, "derivative order must be nonnegative");
  if (deriv >= order) return VectorX<Scalar>::Zero(m - order);

  const int base = order - deriv;
  VectorX<Scalar> v(m - 1);
  for (int j = 0; j < m - 1; ++j) v(j) = detail::indicator(t, static_cast<std::size_t>(j), x, knots.b());
  for (int q = 2; q <= base; ++q) {
    VectorX<Scalar> next(m - q);
    for (int j = 0; j < m - q; ++j) {
      const auto J = static_cast<std::size_t>(j);
      const auto Q = static_cast<std::size_t>(q);
      next(j) = detail::safe_ratio(x - t[J], t[J + Q - 1] - t[J]) * v(j) +
                detail::safe_ratio(t[J + Q] - x, t[J + Q] - t[J + 1]) * v(j + 1);
    }
    v = std::move(next);
  }
  for (int q = base + 1; q <= order; ++q) {
    VectorX<Scalar> next(m - q);
    for (int j = 0; j < m - q; ++j) {
      const auto J = static_cast<std::size_t>(j);
      const auto Q = static_cast<std::size_t>(q);
      next(j) = Scalar(q - 1) * (detail::safe_ratio(v(j), t[J + Q - 1] - t[J]) -
                                 detail::safe_ratio(v(j + 1), t[J + Q] - t[J + 1]));
    }
    v = std::move(next);
  }
  return v;
}

/// Collocation matrix of the degree-k B-spline basis: entry (r, j) is the
/// deriv-th derivative of B_{j-k}^{k+1} at xs[r].
template <typename Scalar>
MatrixX<Scalar> design_matrix(const KnotSequence<Scalar>& knots, std::span<const Scalar> xs, int deriv = 0) {
  const int k = knots.degree();
  detail::require(deriv >= 0, ErrorCode::InvalidParameter, "derivative order must be nonnegative");
  detail::require(deriv <= k, ErrorCode::DerivOrderTooHigh,
                  "derivative order " + std::to_string(deriv) + " exceeds degree " + std::to_string(k));
  MatrixX<Scalar> out(static_cast<Eigen::Index>(xs.size()), knots.bspline_dimension());
  for (std::size_t r = 0; r < xs.size(); ++r) {
    detail::require(knots.contains(xs[r]), ErrorCode::PointOutsideDomain,
                    "collocation point " + std::to_string(static_cast<double>(xs[r])) + " outside [a,b]");
    out.row(static_cast<Eigen::Index>(r)) = bspline_values(knots, xs[r], k + 1, deriv).transpose();
  }
  return out;
}

template <typename Scalar>
MatrixX<Scalar> design_matrix(const KnotSequence<Scalar>& knots, const std::vector<Scalar>& xs, int deriv = 0) {
  return design_matrix(knots, std::span<const Scalar>(xs), deriv);
}

}  // namespace zbsplinet
