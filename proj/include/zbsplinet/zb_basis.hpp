#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zbsplinet/bspline.hpp"
#include "zbsplinet/error.hpp"
#include "zbsplinet/knots.hpp"

namespace zbsplinet {

/// Dimension g+k of the zero-integral spline space.
template <typename Scalar>
int zb_dimension(const KnotSequence<Scalar>& knots) {
  const int dim = knots.g() + knots.degree();
  detail::require(dim >= 1, ErrorCode::DegenerateSpace, "zero-integral space with g=0, k=0 is trivial");
  return dim;
}

/// b = D K z: D is diagonal with (k+1)/(lambda_{i+k+1} - lambda_i) over the
/// extended sequence, K is (g+k+1)x(g+k) with +1 on the diagonal and -1 below.
template <typename Scalar>
struct ZbConversion {
  VectorX<Scalar> d;  // diagonal of D
  MatrixX<Scalar> k;  // K

  [[nodiscard]] MatrixX<Scalar> dk() const { return d.asDiagonal() * k; }
};

template <typename Scalar>
ZbConversion<Scalar> zb_conversion(const KnotSequence<Scalar>& knots) {
  const int n = zb_dimension(knots);
  const int deg = knots.degree();
  const auto& t = knots.extended();
  ZbConversion<Scalar> c;
  c.d.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    c.d(j) = Scalar(deg + 1) / (t[J + static_cast<std::size_t>(deg) + 1] - t[J]);
  }
  c.k = MatrixX<Scalar>::Zero(n + 1, n);
  for (int j = 0; j < n; ++j) {
    c.k(j, j) = Scalar(1);
    c.k(j + 1, j) = Scalar(-1);
  }
  return c;
}

/// B-spline coefficients of the spline with ZB coefficients z.
template <typename Scalar>
VectorX<Scalar> zb_to_b(const KnotSequence<Scalar>& knots, const VectorX<Scalar>& z) {
  const int n = zb_dimension(knots);
  detail::require(z.size() == n, ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(n) + " ZB coefficients, got " + std::to_string(z.size()));
  const auto c = zb_conversion(knots);
  VectorX<Scalar> b(n + 1);
  for (int j = 0; j <= n; ++j) {
    const Scalar cur = j < n ? z(j) : Scalar(0);
    const Scalar prev = j > 0 ? z(j - 1) : Scalar(0);
    b(j) = c.d(j) * (cur - prev);
  }
  return b;
}

/// Z_i^{k+1}(x) for the signed index i in -k..g-1, from the B-spline
/// difference formula.
template <typename Scalar>
Scalar eval_zbspline(const KnotSequence<Scalar>& knots, int i, Scalar x) {
  const int deg = knots.degree();
  detail::require(i >= -deg && i <= knots.g() - 1, ErrorCode::IndexOutOfRange,
                  "ZB-spline index " + std::to_string(i) + " outside -k..g-1");
  detail::require(knots.contains(x), ErrorCode::PointOutsideDomain, "x outside [a,b]");
  const auto& t = knots.extended();
  const auto j = static_cast<std::size_t>(i + deg);
  const auto K = static_cast<std::size_t>(deg);
  const Scalar left = eval_bspline(knots, i, deg + 1, x) / (t[j + K + 1] - t[j]);
  const Scalar right = eval_bspline(knots, i + 1, deg + 1, x) / (t[j + K + 2] - t[j + 1]);
  return Scalar(deg + 1) * (left - right);
}

/// All ZB-splines (or their deriv-th derivatives) at x, 0-based storage.
template <typename Scalar>
VectorX<Scalar> zbspline_values(const KnotSequence<Scalar>& knots, Scalar x, int deriv = 0) {
  const int n = zb_dimension(knots);
  const auto c = zb_conversion(knots);
  const VectorX<Scalar> bv = bspline_values(knots, x, knots.degree() + 1, deriv);
  VectorX<Scalar> out(n);
  for (int m = 0; m < n; ++m) out(m) = c.d(m) * bv(m) - c.d(m + 1) * bv(m + 1);
  return out;
}

template <typename Scalar>
MatrixX<Scalar> zb_design_matrix(const KnotSequence<Scalar>& knots, std::span<const Scalar> xs, int deriv = 0) {
  const int k = knots.degree();
  detail::require(deriv >= 0, ErrorCode::InvalidParameter, "derivative order must be nonnegative");
  detail::require(deriv <= k, ErrorCode::DerivOrderTooHigh,
                  "derivative order " + std::to_string(deriv) + " exceeds degree " + std::to_string(k));
  const int n = zb_dimension(knots);
  MatrixX<Scalar> out(static_cast<Eigen::Index>(xs.size()), n);
  for (std::size_t r = 0; r < xs.size(); ++r) {
    detail::require(knots.contains(xs[r]), ErrorCode::PointOutsideDomain,
                    "collocation point " + std::to_string(static_cast<double>(xs[r])) + " outside [a,b]");
    out.row(static_cast<Eigen::Index>(r)) = zbspline_values(knots, xs[r], deriv).transpose();
  }
  return out;
}

template <typename Scalar>
MatrixX<Scalar> zb_design_matrix(const KnotSequence<Scalar>& knots, const std::vector<Scalar>& xs, int deriv = 0) {
  return zb_design_matrix(knots, std::span<const Scalar>(xs), deriv);
}

/// Closed support [first, last] of a function in extended-knot indices.
struct SupportRange {
  int first = 0;
  int last = 0;

  [[nodiscard]] SupportRange hull(const SupportRange& o) const {
    return {first < o.first ? first : o.first, last > o.last ? last : o.last};
  }
  friend bool operator==(const SupportRange&, const SupportRange&) = default;
};

/// supp Z_i^{k+1} = [lambda_i, lambda_{i+k+2}] for storage index m = i + k.
template <typename Scalar>
SupportRange zb_support(const KnotSequence<Scalar>& knots, int m) {
  return {m, m + knots.degree() + 2};
}

/// True when the two supports intersect in a set of positive length.
template <typename Scalar>
bool supports_overlap(const KnotSequence<Scalar>& knots, const SupportRange& s, const SupportRange& r) {
  const auto& t = knots.extended();
  const Scalar lo = std::max(t[static_cast<std::size_t>(s.first)], t[static_cast<std::size_t>(r.first)]);
  const Scalar hi = std::min(t[static_cast<std::size_t>(s.last)], t[static_cast<std::size_t>(r.last)]);
  return lo < hi;
}

}  // namespace zbsplinet
