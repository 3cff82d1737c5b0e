#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zbsplinet/bspline.hpp"
#include "zbsplinet/error.hpp"
#include "zbsplinet/quadrature.hpp"
#include "zbsplinet/spline.hpp"
#include "zbsplinet/zb_basis.hpp"

namespace zbsplinet {

/// Instrumentation context: counts evaluated inner products. Single owner;
/// pass a distinct instance to each concurrent orthogonalization.
struct InnerProductCounter {
  std::size_t count = 0;
};

namespace detail {

template <typename Scalar>
void require_same_knots(const Spline<Scalar>& s1, const Spline<Scalar>& s2) {
  require(s1.knots() == s2.knots(), ErrorCode::KnotMismatch, "splines live on different knot sequences");
}

template <typename Scalar>
void require_deriv(const KnotSequence<Scalar>& knots, int l) {
  require(l >= 0, ErrorCode::InvalidParameter, "derivative order must be nonnegative");
  require(l <= knots.degree(), ErrorCode::DerivOrderTooHigh,
          "derivative order " + std::to_string(l) + " exceeds degree " + std::to_string(knots.degree()));
}

}  // namespace detail

/// Per-interval Gram matrices of the l-th derivatives of the B-spline basis:
/// element c holds the integral over the c-th knot interval.
template <typename Scalar>
std::vector<MatrixX<Scalar>> bspline_interval_grams(const KnotSequence<Scalar>& knots, int l) {
  detail::require_deriv(knots, l);
  const auto& br = knots.breakpoints();
  const int dim = knots.bspline_dimension();
  const auto rule = gauss_legendre<Scalar>(product_nodes(knots.degree(), l));
  std::vector<MatrixX<Scalar>> out;
  out.reserve(br.size() - 1);
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    const auto [xs, ws] = rule.on(br[c], br[c + 1]);
    MatrixX<Scalar> values(xs.size(), dim);
    for (Eigen::Index q = 0; q < xs.size(); ++q) {
      values.row(q) = bspline_values(knots, xs(q), knots.degree() + 1, l).transpose();
    }
    out.push_back(values.transpose() * ws.asDiagonal() * values);
  }
  return out;
}

/// Exact Gram matrix of l-th derivatives of the B-spline basis.
template <typename Scalar>
MatrixX<Scalar> bspline_gram(const KnotSequence<Scalar>& knots, int l) {
  MatrixX<Scalar> g = MatrixX<Scalar>::Zero(knots.bspline_dimension(), knots.bspline_dimension());
  for (const auto& block : bspline_interval_grams(knots, l)) g += block;
  return g;
}

/// Exact Gram matrix of l-th derivatives of the ZB basis, (DK)^T G_B (DK).
template <typename Scalar>
MatrixX<Scalar> zb_gram(const KnotSequence<Scalar>& knots, int l) {
  const MatrixX<Scalar> dk = zb_conversion(knots).dk();
  return dk.transpose() * bspline_gram(knots, l) * dk;
}

/// Per-interval ZB Gram blocks, same layout as bspline_interval_grams.
template <typename Scalar>
std::vector<MatrixX<Scalar>> zb_interval_grams(const KnotSequence<Scalar>& knots, int l) {
  const MatrixX<Scalar> dk = zb_conversion(knots).dk();
  auto blocks = bspline_interval_grams(knots, l);
  for (auto& block : blocks) block = (dk.transpose() * block * dk).eval();
  return blocks;
}

/// Integral of s1^(l) s2^(l) over [a,b], exact by per-interval Gauss-Legendre.
/// The counter (if given) is charged only when the structural supports of
/// the two splines overlap on a set of positive length.
template <typename Scalar>
Scalar l2_inner(const Spline<Scalar>& s1, const Spline<Scalar>& s2, int l, InnerProductCounter* counter = nullptr) {
  detail::require_same_knots(s1, s2);
  const auto& knots = s1.knots();
  detail::require_deriv(knots, l);
  const auto sup1 = structural_support(s1);
  const auto sup2 = structural_support(s2);
  if (!sup1 || !sup2 || !supports_overlap(knots, *sup1, *sup2)) return Scalar(0);
  if (counter != nullptr) ++counter->count;

  const auto& t = knots.extended();
  const Scalar lo = std::max(t[static_cast<std::size_t>(sup1->first)], t[static_cast<std::size_t>(sup2->first)]);
  const Scalar hi = std::min(t[static_cast<std::size_t>(sup1->last)], t[static_cast<std::size_t>(sup2->last)]);
  const VectorX<Scalar> b1 = s1.bspline_coefficients();
  const VectorX<Scalar> b2 = s2.bspline_coefficients();
  const auto rule = gauss_legendre<Scalar>(product_nodes(knots.degree(), l));
  const auto& br = knots.breakpoints();
  Scalar total = 0;
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    if (br[c + 1] <= lo || br[c] >= hi) continue;
    const auto [xs, ws] = rule.on(br[c], br[c + 1]);
    for (Eigen::Index q = 0; q < xs.size(); ++q) {
      const VectorX<Scalar> row = bspline_values(knots, xs(q), knots.degree() + 1, l);
      total += ws(q) * row.dot(b1) * row.dot(b2);
    }
  }
  return total;
}

template <typename Scalar>
struct GramMatrix {
  MatrixX<Scalar> entries;
  BasisKind basis = BasisKind::ZBSpline;
  int deriv_order = 0;
};

/// Pairwise l2_inner of a list of splines on shared knots. Each unordered
/// overlapping pair (self-pairs included) is evaluated, and counted, once.
template <typename Scalar>
GramMatrix<Scalar> gram(std::span<const Spline<Scalar>> fns, int l, InnerProductCounter* counter = nullptr) {
  GramMatrix<Scalar> out;
  out.deriv_order = l;
  const auto n = static_cast<Eigen::Index>(fns.size());
  out.entries = MatrixX<Scalar>::Zero(n, n);
  if (fns.empty()) return out;
  out.basis = fns.front().kind();
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::require_same_knots(fns.front(), fns[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i; j < n; ++j) {
      const Scalar v = l2_inner(fns[static_cast<std::size_t>(i)], fns[static_cast<std::size_t>(j)], l, counter);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  return out;
}

template <typename Scalar>
GramMatrix<Scalar> gram(const std::vector<Spline<Scalar>>& fns, int l, InnerProductCounter* counter = nullptr) {
  return gram(std::span<const Spline<Scalar>>(fns), l, counter);
}

/// Number of entries with |m_ij| > threshold.
template <typename Derived>
std::size_t nonzero_count(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar threshold) {
  detail::require(threshold >= 0, ErrorCode::InvalidParameter, "threshold must be nonnegative");
  return static_cast<std::size_t>((m.array().abs() > threshold).count());
}

/// L2 norm of s on each knot interval.
template <typename Scalar>
VectorX<Scalar> interval_l2_norms(const Spline<Scalar>& s) {
  const auto& knots = s.knots();
  const auto& br = knots.breakpoints();
  const auto rule = gauss_legendre<Scalar>(product_nodes(knots.degree(), 0));
  const VectorX<Scalar> b = s.bspline_coefficients();
  VectorX<Scalar> out(static_cast<Eigen::Index>(br.size() - 1));
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    const auto [xs, ws] = rule.on(br[c], br[c + 1]);
    Scalar acc = 0;
    for (Eigen::Index q = 0; q < xs.size(); ++q) {
      const Scalar v = bspline_values(knots, xs(q), knots.degree() + 1).dot(b);
      acc += ws(q) * v * v;
    }
    out(static_cast<Eigen::Index>(c)) = std::sqrt(acc);
  }
  return out;
}

}  // namespace zbsplinet
