#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <Eigen/Core>

#include "zbsplinet/error.hpp"

namespace zbsplinet {

template <typename Scalar = double>
struct GaussLegendre {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;    // on [-1, 1]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;  // sum to 2

  /// Maps the rule onto [lo, hi]; returns (nodes, weights).
  [[nodiscard]] std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
  on(Scalar lo, Scalar hi) const {
    const Scalar half = (hi - lo) / Scalar(2);
    const Scalar mid = (hi + lo) / Scalar(2);
    return {(nodes.array() * half + mid).matrix(), (weights * half).eval()};
  }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
/// Nodes come from Newton iteration on P_n started at the Chebyshev guess.
template <typename Scalar = double>
GaussLegendre<Scalar> gauss_legendre(int n) {
  detail::require(n >= 1, ErrorCode::InvalidParameter, "quadrature needs at least one node");
  GaussLegendre<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1;
      Scalar p1 = x;
      for (int m = 2; m <= n; ++m) {
        const Scalar p2 = ((Scalar(2 * m - 1)) * x * p1 - Scalar(m - 1) * p0) / Scalar(m);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar step = p1 / dp;
      x -= step;
      if (std::abs(step) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    // recompute derivative at the converged node
    Scalar p0 = 1;
    Scalar p1 = x;
    for (int m = 2; m <= n; ++m) {
      const Scalar p2 = ((Scalar(2 * m - 1)) * x * p1 - Scalar(m - 1) * p0) / Scalar(m);
      p0 = p1;
      p1 = p2;
    }
    dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes((n - 1) / 2) = Scalar(0);
  return rule;
}

/// Per-interval node count used for integrating a degree-k spline:
/// ceil((k+1)/2) + 1, one more than exactness requires.
constexpr int integral_nodes(int degree) noexcept { return (degree + 2) / 2 + 1; }

/// Per-interval node count for products of l-th derivatives of degree-k
/// splines (degree 2(k-l)): ceil((2(k-l)+1)/2) + 1.
constexpr int product_nodes(int degree, int deriv) noexcept { return (degree - deriv) + 2; }

}  // namespace zbsplinet
