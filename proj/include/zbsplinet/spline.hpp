#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "zbsplinet/bspline.hpp"
#include "zbsplinet/error.hpp"
#include "zbsplinet/knots.hpp"
#include "zbsplinet/quadrature.hpp"
#include "zbsplinet/zb_basis.hpp"

namespace zbsplinet {

enum class Strategy { GsLeftRight, GsRightLeft, GsTwoSided, Splinet };

inline constexpr Strategy kAllStrategies[] = {Strategy::GsLeftRight, Strategy::GsRightLeft, Strategy::GsTwoSided,
                                              Strategy::Splinet};

constexpr std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::GsLeftRight: return "gs-lr";
    case Strategy::GsRightLeft: return "gs-rl";
    case Strategy::GsTwoSided: return "gs-two-sided";
    case Strategy::Splinet: return "splinet";
  }
  return "unknown";
}

inline Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidParameter, "unknown strategy '" + std::string(name) + "'");
}

enum class BasisKind { BSpline, ZBSpline, Ortho };

/// A spline as coefficients over one of the three bases on a knot sequence.
/// Orthogonalized splines share the transform Phi with the basis that made
/// them (O = Phi Z), so the ZB coefficients are Phi^T o.
template <typename Scalar = double>
class Spline {
 public:
  static Spline bspline(KnotSequence<Scalar> knots, VectorX<Scalar> coeffs) {
    detail::require(coeffs.size() == knots.bspline_dimension(), ErrorCode::DimensionMismatch,
                    "B-spline coefficients must have length g+k+1");
    return Spline(std::move(knots), BasisKind::BSpline, std::move(coeffs), nullptr, Strategy::GsLeftRight);
  }

  static Spline zbspline(KnotSequence<Scalar> knots, VectorX<Scalar> coeffs) {
    detail::require(coeffs.size() == zb_dimension(knots), ErrorCode::DimensionMismatch,
                    "ZB-spline coefficients must have length g+k");
    return Spline(std::move(knots), BasisKind::ZBSpline, std::move(coeffs), nullptr, Strategy::GsLeftRight);
  }

  static Spline ortho(KnotSequence<Scalar> knots, Strategy strategy, std::shared_ptr<const MatrixX<Scalar>> phi,
                      VectorX<Scalar> coeffs) {
    const int n = zb_dimension(knots);
    detail::require(phi != nullptr && phi->rows() == n && phi->cols() == n, ErrorCode::DimensionMismatch,
                    "orthogonalization transform must be (g+k)x(g+k)");
    detail::require(coeffs.size() == n, ErrorCode::DimensionMismatch,
                    "orthogonal-basis coefficients must have length g+k");
    return Spline(std::move(knots), BasisKind::Ortho, std::move(coeffs), std::move(phi), strategy);
  }

  [[nodiscard]] const KnotSequence<Scalar>& knots() const noexcept { return knots_; }
  [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
  [[nodiscard]] Strategy strategy() const noexcept { return strategy_; }
  [[nodiscard]] const VectorX<Scalar>& coeffs() const noexcept { return coeffs_; }

  /// ZB coefficients; only defined for zero-integral bases.
  [[nodiscard]] VectorX<Scalar> zb_coefficients() const {
    switch (kind_) {
      case BasisKind::ZBSpline: return coeffs_;
      case BasisKind::Ortho: return phi_->transpose() * coeffs_;
      case BasisKind::BSpline: break;
    }
    throw Error(ErrorCode::InvalidParameter, "B-basis spline has no ZB representation in general");
  }

  [[nodiscard]] VectorX<Scalar> bspline_coefficients() const {
    if (kind_ == BasisKind::BSpline) return coeffs_;
    return zb_to_b(knots_, zb_coefficients());
  }

  /// deriv-th derivative at x.
  [[nodiscard]] Scalar operator()(Scalar x, int deriv = 0) const {
    detail::require(knots_.contains(x), ErrorCode::PointOutsideDomain, "x outside [a,b]");
    return bspline_values(knots_, x, knots_.degree() + 1, deriv).dot(bspline_coefficients());
  }

  [[nodiscard]] VectorX<Scalar> evaluate(const std::vector<Scalar>& xs, int deriv = 0) const {
    const VectorX<Scalar> b = bspline_coefficients();
    VectorX<Scalar> out(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t r = 0; r < xs.size(); ++r) {
      detail::require(knots_.contains(xs[r]), ErrorCode::PointOutsideDomain, "x outside [a,b]");
      out(static_cast<Eigen::Index>(r)) = bspline_values(knots_, xs[r], knots_.degree() + 1, deriv).dot(b);
    }
    return out;
  }

 private:
  Spline(KnotSequence<Scalar> knots, BasisKind kind, VectorX<Scalar> coeffs,
         std::shared_ptr<const MatrixX<Scalar>> phi, Strategy strategy)
      : knots_(std::move(knots)), kind_(kind), coeffs_(std::move(coeffs)), phi_(std::move(phi)),
        strategy_(strategy) {}

  KnotSequence<Scalar> knots_;
  BasisKind kind_;
  VectorX<Scalar> coeffs_;
  std::shared_ptr<const MatrixX<Scalar>> phi_;
  Strategy strategy_;
};

/// Structural support from the non-zero B-spline coefficients, in extended
/// indices; empty for the zero spline.
template <typename Scalar>
std::optional<SupportRange> structural_support(const Spline<Scalar>& s) {
  const VectorX<Scalar> b = s.bspline_coefficients();
  int first = -1;
  int last = -1;
  for (int j = 0; j < b.size(); ++j) {
    if (b(j) != Scalar(0)) {
      if (first < 0) first = j;
      last = j;
    }
  }
  if (first < 0) return std::nullopt;
  return SupportRange{first, last + s.knots().degree() + 1};
}

/// Integral over [a,b] by per-interval Gauss-Legendre (exact for degree k).
template <typename Scalar>
Scalar spline_integral(const Spline<Scalar>& s) {
  const auto& knots = s.knots();
  const auto& br = knots.breakpoints();
  const auto rule = gauss_legendre<Scalar>(integral_nodes(knots.degree()));
  const VectorX<Scalar> b = s.bspline_coefficients();
  Scalar total = 0;
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    const auto [xs, ws] = rule.on(br[c], br[c + 1]);
    for (Eigen::Index q = 0; q < xs.size(); ++q) {
      total += ws(q) * bspline_values(knots, xs(q), knots.degree() + 1).dot(b);
    }
  }
  return total;
}

}  // namespace zbsplinet
