#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zbsplinet/error.hpp"

namespace zbsplinet {

struct Equispaced {};

template <typename Scalar>
using Placement = std::variant<Equispaced, std::vector<Scalar>>;

/// Knots of a spline space of degree k on [a, b]: the strictly increasing
/// inner knots plus the extended sequence with k+1 coincident copies of each
/// endpoint.
///
/// Two indexings are used throughout. The *signed index* i runs over
/// -k..g+k+1 (lambda(i)); the *extended index* j = i + k addresses
/// extended()[j] directly and is what supports are recorded in.
template <typename Scalar = double>
class KnotSequence {
 public:
  KnotSequence(Scalar a, Scalar b, int degree, std::vector<Scalar> inner)
      : a_(a), b_(b), degree_(degree), inner_(std::move(inner)) {
    using detail::require;
    require(degree_ >= 0, ErrorCode::InvalidParameter, "degree must be nonnegative");
    require(std::isfinite(static_cast<double>(a_)) && std::isfinite(static_cast<double>(b_)) && a_ < b_,
            ErrorCode::EmptyInterval, "interval [a,b] must satisfy a < b");
    for (std::size_t i = 0; i < inner_.size(); ++i) {
      require(inner_[i] > a_ && inner_[i] < b_, ErrorCode::KnotOutsideInterval,
              "inner knot " + std::to_string(i + 1) + " not inside (a,b)");
      if (i > 0) {
        require(inner_[i] > inner_[i - 1], ErrorCode::NonIncreasingKnots,
                "inner knots must be strictly increasing at position " + std::to_string(i + 1));
      }
    }
    extended_.reserve(inner_.size() + 2 * static_cast<std::size_t>(degree_ + 1));
    extended_.insert(extended_.end(), static_cast<std::size_t>(degree_ + 1), a_);
    extended_.insert(extended_.end(), inner_.begin(), inner_.end());
    extended_.insert(extended_.end(), static_cast<std::size_t>(degree_ + 1), b_);
    breakpoints_.reserve(inner_.size() + 2);
    breakpoints_.push_back(a_);
    breakpoints_.insert(breakpoints_.end(), inner_.begin(), inner_.end());
    breakpoints_.push_back(b_);
  }

  [[nodiscard]] Scalar a() const noexcept { return a_; }
  [[nodiscard]] Scalar b() const noexcept { return b_; }
  [[nodiscard]] Scalar eta() const noexcept { return b_ - a_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] int g() const noexcept { return static_cast<int>(inner_.size()); }
  [[nodiscard]] const std::vector<Scalar>& inner() const noexcept { return inner_; }
  [[nodiscard]] const std::vector<Scalar>& extended() const noexcept { return extended_; }

  /// a, inner knots, b: the g+1 knot intervals.
  [[nodiscard]] const std::vector<Scalar>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] int interval_count() const noexcept { return g() + 1; }

  /// lambda_i for the signed index i in -k..g+k+1.
  [[nodiscard]] Scalar lambda(int i) const {
    const int j = i + degree_;
    detail::require(j >= 0 && j < static_cast<int>(extended_.size()), ErrorCode::IndexOutOfRange,
                    "knot index " + std::to_string(i) + " outside extended sequence");
    return extended_[static_cast<std::size_t>(j)];
  }

  /// Dimension of the full spline space, g+k+1.
  [[nodiscard]] int bspline_dimension() const noexcept { return g() + degree_ + 1; }

  /// Index of the knot interval [t_c, t_{c+1}) holding x (the last interval is closed).
  [[nodiscard]] int interval_of(Scalar x) const noexcept {
    int lo = 0;
    int hi = interval_count() - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (breakpoints_[static_cast<std::size_t>(mid)] <= x) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  }

  [[nodiscard]] bool contains(Scalar x) const noexcept { return x >= a_ && x <= b_; }

  friend bool operator==(const KnotSequence& l, const KnotSequence& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.degree_ == r.degree_ && l.inner_ == r.inner_;
  }

 private:
  Scalar a_;
  Scalar b_;
  int degree_;
  std::vector<Scalar> inner_;
  std::vector<Scalar> extended_;
  std::vector<Scalar> breakpoints_;
};

/// Builds the knot sequence for g inner knots of a degree-k space on [a,b].
/// Equispaced placement uses lambda_i = a + i(b-a)/(g+1).
template <typename Scalar>
KnotSequence<Scalar> make_knots(Scalar a, Scalar b, int g, int k, const Placement<Scalar>& placement) {
  detail::require(a < b, ErrorCode::EmptyInterval, "interval [a,b] must satisfy a < b");
  detail::require(g >= 0, ErrorCode::InvalidParameter, "number of inner knots must be nonnegative");
  if (const auto* list = std::get_if<std::vector<Scalar>>(&placement)) {
    detail::require(static_cast<int>(list->size()) == g, ErrorCode::DimensionMismatch,
                    "explicit knot list has " + std::to_string(list->size()) + " entries, expected " +
                        std::to_string(g));
    return KnotSequence<Scalar>(a, b, k, *list);
  }
  std::vector<Scalar> inner(static_cast<std::size_t>(g));
  for (int i = 1; i <= g; ++i) {
    inner[static_cast<std::size_t>(i - 1)] = a + Scalar(i) * (b - a) / Scalar(g + 1);
  }
  return KnotSequence<Scalar>(a, b, k, std::move(inner));
}

template <typename Scalar>
KnotSequence<Scalar> make_equispaced_knots(Scalar a, Scalar b, int g, int k) {
  return make_knots<Scalar>(a, b, g, k, Equispaced{});
}

/// Number of inner knots of the fully dyadic layout with N support levels.
constexpr int dyadic_inner_knots(int levels, int degree) noexcept {
  return ((1 << levels) - 1) * (degree + 1) - degree;
}

/// N with g = (2^N - 1)(k+1) - k, or 0 if g is not dyadic for this degree.
constexpr int dyadic_levels(int g, int degree) noexcept {
  for (int n = 1; n < 30; ++n) {
    const int candidate = dyadic_inner_knots(n, degree);
    if (candidate == g) return n;
    if (candidate > g) break;
  }
  return 0;
}

}  // namespace zbsplinet
