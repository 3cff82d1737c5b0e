#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "zbsplinet/error.hpp"

namespace zbsplinet {

/// A function sampled on a strictly increasing grid.
template <typename Scalar = double>
struct GridFunction {
  std::vector<Scalar> xs;
  std::vector<Scalar> values;

  [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
  [[nodiscard]] Scalar eta() const { return xs.back() - xs.front(); }
};

/// Histogram data: bin centres and relative frequencies.
template <typename Scalar = double>
struct DiscreteDensity {
  std::vector<Scalar> midpoints;
  std::vector<Scalar> freqs;
};

enum class ZeroPolicy { Reject, Replace };

/// Zero frequencies are rejected by default. With Replace, each zero
/// becomes epsilon times the smallest positive frequency before the
/// frequencies are renormalized.
template <typename Scalar = double>
struct ZeroHandling {
  ZeroPolicy policy = ZeroPolicy::Reject;
  Scalar epsilon = Scalar(0.5);
};

inline constexpr std::size_t kMaxBayesGrid = 5000;

namespace detail {

template <typename Scalar>
void validate_grid(const GridFunction<Scalar>& f) {
  require(f.xs.size() == f.values.size(), ErrorCode::DimensionMismatch, "grid and values differ in length");
  require(f.xs.size() >= 2, ErrorCode::InvalidParameter, "grid needs at least two points");
  for (std::size_t i = 0; i + 1 < f.xs.size(); ++i) {
    require(f.xs[i] < f.xs[i + 1], ErrorCode::NonIncreasingKnots, "grid must be strictly increasing");
  }
}

template <typename Scalar>
void require_positive(const GridFunction<Scalar>& f) {
  for (Scalar v : f.values) {
    require(v > Scalar(0) && std::isfinite(v), ErrorCode::NonpositiveDensity, "density values must be positive");
  }
}

template <typename Scalar>
void require_same_grid(const GridFunction<Scalar>& f, const GridFunction<Scalar>& h) {
  require(f.xs == h.xs, ErrorCode::GridMismatch, "functions are sampled on different grids");
}

/// Trapezoid weights on a grid.
template <typename Scalar>
std::vector<Scalar> trapezoid_weights(const std::vector<Scalar>& xs) {
  std::vector<Scalar> w(xs.size(), Scalar(0));
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Scalar h = (xs[i + 1] - xs[i]) / Scalar(2);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

}  // namespace detail

/// Composite trapezoid integral of a grid function.
template <typename Scalar>
Scalar trapezoid(const GridFunction<Scalar>& f) {
  detail::validate_grid(f);
  const auto w = detail::trapezoid_weights(f.xs);
  return std::inner_product(w.begin(), w.end(), f.values.begin(), Scalar(0));
}

namespace detail {

template <typename Scalar>
GridFunction<Scalar> normalized(GridFunction<Scalar> f) {
  const Scalar mass = trapezoid(f);
  require(mass > Scalar(0) && std::isfinite(mass), ErrorCode::NumericalBreakdown, "cannot normalize density");
  for (auto& v : f.values) v /= mass;
  return f;
}

}  // namespace detail

/// clr f = ln f - (1/eta) * integral of ln f.
template <typename Scalar>
GridFunction<Scalar> clr(const GridFunction<Scalar>& f) {
  detail::validate_grid(f);
  detail::require_positive(f);
  GridFunction<Scalar> out{f.xs, {}};
  out.values.reserve(f.size());
  for (Scalar v : f.values) out.values.push_back(std::log(v));
  const Scalar mean = trapezoid(out) / f.eta();
  for (auto& v : out.values) v -= mean;
  return out;
}

/// Discrete clr with the plain mean over bins.
template <typename Scalar>
std::vector<Scalar> clr_discrete(const DiscreteDensity<Scalar>& d, const ZeroHandling<Scalar>& zeros = {}) {
  detail::require(!d.freqs.empty(), ErrorCode::InvalidParameter, "empty histogram");
  detail::require(d.midpoints.empty() || d.midpoints.size() == d.freqs.size(), ErrorCode::DimensionMismatch,
                  "midpoints and frequencies differ in length");
  std::vector<Scalar> f = d.freqs;
  Scalar smallest = 0;
  for (Scalar v : f) {
    detail::require(v >= Scalar(0) && std::isfinite(v), ErrorCode::NonpositiveDensity,
                    "frequencies must be nonnegative and finite");
    if (v > Scalar(0) && (smallest == Scalar(0) || v < smallest)) smallest = v;
  }
  detail::require(smallest > Scalar(0), ErrorCode::ZeroFrequency, "all frequencies are zero");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > Scalar(0)) continue;
    detail::require(zeros.policy == ZeroPolicy::Replace, ErrorCode::ZeroFrequency,
                    "zero frequency in bin " + std::to_string(i));
    f[i] = zeros.epsilon * smallest;
  }
  const Scalar total = std::accumulate(f.begin(), f.end(), Scalar(0));
  std::vector<Scalar> y;
  y.reserve(f.size());
  for (Scalar v : f) y.push_back(std::log(v / total));
  const Scalar mean = std::accumulate(y.begin(), y.end(), Scalar(0)) / static_cast<Scalar>(y.size());
  for (auto& v : y) v -= mean;
  return y;
}

/// exp(fc) normalized to unit trapezoid integral.
template <typename Scalar>
GridFunction<Scalar> inv_clr(const GridFunction<Scalar>& fc) {
  detail::validate_grid(fc);
  GridFunction<Scalar> out{fc.xs, {}};
  out.values.reserve(fc.size());
  for (Scalar v : fc.values) {
    detail::require(std::isfinite(v) && v <= Scalar(700), ErrorCode::OverflowRisk,
                    "clr value above 700 would overflow exp");
    out.values.push_back(std::exp(v));
  }
  return detail::normalized(std::move(out));
}

/// Bayes-space addition f (+) h.
template <typename Scalar>
GridFunction<Scalar> perturb(const GridFunction<Scalar>& f, const GridFunction<Scalar>& h) {
  detail::validate_grid(f);
  detail::validate_grid(h);
  detail::require_same_grid(f, h);
  detail::require_positive(f);
  detail::require_positive(h);
  GridFunction<Scalar> out{f.xs, f.values};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= h.values[i];
  return detail::normalized(std::move(out));
}

/// Bayes-space scalar multiple alpha (.) f.
template <typename Scalar>
GridFunction<Scalar> power(Scalar alpha, const GridFunction<Scalar>& f) {
  detail::validate_grid(f);
  detail::require_positive(f);
  GridFunction<Scalar> out{f.xs, f.values};
  for (auto& v : out.values) v = std::pow(v, alpha);
  return detail::normalized(std::move(out));
}

/// (1/(2 eta)) double integral of ln(f(x)/f(y)) ln(h(x)/h(y)) by
/// tensorized trapezoid; quadratic in the grid size.
template <typename Scalar>
Scalar bayes_inner(const GridFunction<Scalar>& f, const GridFunction<Scalar>& h) {
  detail::validate_grid(f);
  detail::validate_grid(h);
  detail::require_same_grid(f, h);
  detail::require(f.size() <= kMaxBayesGrid, ErrorCode::GridTooLarge,
                  "Bayes inner product is limited to " + std::to_string(kMaxBayesGrid) + " grid points");
  detail::require_positive(f);
  detail::require_positive(h);
  const auto w = detail::trapezoid_weights(f.xs);
  const std::size_t n = f.size();
  std::vector<Scalar> lf(n);
  std::vector<Scalar> lh(n);
  for (std::size_t i = 0; i < n; ++i) {
    lf[i] = std::log(f.values[i]);
    lh[i] = std::log(h.values[i]);
  }
  Scalar total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Scalar row = 0;
    for (std::size_t j = 0; j < n; ++j) row += w[j] * (lf[i] - lf[j]) * (lh[i] - lh[j]);
    total += w[i] * row;
  }
  return total / (Scalar(2) * f.eta());
}

}  // namespace zbsplinet
