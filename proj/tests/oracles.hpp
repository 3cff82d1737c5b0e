#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's evaluation or quadrature code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "zbsplinet/error.hpp"

namespace oracle {

/// B-spline of the given order over knots t[j..j+order] straight from the
/// recursive definition, half-open intervals, last interval closed at b.
inline double bspline(const std::vector<double>& t, std::size_t j, int order, double x) {
  const double b = t.back();
  if (order == 1) {
    if (t[j] < t[j + 1] && ((x >= t[j] && x < t[j + 1]) || (x == b && t[j + 1] == b))) return 1.0;
    return 0.0;
  }
  const auto o = static_cast<std::size_t>(order);
  double left = 0.0;
  double right = 0.0;
  if (t[j + o - 1] > t[j]) left = (x - t[j]) / (t[j + o - 1] - t[j]) * bspline(t, j, order - 1, x);
  if (t[j + o] > t[j + 1]) right = (t[j + o] - x) / (t[j + o] - t[j + 1]) * bspline(t, j + 1, order - 1, x);
  return left + right;
}

/// Extended knot vector with `copies` copies of a and b.
inline std::vector<double> extended(double a, double b, const std::vector<double>& inner, int copies) {
  std::vector<double> t(static_cast<std::size_t>(copies), a);
  t.insert(t.end(), inner.begin(), inner.end());
  t.insert(t.end(), static_cast<std::size_t>(copies), b);
  return t;
}

/// Composite trapezoid rule with n points.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / (n - 1);
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n - 1; ++i) s += f(a + i * h);
  return s * h;
}

/// Sorted random inner knots in (a,b), separated by at least gap.
inline std::vector<double> random_knots(std::mt19937& rng, double a, double b, int g, double gap = 1e-3) {
  std::uniform_real_distribution<double> u(a, b);
  while (true) {
    std::vector<double> k(static_cast<std::size_t>(g));
    for (auto& v : k) v = u(rng);
    std::sort(k.begin(), k.end());
    bool ok = true;
    double prev = a;
    for (double v : k) {
      if (v - prev < gap) ok = false;
      prev = v;
    }
    if (b - prev < gap) ok = false;
    if (ok) return k;
  }
}

template <typename F>
bool throws_code(F&& f, zbsplinet::ErrorCode code) {
  try {
    f();
  } catch (const zbsplinet::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace oracle
