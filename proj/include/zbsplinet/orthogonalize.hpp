#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zbsplinet/error.hpp"
#include "zbsplinet/inner_product.hpp"
#include "zbsplinet/knots.hpp"
#include "zbsplinet/spline.hpp"
#include "zbsplinet/zb_basis.hpp"

namespace zbsplinet {

/// Orthonormal basis O = Phi Z of the zero-integral spline space.
///
/// Row r of phi holds the ZB coefficients of O_r. supports[r] is the
/// bookkept support (extended-knot indices) and always contains the true
/// numerical support. ip_count is the number of inner products the
/// construction evaluated; normalizations are not counted.
template <typename Scalar = double>
struct OrthoBasis {
  KnotSequence<Scalar> knots;
  Strategy strategy = Strategy::GsLeftRight;
  std::shared_ptr<const MatrixX<Scalar>> phi;
  std::vector<SupportRange> supports;
  std::size_t ip_count = 0;
  /// Splinet level of each function (1 = bottom); empty for Gram-Schmidt.
  std::vector<int> levels;
  /// False for a splinet stopped before its top level.
  bool complete = true;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(phi->rows()); }
  [[nodiscard]] const MatrixX<Scalar>& transform() const noexcept { return *phi; }

  /// O_r as a ZB-basis spline.
  [[nodiscard]] Spline<Scalar> function(int r) const {
    detail::require(r >= 0 && r < size(), ErrorCode::IndexOutOfRange, "basis function index out of range");
    return Spline<Scalar>::zbspline(knots, phi->row(r).transpose());
  }

  [[nodiscard]] std::vector<Spline<Scalar>> functions() const {
    std::vector<Spline<Scalar>> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int r = 0; r < size(); ++r) out.push_back(function(r));
    return out;
  }

  /// The spline sum_r o_r O_r.
  [[nodiscard]] Spline<Scalar> expand(const VectorX<Scalar>& o) const {
    return Spline<Scalar>::ortho(knots, strategy, phi, o);
  }

  /// Coordinates of a zero-integral spline in this basis, o_r = <s, O_r>.
  [[nodiscard]] VectorX<Scalar> coordinates(const Spline<Scalar>& s) const {
    detail::require(s.knots() == knots, ErrorCode::KnotMismatch, "spline and basis use different knots");
    return coordinates_of_zb(s.zb_coefficients());
  }

  [[nodiscard]] VectorX<Scalar> coordinates_of_zb(const VectorX<Scalar>& z) const {
    return (*phi) * (zb_gram(knots, 0) * z);
  }

  /// Collocation matrix O(xs) (rows = points) of the deriv-th derivatives.
  [[nodiscard]] MatrixX<Scalar> collocation(const std::vector<Scalar>& xs, int deriv = 0) const {
    return zb_design_matrix(knots, xs, deriv) * phi->transpose();
  }

  /// Gram matrix of l-th derivatives, N_kl for l >= 1.
  [[nodiscard]] MatrixX<Scalar> penalty(int l) const {
    return (*phi) * zb_gram(knots, l) * phi->transpose();
  }
};

/// A group of k+1 consecutive ZB-splines in the dyadic net.
struct Tuplet {
  int first = 0;  // storage index of the first member
  int size = 0;
  int level = 1;  // 1 = bottom
};

/// Dyadic structure for g = (2^N - 1)(k+1) - k: tuplet t (0-based) sits on
/// level 1 + (number of trailing zero bits of t+1), so level l holds 2^(N-l)
/// tuplets with pairwise disjoint supports.
struct DyadicNet {
  int levels = 0;
  int degree = 0;
  std::vector<Tuplet> tuplets;

  [[nodiscard]] std::vector<Tuplet> level(int l) const {
    std::vector<Tuplet> out;
    for (const auto& t : tuplets) {
      if (t.level == l) out.push_back(t);
    }
    return out;
  }
};

template <typename Scalar>
DyadicNet make_dyadic_net(const KnotSequence<Scalar>& knots) {
  const int k = knots.degree();
  const int n_levels = dyadic_levels(knots.g(), k);
  detail::require(n_levels > 0, ErrorCode::NonDyadicKnots,
                  "g=" + std::to_string(knots.g()) + " is not (2^N-1)(k+1)-k for degree " + std::to_string(k));
  DyadicNet net;
  net.levels = n_levels;
  net.degree = k;
  const int count = (1 << n_levels) - 1;
  for (int t = 0; t < count; ++t) {
    net.tuplets.push_back({t * (k + 1), k + 1, 1 + std::countr_zero(static_cast<unsigned>(t + 1))});
  }
  return net;
}

enum class Direction { LeftToRight, RightToLeft };

namespace detail {

/// A function under construction: ZB coefficients plus bookkept support.
template <typename Scalar>
struct Working {
  VectorX<Scalar> zb;
  SupportRange support;
};

/// Exact inner products through the ZB Gram matrix, charging the counter
/// only for pairs whose supports overlap.
template <typename Scalar>
class Workspace {
 public:
  Workspace(const KnotSequence<Scalar>& knots, InnerProductCounter& counter)
      : knots_(knots), gram_(zb_gram(knots, 0)), counter_(counter) {}

  [[nodiscard]] bool overlap(const Working<Scalar>& f, const Working<Scalar>& h) const {
    return supports_overlap(knots_, f.support, h.support);
  }

  /// <f,h>, zero without a charge when supports are disjoint.
  Scalar inner(const Working<Scalar>& f, const Working<Scalar>& h) {
    if (!overlap(f, h)) return Scalar(0);
    ++counter_.count;
    return f.zb.dot(gram_ * h.zb);
  }

  [[nodiscard]] Scalar norm(const Working<Scalar>& f) const { return std::sqrt(f.zb.dot(gram_ * f.zb)); }

  void normalize(Working<Scalar>& f, Scalar reference) const {
    const Scalar nrm = norm(f);
    require(nrm > Scalar(1e-13) * std::max(Scalar(1), reference), ErrorCode::NumericalBreakdown,
            "norm collapsed during orthogonalization; input functions are linearly dependent");
    f.zb /= nrm;
  }

  [[nodiscard]] const KnotSequence<Scalar>& knots() const noexcept { return knots_; }

 private:
  const KnotSequence<Scalar>& knots_;
  MatrixX<Scalar> gram_;
  InnerProductCounter& counter_;
};

/// Classical Gram-Schmidt in the given order; output keeps input order.
template <typename Scalar>
std::vector<Working<Scalar>> one_sided(const std::vector<Working<Scalar>>& in, Direction dir, Workspace<Scalar>& ws) {
  const std::size_t n = in.size();
  std::vector<Working<Scalar>> produced;
  produced.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    const auto& source = in[dir == Direction::LeftToRight ? step : n - 1 - step];
    Working<Scalar> next = source;
    for (const auto& o : produced) {
      if (!ws.overlap(source, o)) continue;
      next.zb -= ws.inner(source, o) * o.zb;
      next.support = next.support.hull(o.support);
    }
    ws.normalize(next, ws.norm(source));
    produced.push_back(std::move(next));
  }
  if (dir == Direction::RightToLeft) std::reverse(produced.begin(), produced.end());
  return produced;
}

/// Modified Gram-Schmidt of f against every already-orthonormal function
/// reachable through support overlap, newest first. A function disjoint
/// from the grown support is orthogonal to the result without projection.
template <typename Scalar>
void project_closure(Working<Scalar>& f, const std::vector<Working<Scalar>>& done, Workspace<Scalar>& ws) {
  std::vector<bool> used(done.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t r = done.size(); r-- > 0;) {
      if (used[r] || !ws.overlap(f, done[r])) continue;
      f.zb -= ws.inner(f, done[r]) * done[r].zb;
      f.support = f.support.hull(done[r].support);
      used[r] = true;
      changed = true;
    }
  }
}

/// Symmetric orthonormalization of two unit-norm functions.
template <typename Scalar>
void symmetric_pair(Working<Scalar>& fi, Working<Scalar>& fj, Workspace<Scalar>& ws) {
  const Scalar c = ws.inner(fi, fj);
  require(std::abs(c) < Scalar(1) - Scalar(1e-13), ErrorCode::NumericalBreakdown,
          "pair of central functions is (nearly) collinear");
  const Scalar plus = Scalar(1) / std::sqrt(Scalar(1) + c);
  const Scalar minus = Scalar(1) / std::sqrt(Scalar(1) - c);
  const VectorX<Scalar> zi = fi.zb;
  const VectorX<Scalar> zj = fj.zb;
  fi.zb = (plus + minus) / Scalar(2) * zi + (plus - minus) / Scalar(2) * zj;
  fj.zb = (plus - minus) / Scalar(2) * zi + (plus + minus) / Scalar(2) * zj;
  const SupportRange joint = fi.support.hull(fj.support);
  fi.support = joint;
  fj.support = joint;
}

/// Symmetric two-sided Gram-Schmidt. Functions whose support lies left of
/// the midpoint of the joint support (in extended-knot indices) go
/// left-to-right, those right of it right-to-left; the straddling ones are
/// paired outermost-first and orthonormalized symmetrically.
template <typename Scalar>
std::vector<Working<Scalar>> two_sided(const std::vector<Working<Scalar>>& in, Workspace<Scalar>& ws) {
  if (in.empty()) return {};
  int lo = in.front().support.first;
  int hi = in.front().support.last;
  for (const auto& f : in) {
    lo = std::min(lo, f.support.first);
    hi = std::max(hi, f.support.last);
  }
  const int mid2 = lo + hi;  // twice the midpoint
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::vector<std::size_t> central;
  for (std::size_t r = 0; r < in.size(); ++r) {
    if (2 * in[r].support.last <= mid2) {
      left.push_back(r);
    } else if (2 * in[r].support.first >= mid2) {
      right.push_back(r);
    } else {
      central.push_back(r);
    }
  }
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<Working<Scalar>> out;
    for (auto r : idx) out.push_back(in[r]);
    return out;
  };
  const auto left_out = one_sided(pick(left), Direction::LeftToRight, ws);
  const auto right_out = one_sided(pick(right), Direction::RightToLeft, ws);

  std::vector<Working<Scalar>> result(in.size());
  std::vector<Working<Scalar>> done;
  for (std::size_t r = 0; r < left.size(); ++r) {
    result[left[r]] = left_out[r];
    done.push_back(left_out[r]);
  }
  for (std::size_t r = right.size(); r-- > 0;) {
    result[right[r]] = right_out[r];
    done.push_back(right_out[r]);
  }

  std::size_t p = 0;
  std::size_t q = central.size();
  while (q >= p + 2) {
    --q;
    Working<Scalar> fi = in[central[p]];
    Working<Scalar> fj = in[central[q]];
    const Scalar ni = ws.norm(fi);
    const Scalar nj = ws.norm(fj);
    project_closure(fi, done, ws);
    project_closure(fj, done, ws);
    ws.normalize(fi, ni);
    ws.normalize(fj, nj);
    symmetric_pair(fi, fj, ws);
    result[central[p]] = fi;
    result[central[q]] = fj;
    done.push_back(fi);
    done.push_back(fj);
    ++p;
  }
  if (q == p + 1) {
    Working<Scalar> f = in[central[p]];
    const Scalar nf = ws.norm(f);
    project_closure(f, done, ws);
    ws.normalize(f, nf);
    result[central[p]] = f;
  }
  return result;
}

/// Dyadic orthogonalization over levels 1..level_limit.
template <typename Scalar>
std::vector<Working<Scalar>> dyadic(std::vector<Working<Scalar>> fns, const DyadicNet& net, int level_limit,
                                    Workspace<Scalar>& ws) {
  const int tuplet_count = static_cast<int>(net.tuplets.size());
  const int stop = std::min(level_limit, net.levels);
  for (int l = 1; l <= stop; ++l) {
    for (const auto& tup : net.tuplets) {
      if (tup.level != l) continue;
      std::vector<Working<Scalar>> members(fns.begin() + tup.first, fns.begin() + tup.first + tup.size);
      auto out = two_sided(members, ws);
      std::copy(out.begin(), out.end(), fns.begin() + tup.first);
    }
    const int stride = 1 << (l - 1);
    for (int t = 0; t < tuplet_count; ++t) {
      const auto& tup = net.tuplets[static_cast<std::size_t>(t)];
      if (tup.level <= l) continue;
      std::vector<const Working<Scalar>*> neighbours;
      for (int u : {t - stride, t + stride}) {
        if (u < 0 || u >= tuplet_count) continue;
        const auto& nb = net.tuplets[static_cast<std::size_t>(u)];
        for (int m = nb.first; m < nb.first + nb.size; ++m) neighbours.push_back(&fns[static_cast<std::size_t>(m)]);
      }
      for (int m = tup.first; m < tup.first + tup.size; ++m) {
        const Working<Scalar> source = fns[static_cast<std::size_t>(m)];
        Working<Scalar> next = source;
        for (const auto* o : neighbours) {
          if (!ws.overlap(source, *o)) continue;
          next.zb -= ws.inner(source, *o) * o->zb;
          next.support = next.support.hull(o->support);
        }
        fns[static_cast<std::size_t>(m)] = std::move(next);
      }
    }
  }
  if (stop < net.levels) {
    for (const auto& tup : net.tuplets) {
      if (tup.level <= stop) continue;
      for (int m = tup.first; m < tup.first + tup.size; ++m) {
        auto& f = fns[static_cast<std::size_t>(m)];
        ws.normalize(f, Scalar(1));
      }
    }
  }
  return fns;
}

template <typename Scalar>
std::vector<Working<Scalar>> to_working(std::span<const Spline<Scalar>> fns) {
  require(!fns.empty(), ErrorCode::InvalidParameter, "empty basis list");
  std::vector<Working<Scalar>> out;
  out.reserve(fns.size());
  for (const auto& s : fns) {
    require(s.knots() == fns.front().knots(), ErrorCode::KnotMismatch, "basis functions use different knots");
    const auto sup = structural_support(s);
    require(sup.has_value(), ErrorCode::NumericalBreakdown, "zero function in basis list");
    out.push_back({s.zb_coefficients(), *sup});
  }
  return out;
}

template <typename Scalar>
OrthoBasis<Scalar> to_basis(const KnotSequence<Scalar>& knots, Strategy strategy,
                            const std::vector<Working<Scalar>>& fns, std::size_t ip_count) {
  OrthoBasis<Scalar> basis{knots, strategy, nullptr, {}, ip_count, {}, true};
  auto phi = std::make_shared<MatrixX<Scalar>>(static_cast<Eigen::Index>(fns.size()), zb_dimension(knots));
  for (std::size_t r = 0; r < fns.size(); ++r) {
    phi->row(static_cast<Eigen::Index>(r)) = fns[r].zb.transpose();
    basis.supports.push_back(fns[r].support);
  }
  basis.phi = std::move(phi);
  return basis;
}

template <typename Scalar>
std::vector<Spline<Scalar>> zb_basis_functions(const KnotSequence<Scalar>& knots) {
  const int n = zb_dimension(knots);
  std::vector<Spline<Scalar>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) out.push_back(Spline<Scalar>::zbspline(knots, VectorX<Scalar>::Unit(n, m)));
  return out;
}

}  // namespace detail

/// The raw ZB basis as a list of splines.
template <typename Scalar>
std::vector<Spline<Scalar>> zb_basis_functions(const KnotSequence<Scalar>& knots) {
  return detail::zb_basis_functions(knots);
}

/// One-sided classical Gram-Schmidt with normalization after each step.
/// Only previously produced functions with overlapping support are
/// projected out (and counted).
template <typename Scalar>
OrthoBasis<Scalar> gs_one_sided(std::span<const Spline<Scalar>> zb, Direction direction, InnerProductCounter& ctx) {
  auto fns = detail::to_working(zb);
  detail::Workspace<Scalar> ws(zb.front().knots(), ctx);
  const std::size_t before = ctx.count;
  auto out = detail::one_sided(fns, direction, ws);
  return detail::to_basis(zb.front().knots(),
                          direction == Direction::LeftToRight ? Strategy::GsLeftRight : Strategy::GsRightLeft, out,
                          ctx.count - before);
}

template <typename Scalar>
OrthoBasis<Scalar> gs_two_sided(std::span<const Spline<Scalar>> zb, InnerProductCounter& ctx) {
  auto fns = detail::to_working(zb);
  detail::Workspace<Scalar> ws(zb.front().knots(), ctx);
  const std::size_t before = ctx.count;
  auto out = detail::two_sided(fns, ws);
  return detail::to_basis(zb.front().knots(), Strategy::GsTwoSided, out, ctx.count - before);
}

/// Dyadic orthogonalization. With level_limit < net.levels the run stops
/// early and returns a normalized, partially orthogonal basis flagged
/// complete = false.
template <typename Scalar>
OrthoBasis<Scalar> splinet(std::span<const Spline<Scalar>> zb, const DyadicNet& net, InnerProductCounter& ctx,
                           std::optional<int> level_limit = std::nullopt) {
  const auto& knots = zb.front().knots();
  const DyadicNet expected = make_dyadic_net(knots);
  detail::require(net.levels == expected.levels && net.degree == knots.degree() &&
                      net.tuplets.size() == expected.tuplets.size() &&
                      static_cast<int>(zb.size()) == zb_dimension(knots),
                  ErrorCode::NonDyadicKnots, "dyadic net does not match the knot sequence");
  const int limit = level_limit.value_or(net.levels);
  detail::require(limit >= 1, ErrorCode::InvalidParameter, "level limit must be positive");
  auto fns = detail::to_working(zb);
  detail::Workspace<Scalar> ws(knots, ctx);
  const std::size_t before = ctx.count;
  auto out = detail::dyadic(std::move(fns), net, limit, ws);
  auto basis = detail::to_basis(knots, Strategy::Splinet, out, ctx.count - before);
  basis.complete = limit >= net.levels;
  basis.levels.assign(out.size(), 0);
  for (const auto& tup : net.tuplets) {
    for (int m = tup.first; m < tup.first + tup.size; ++m) basis.levels[static_cast<std::size_t>(m)] = tup.level;
  }
  return basis;
}

template <typename Scalar>
OrthoBasis<Scalar> gs_one_sided(const std::vector<Spline<Scalar>>& zb, Direction direction, InnerProductCounter& ctx) {
  return gs_one_sided(std::span<const Spline<Scalar>>(zb), direction, ctx);
}
template <typename Scalar>
OrthoBasis<Scalar> gs_two_sided(const std::vector<Spline<Scalar>>& zb, InnerProductCounter& ctx) {
  return gs_two_sided(std::span<const Spline<Scalar>>(zb), ctx);
}
template <typename Scalar>
OrthoBasis<Scalar> splinet(const std::vector<Spline<Scalar>>& zb, const DyadicNet& net, InnerProductCounter& ctx,
                           std::optional<int> level_limit = std::nullopt) {
  return splinet(std::span<const Spline<Scalar>>(zb), net, ctx, level_limit);
}

/// Orthonormal basis of the zero-integral space by the given strategy.
template <typename Scalar>
OrthoBasis<Scalar> orthogonalize(const KnotSequence<Scalar>& knots, Strategy strategy,
                                 std::optional<int> level_limit = std::nullopt) {
  detail::require(knots.g() + knots.degree() >= 2, ErrorCode::DegenerateSpace,
                  "orthogonalization needs a space of dimension at least 2");
  const auto zb = zb_basis_functions(knots);
  InnerProductCounter ctx;
  switch (strategy) {
    case Strategy::GsLeftRight: return gs_one_sided(zb, Direction::LeftToRight, ctx);
    case Strategy::GsRightLeft: return gs_one_sided(zb, Direction::RightToLeft, ctx);
    case Strategy::GsTwoSided: return gs_two_sided(zb, ctx);
    case Strategy::Splinet: return splinet(zb, make_dyadic_net(knots), ctx, level_limit);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown strategy");
}

/// Sum of measured support lengths over the domain length. A knot interval
/// belongs to a function's support when its L2 norm there exceeds 1e-11.
template <typename Scalar>
Scalar relative_total_support(const OrthoBasis<Scalar>& basis) {
  const auto blocks = zb_interval_grams(basis.knots, 0);
  const auto& br = basis.knots.breakpoints();
  Scalar total = 0;
  for (int r = 0; r < basis.size(); ++r) {
    const VectorX<Scalar> row = basis.phi->row(r).transpose();
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      const Scalar sq = row.dot(blocks[c] * row);
      if (std::sqrt(std::max(sq, Scalar(0))) > Scalar(1e-11)) total += br[c + 1] - br[c];
    }
  }
  return total / basis.knots.eta();
}

/// Closed-form relative total support for equispaced dyadic knots.
inline double predicted_support(Strategy strategy, int g, int k) {
  const double G = g;
  const double K = k;
  switch (strategy) {
    case Strategy::GsLeftRight:
    case Strategy::GsRightLeft: return G / 2 + K + 1 - 1 / (G + 1);
    case Strategy::GsTwoSided: return G / 4 + K + 7.0 / 4 - 2 / (G + 1);
    case Strategy::Splinet: {
      const int levels = dyadic_levels(g, k);
      detail::require(levels > 0, ErrorCode::NonDyadicKnots, "g is not dyadic for this degree");
      return (K + 1) * std::log2((G + K) / (K + 1) + 1);
    }
  }
  throw Error(ErrorCode::InvalidParameter, "unknown strategy");
}

/// Closed-form inner-product counts as published for the dyadic case.
/// The splinet form leaves out the k(k+1)/2 products that orthonormalize
/// the top tuplet, so measured splinet counts exceed it by exactly that.
inline long predicted_ip_count(Strategy strategy, int g, int k) {
  switch (strategy) {
    case Strategy::GsLeftRight:
    case Strategy::GsRightLeft: return static_cast<long>(k + 1) * g + k * (k - 1) / 2 - 1;
    case Strategy::GsTwoSided: return static_cast<long>(k + 1) * (2 * g - 4) - k * (k + 1) / 2;
    case Strategy::Splinet: {
      const int levels = dyadic_levels(g, k);
      detail::require(levels > 0, ErrorCode::NonDyadicKnots, "g is not dyadic for this degree");
      const long tuplet_term = static_cast<long>(5 * k + 4) * (g + k) / 2;
      return tuplet_term - 2L * levels * (k + 1) * (k + 1) - k * (k + 1) / 2;
    }
  }
  throw Error(ErrorCode::InvalidParameter, "unknown strategy");
}

}  // namespace zbsplinet
