#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "zbsplinet/error.hpp"
#include "zbsplinet/orthogonalize.hpp"
#include "zbsplinet/spline.hpp"

namespace zbsplinet {

/// Observations as rows of orthonormal-basis coefficients.
template <typename Scalar = double>
struct CoefficientDataset {
  OrthoBasis<Scalar> basis;
  MatrixX<Scalar> coeffs;
  std::vector<std::string> ids;
};

/// PCA of a coefficient matrix. Loadings are columns; pc_curves[c] is the
/// spline whose basis coefficients are loading c. For sparse results
/// eigenvalues hold the variance captured by each sparse component and
/// broken_down flags components whose loading thresholded to zero.
/// With zero total variance every explained ratio is 0.
template <typename Scalar = double>
struct FpcaResult {
  VectorX<Scalar> eigenvalues;
  MatrixX<Scalar> loadings;
  VectorX<Scalar> explained;
  VectorX<Scalar> mean_coeffs;
  std::vector<Spline<Scalar>> pc_curves;
  std::vector<bool> broken_down;
  Scalar total_variance = 0;
};

namespace detail {

template <typename Scalar>
MatrixX<Scalar> centred(const CoefficientDataset<Scalar>& data, VectorX<Scalar>& mean) {
  require(data.coeffs.rows() >= 2, ErrorCode::TooFewObservations, "PCA needs at least two observations");
  require(data.coeffs.cols() == data.basis.size(), ErrorCode::DimensionMismatch,
          "coefficient columns must match the basis dimension");
  mean = data.coeffs.colwise().mean().transpose();
  // a constant column centres to exact zeros; sum/n can be off by an ulp
  for (Eigen::Index c = 0; c < mean.size(); ++c) {
    if (data.coeffs.col(c).minCoeff() == data.coeffs.col(c).maxCoeff()) mean(c) = data.coeffs(0, c);
  }
  return data.coeffs.rowwise() - mean.transpose();
}

/// Flips v so that its largest-magnitude entry is positive.
template <typename Scalar>
void fix_sign(Eigen::Ref<VectorX<Scalar>> v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v(at) < Scalar(0)) v = -v;
}

template <typename Scalar>
std::vector<Spline<Scalar>> curves(const OrthoBasis<Scalar>& basis, const MatrixX<Scalar>& loadings) {
  std::vector<Spline<Scalar>> out;
  for (Eigen::Index c = 0; c < loadings.cols(); ++c) out.push_back(basis.expand(loadings.col(c)));
  return out;
}

template <typename Scalar>
VectorX<Scalar> ratios(const VectorX<Scalar>& variances, Scalar total) {
  if (total <= Scalar(0)) return VectorX<Scalar>::Zero(variances.size());
  return variances / total;
}

template <typename Scalar>
VectorX<Scalar> soft_threshold(const VectorX<Scalar>& w, Scalar level) {
  return w.unaryExpr([level](Scalar v) {
    const Scalar m = std::abs(v) - level;
    return m > Scalar(0) ? std::copysign(m, v) : Scalar(0);
  });
}

}  // namespace detail

/// Ordinary PCA of the coefficients: sample covariance with divisor n-1,
/// eigenvalues descending. Eigenvalues within p * epsilon of the largest
/// are rounding noise and are set to zero.
template <typename Scalar>
FpcaResult<Scalar> fpca(const CoefficientDataset<Scalar>& data) {
  VectorX<Scalar> mean;
  const MatrixX<Scalar> X = detail::centred(data, mean);
  const MatrixX<Scalar> C = X.transpose() * X / Scalar(X.rows() - 1);
  const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(C);
  detail::require(eig.info() == Eigen::Success, ErrorCode::NumericalBreakdown, "eigendecomposition failed");
  const Eigen::Index p = C.rows();
  FpcaResult<Scalar> out;
  out.eigenvalues.resize(p);
  out.loadings.resize(p, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    out.eigenvalues(c) = std::max(eig.eigenvalues()(p - 1 - c), Scalar(0));
    out.loadings.col(c) = eig.eigenvectors().col(p - 1 - c);
    detail::fix_sign<Scalar>(out.loadings.col(c));
  }
  const Scalar noise = Scalar(p) * Eigen::NumTraits<Scalar>::epsilon() * out.eigenvalues(0);
  for (Eigen::Index c = 0; c < p; ++c) {
    if (out.eigenvalues(c) <= noise) out.eigenvalues(c) = Scalar(0);
  }
  out.total_variance = C.trace();
  out.explained = detail::ratios(out.eigenvalues, out.eigenvalues.sum());
  out.mean_coeffs = mean;
  out.pc_curves = detail::curves(data.basis, out.loadings);
  out.broken_down.assign(static_cast<std::size_t>(p), false);
  return out;
}

/// mask_i = |loading(i, component)| > threshold. A component that carries
/// no variance has an arbitrary loading and activates nothing.
template <typename Scalar>
std::vector<bool> active_basis(const FpcaResult<Scalar>& result, int component, Scalar threshold = Scalar(0.1)) {
  detail::require(component >= 0 && component < result.loadings.cols(), ErrorCode::ComponentOutOfRange,
                  "component " + std::to_string(component) + " out of range");
  std::vector<bool> mask(static_cast<std::size_t>(result.loadings.rows()), false);
  if (!(result.eigenvalues(component) > Scalar(0))) return mask;
  for (Eigen::Index i = 0; i < result.loadings.rows(); ++i) {
    mask[static_cast<std::size_t>(i)] = std::abs(result.loadings(i, component)) > threshold;
  }
  return mask;
}

inline constexpr int kSparseMaxIterations = 500;

/// Sparse PCA by soft-thresholded power iteration. Each component starts
/// from the leading eigenvector of the current residual, then iterates
/// w = C v, w <- soft(w, sparsity * max|w|), v = w / |w| until the change
/// drops below 1e-10 or 500 steps. The residual is deflated by the
/// rank-one part X v v^T before the next component.
template <typename Scalar>
FpcaResult<Scalar> sparse_fpca(const CoefficientDataset<Scalar>& data, Scalar sparsity, int component_count) {
  detail::require(sparsity >= Scalar(0) && sparsity <= Scalar(1), ErrorCode::InvalidParameter,
                  "sparsity must lie in [0,1]");
  VectorX<Scalar> mean;
  MatrixX<Scalar> X = detail::centred(data, mean);
  const Eigen::Index p = X.cols();
  detail::require(component_count >= 1 && component_count <= p, ErrorCode::ComponentOutOfRange,
                  "component count must lie in 1..p");
  const Scalar divisor = Scalar(X.rows() - 1);
  FpcaResult<Scalar> out;
  out.total_variance = X.squaredNorm() / divisor;
  out.mean_coeffs = mean;
  out.eigenvalues = VectorX<Scalar>::Zero(component_count);
  out.loadings = MatrixX<Scalar>::Zero(p, component_count);
  out.broken_down.assign(static_cast<std::size_t>(component_count), false);
  for (int c = 0; c < component_count; ++c) {
    const MatrixX<Scalar> C = X.transpose() * X / divisor;
    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(C);
    VectorX<Scalar> v = eig.eigenvectors().col(p - 1);
    detail::fix_sign<Scalar>(v);
    bool broken = false;
    for (int it = 0; it < kSparseMaxIterations; ++it) {
      const VectorX<Scalar> w = C * v;
      const Scalar top = w.cwiseAbs().maxCoeff();
      VectorX<Scalar> next = detail::soft_threshold<Scalar>(w, sparsity * top);
      const Scalar nrm = next.norm();
      if (!(nrm > Scalar(0))) {
        broken = true;
        break;
      }
      next /= nrm;
      detail::fix_sign<Scalar>(next);
      const Scalar change = (next - v).norm();
      v = next;
      if (change < Scalar(1e-10)) break;
    }
    if (broken) {
      out.broken_down[static_cast<std::size_t>(c)] = true;
      continue;
    }
    const VectorX<Scalar> scores = X * v;
    out.eigenvalues(c) = scores.squaredNorm() / divisor;
    out.loadings.col(c) = v;
    X -= scores * v.transpose();
  }
  out.explained = detail::ratios(out.eigenvalues, out.total_variance);
  out.pc_curves = detail::curves(data.basis, out.loadings);
  return out;
}

}  // namespace zbsplinet
