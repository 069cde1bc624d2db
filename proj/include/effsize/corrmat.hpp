#pragma once

// Correlation matrices: estimation from return series, validation,
// inversion, and the uniform / block-diagonal special cases.
//
// Moments use the population convention (divide by T). Pearson
// correlation is unaffected by the choice, but SummaryStats::variance is.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "effsize/errors.hpp"

namespace effsize {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Reciprocal condition (1-norm) below which an inverse is rejected.
inline constexpr double kNearSingularRcond = 1e-12;

/// Max entrywise deviation of C * C^-1 from the identity.
inline constexpr double kInverseResidualTol = 1e-8;

/// Simple per-period returns of one asset.
class ReturnSeries {
public:
  ReturnSeries(std::string asset_id, std::vector<double> returns)
      : asset_id_(std::move(asset_id)), returns_(std::move(returns)) {
    if (returns_.empty()) {
      throw InputShapeError("return series '" + asset_id_ + "' is empty");
    }
    for (double r : returns_) {
      if (!std::isfinite(r) || r <= -1.0) {
        throw DomainError("return series '" + asset_id_ +
                          "' contains a return <= -1 or a non-finite value");
      }
    }
  }

  const std::string& asset_id() const noexcept { return asset_id_; }
  std::span<const double> returns() const noexcept { return returns_; }
  std::size_t size() const noexcept { return returns_.size(); }

private:
  std::string asset_id_;
  std::vector<double> returns_;
};

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;
  double stdev = 0.0;
};

namespace detail {

inline bool is_constant(std::span<const double> xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

// Centered copy of xs scaled to unit Euclidean norm; all zeros when xs is
// constant, which makes every correlation with it vanish.
inline VectorXd standardized(std::span<const double> xs) {
  const auto n = static_cast<Index>(xs.size());
  VectorXd z = Eigen::Map<const VectorXd>(xs.data(), n);
  if (is_constant(xs)) {
    return VectorXd::Zero(n);
  }
  z.array() -= z.mean();
  const double norm = z.norm();
  if (norm == 0.0) {
    return VectorXd::Zero(n);
  }
  return z / norm;
}

}  // namespace detail

inline SummaryStats summarize(std::span<const double> xs) {
  if (xs.empty()) {
    throw InputShapeError("summary statistics of an empty series");
  }
  SummaryStats s;
  if (detail::is_constant(xs)) {
    s.mean = xs.front();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(xs.size());
  s.stdev = std::sqrt(s.variance);
  return s;
}

inline SummaryStats summarize(const ReturnSeries& series) {
  return summarize(series.returns());
}

/// Pearson correlation. A zero-variance series correlates 0 with anything.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputShapeError("pearson: series lengths differ (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    throw InputShapeError("pearson: at least two observations required");
  }
  const double r = detail::standardized(x).dot(detail::standardized(y));
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson(const ReturnSeries& x, const ReturnSeries& y) {
  return pearson(x.returns(), y.returns());
}

/// Symmetric, unit-diagonal matrix with entries in [-1, 1].
class CorrelationMatrix {
public:
  /// Validates the invariants; deviations up to 1e-12 are snapped away.
  explicit CorrelationMatrix(MatrixXd entries) : entries_(std::move(entries)) {
    constexpr double tol = 1e-12;
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
      throw InputShapeError("correlation matrix must be square and nonempty");
    }
    const Index n = entries_.rows();
    for (Index i = 0; i < n; ++i) {
      if (!std::isfinite(entries_(i, i)) || std::abs(entries_(i, i) - 1.0) > tol) {
        throw DomainError("correlation matrix diagonal entry " + std::to_string(i) +
                          " is not 1");
      }
      entries_(i, i) = 1.0;
      for (Index j = i + 1; j < n; ++j) {
        const double a = entries_(i, j);
        const double b = entries_(j, i);
        if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a - b) > tol) {
          throw DomainError("correlation matrix is not symmetric at (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
        }
        const double v = 0.5 * (a + b);
        if (std::abs(v) > 1.0 + tol) {
          throw DomainError("correlation entry outside [-1, 1] at (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
        }
        entries_(i, j) = entries_(j, i) = std::clamp(v, -1.0, 1.0);
      }
    }
  }

  Index dim() const noexcept { return entries_.rows(); }
  const MatrixXd& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  /// Mean of the M(M-1) strictly off-diagonal entries.
  double mean_off_diagonal() const {
    const Index n = dim();
    if (n < 2) {
      throw InputShapeError("average correlation needs at least two assets");
    }
    const double off = entries_.sum() - static_cast<double>(n);
    return off / static_cast<double>(n * (n - 1));
  }

  /// Principal sub-matrix on the given (distinct) indices, in that order.
  CorrelationMatrix submatrix(std::span<const Index> idx) const {
    const auto k = static_cast<Index>(idx.size());
    MatrixXd sub(k, k);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) {
        sub(a, b) = entries_(idx[a], idx[b]);
      }
    }
    return CorrelationMatrix(std::move(sub));
  }

  /// Whether every off-diagonal entry equals the first one within tol.
  bool is_uniform(double tol = 1e-12) const {
    const Index n = dim();
    if (n < 2) return true;
    const double c = entries_(0, 1);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (std::abs(entries_(i, j) - c) > tol) return false;
    return true;
  }

private:
  MatrixXd entries_;
};

/// Inverse of a CorrelationMatrix, carrying its source and conditioning.
class InverseCorrelationMatrix {
public:
  // Rejects an inverse whose residual against the source exceeds
  // kInverseResidualTol.
  InverseCorrelationMatrix(CorrelationMatrix source, MatrixXd entries, double rcond)
      : source_(std::move(source)), entries_(std::move(entries)), rcond_(rcond) {
    if (entries_.rows() != source_.dim() || entries_.cols() != source_.dim()) {
      throw InputShapeError("inverse dimension does not match its source");
    }
    const MatrixXd residual =
        source_.entries() * entries_ - MatrixXd::Identity(source_.dim(), source_.dim());
    const double worst = residual.cwiseAbs().maxCoeff();
    if (!(worst <= kInverseResidualTol)) {
      throw NearSingularError("inverse residual " + std::to_string(worst) +
                                  " exceeds tolerance; matrix is numerically singular",
                              rcond_);
    }
  }

  Index dim() const noexcept { return entries_.rows(); }
  const MatrixXd& entries() const noexcept { return entries_; }
  const CorrelationMatrix& source() const noexcept { return source_; }
  double reciprocal_condition() const noexcept { return rcond_; }

  /// Sum of all entries, the effective portfolio size.
  double total() const { return entries_.sum(); }

  /// C^-1 * 1.
  VectorXd row_sums() const { return entries_.rowwise().sum(); }

private:
  CorrelationMatrix source_;
  MatrixXd entries_;
  double rcond_;
};

/// Inverts C by Cholesky, falling back to partial-pivot LU when C is not
/// numerically positive definite.
inline InverseCorrelationMatrix invert(const CorrelationMatrix& c) {
  const MatrixXd& a = c.entries();
  const Index n = c.dim();
  MatrixXd inv;
  double rcond = 0.0;

  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    rcond = llt.rcond();
    if (rcond >= kNearSingularRcond) {
      inv = llt.solve(MatrixXd::Identity(n, n));
    }
  }
  if (inv.size() == 0) {
    Eigen::PartialPivLU<MatrixXd> lu(a);
    const double lu_rcond = lu.rcond();
    rcond = std::isfinite(lu_rcond) ? lu_rcond : 0.0;
    if (!(rcond >= kNearSingularRcond)) {
      throw NearSingularError(
          "correlation matrix is near-singular (reciprocal condition " + std::to_string(rcond) +
              "); assets may be redundant or duplicated",
          rcond);
    }
    inv = lu.inverse();
  }
  // The exact inverse of a symmetric matrix is symmetric.
  inv = 0.5 * (inv + inv.transpose()).eval();
  return InverseCorrelationMatrix(c, std::move(inv), rcond);
}

/// M x M matrix with unit diagonal and every off-diagonal equal to c.
inline CorrelationMatrix uniform_matrix(Index m, double c) {
  if (m < 1) {
    throw DomainError("uniform_matrix: M must be at least 1");
  }
  if (!(c >= 0.0 && c <= 1.0)) {
    throw DomainError("uniform_matrix: correlation must lie in [0, 1]");
  }
  MatrixXd e = MatrixXd::Constant(m, m, c);
  e.diagonal().setOnes();
  return CorrelationMatrix(std::move(e));
}

/// Closed-form inverse of uniform_matrix(m, c):
///   diag = (1 + (M-2)C) / ((1-C)(1 + (M-1)C)),  off = -C / ((1-C)(1 + (M-1)C)).
/// The reciprocal condition is the exact 1-norm value (1-C)/(1+(2M-3)C).
inline InverseCorrelationMatrix uniform_inverse_closed_form(Index m, double c) {
  if (c == 1.0) {
    throw NearSingularError("uniform correlation 1 is singular", 0.0);
  }
  CorrelationMatrix source = uniform_matrix(m, c);
  const double md = static_cast<double>(m);
  const double denom = (1.0 - c) * (1.0 + (md - 1.0) * c);
  MatrixXd inv = MatrixXd::Constant(m, m, -c / denom);
  inv.diagonal().setConstant((1.0 + (md - 2.0) * c) / denom);
  const double rcond = (1.0 - c) / (1.0 + (2.0 * md - 3.0) * c);
  if (rcond < kNearSingularRcond) {
    throw NearSingularError("uniform correlation matrix is near-singular", rcond);
  }
  return InverseCorrelationMatrix(std::move(source), std::move(inv), rcond);
}

/// Direct sum of the blocks, zeros between blocks.
inline CorrelationMatrix block_diagonal(std::span<const CorrelationMatrix> blocks) {
  if (blocks.empty()) {
    throw InputShapeError("block_diagonal: no blocks given");
  }
  Index n = 0;
  for (const auto& b : blocks) n += b.dim();
  MatrixXd e = MatrixXd::Zero(n, n);
  Index at = 0;
  for (const auto& b : blocks) {
    e.block(at, at, b.dim(), b.dim()) = b.entries();
    at += b.dim();
  }
  return CorrelationMatrix(std::move(e));
}

/// Pearson matrix of the columns of a T x M return matrix.
inline CorrelationMatrix estimate_matrix(const MatrixXd& returns) {
  if (returns.cols() < 2) {
    throw InputShapeError("estimate_matrix: at least two series required");
  }
  if (returns.rows() < 2) {
    throw InputShapeError("estimate_matrix: at least two observations required");
  }
  const Index t = returns.rows();
  const Index m = returns.cols();
  MatrixXd z(t, m);
  for (Index j = 0; j < m; ++j) {
    const VectorXd col = returns.col(j);
    z.col(j) = detail::standardized(std::span<const double>(col.data(), col.size()));
  }
  MatrixXd c = z.transpose() * z;
  c = c.cwiseMax(-1.0).cwiseMin(1.0);
  c = 0.5 * (c + c.transpose()).eval();
  c.diagonal().setOnes();
  return CorrelationMatrix(std::move(c));
}

inline CorrelationMatrix estimate_matrix(std::span<const ReturnSeries> panel) {
  if (panel.size() < 2) {
    throw InputShapeError("estimate_matrix: at least two series required");
  }
  const std::size_t t = panel.front().size();
  for (const auto& s : panel) {
    if (s.size() != t) {
      throw InputShapeError("estimate_matrix: ragged panel ('" + s.asset_id() + "' has " +
                            std::to_string(s.size()) + " returns, expected " +
                            std::to_string(t) + ")");
    }
  }
  MatrixXd r(static_cast<Index>(t), static_cast<Index>(panel.size()));
  for (std::size_t j = 0; j < panel.size(); ++j) {
    const auto xs = panel[j].returns();
    r.col(static_cast<Index>(j)) = Eigen::Map<const VectorXd>(xs.data(), static_cast<Index>(t));
  }
  return estimate_matrix(r);
}

}  // namespace effsize
