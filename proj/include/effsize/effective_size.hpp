#pragma once

// Effective portfolio size: the number of uncorrelated assets whose optimal
// portfolio matches a correlated one. The exact value is the sum of all
// entries of C^-1; the remaining functions are closed forms and cheaper
// estimates of it.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "effsize/corrmat.hpp"
#include "effsize/errors.hpp"

namespace effsize {

/// Assignment of assets (by index) to sectors.
class SectorPartition {
public:
  /// sector_of[i] is the label of asset i. Sectors are numbered in order of
  /// first appearance.
  explicit SectorPartition(std::span<const std::string> sector_of) {
    std::map<std::string, Index> seen;
    assignment_.reserve(sector_of.size());
    for (const auto& label : sector_of) {
      auto [it, inserted] = seen.try_emplace(label, static_cast<Index>(labels_.size()));
      if (inserted) {
        labels_.push_back(label);
        sizes_.push_back(0);
      }
      assignment_.push_back(it->second);
      ++sizes_[static_cast<std::size_t>(it->second)];
    }
    if (assignment_.empty()) {
      throw InputShapeError("sector partition over zero assets");
    }
  }

  SectorPartition(std::initializer_list<std::string> sector_of)
      : SectorPartition(std::vector<std::string>(sector_of)) {}

  explicit SectorPartition(const std::vector<std::string>& sector_of)
      : SectorPartition(std::span<const std::string>(sector_of)) {}

  Index asset_count() const noexcept { return static_cast<Index>(assignment_.size()); }
  Index sector_count() const noexcept { return static_cast<Index>(labels_.size()); }

  /// Sector index of each asset.
  const std::vector<Index>& assignment() const noexcept { return assignment_; }
  const std::vector<Index>& sizes() const noexcept { return sizes_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Partition of the listed assets only; sectors left empty disappear.
  SectorPartition restrict_to(std::span<const Index> assets) const {
    std::vector<std::string> sub;
    sub.reserve(assets.size());
    for (Index a : assets) {
      sub.push_back(labels_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(a)])]);
    }
    return SectorPartition(sub);
  }

private:
  std::vector<Index> assignment_;
  std::vector<Index> sizes_;
  std::vector<std::string> labels_;
};

/// Block-averaged correlations between sectors. The diagonal includes the
/// unit diagonal of C, so it is generally not 1.
class ReducedSectorMatrix {
public:
  explicit ReducedSectorMatrix(MatrixXd entries) : entries_(std::move(entries)) {}

  Index dim() const noexcept { return entries_.rows(); }
  const MatrixXd& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

private:
  MatrixXd entries_;
};

struct EffSizeReport {
  Index M = 0;
  double m_exact = 0.0;
  std::optional<double> m_uniform;
  double m_even = 0.0;
  std::optional<double> m_sector;
  std::optional<double> m_variance_ratio;
};

namespace detail {

// Sum of entries of the inverse of a symmetric matrix.
inline double inverse_sum(const MatrixXd& a) {
  const Index n = a.rows();
  const VectorXd ones = VectorXd::Ones(n);
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success && llt.rcond() >= kNearSingularRcond) {
    return ones.dot(llt.solve(ones));
  }
  Eigen::PartialPivLU<MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond >= kNearSingularRcond)) {
    throw NearSingularError("reduced sector matrix is near-singular", rcond);
  }
  return ones.dot(lu.solve(ones));
}

}  // namespace detail

inline double m_ef_exact(const InverseCorrelationMatrix& cinv) { return cinv.total(); }

inline double m_ef_exact(const CorrelationMatrix& c) { return m_ef_exact(invert(c)); }

/// M / (1 + (M-1) C); equals 1 at C = 1 and tends to 1/C as M grows.
inline double m_ef_uniform(Index m, double c) {
  if (m < 1) {
    throw DomainError("m_ef_uniform: M must be at least 1");
  }
  if (!(c >= 0.0 && c <= 1.0)) {
    throw DomainError("m_ef_uniform: correlation must lie in [0, 1]");
  }
  const double md = static_cast<double>(m);
  return md / (1.0 + (md - 1.0) * c);
}

/// Effective size of the evenly weighted portfolio, M / (1 + (M-1)<C>).
inline double m_ef_even(const CorrelationMatrix& c) {
  const double avg = c.mean_off_diagonal();
  const double md = static_cast<double>(c.dim());
  const double denom = 1.0 + (md - 1.0) * avg;
  if (!(denom > 0.0)) {
    throw DomainError("m_ef_even: average correlation " + std::to_string(avg) +
                      " is below -1/(M-1); the even-investment size is not positive");
  }
  return md / denom;
}

inline ReducedSectorMatrix reduce_to_sectors(const CorrelationMatrix& c,
                                             const SectorPartition& part) {
  if (part.asset_count() != c.dim()) {
    throw InputShapeError("sector partition covers " + std::to_string(part.asset_count()) +
                          " assets but the matrix has " + std::to_string(c.dim()));
  }
  const Index n = part.sector_count();
  const auto& of = part.assignment();
  MatrixXd sums = MatrixXd::Zero(n, n);
  for (Index i = 0; i < c.dim(); ++i) {
    for (Index j = 0; j < c.dim(); ++j) {
      sums(of[static_cast<std::size_t>(i)], of[static_cast<std::size_t>(j)]) += c(i, j);
    }
  }
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      sums(a, b) /= static_cast<double>(part.sizes()[static_cast<std::size_t>(a)] *
                                        part.sizes()[static_cast<std::size_t>(b)]);
    }
  }
  return ReducedSectorMatrix(std::move(sums));
}

inline double m_ef_sector(const ReducedSectorMatrix& reduced) {
  return detail::inverse_sum(reduced.entries());
}

inline double m_ef_sector(const CorrelationMatrix& c, const SectorPartition& part) {
  return m_ef_sector(reduce_to_sectors(c, part));
}

/// Mean constituent variance over index variance.
inline double m_ef_variance_ratio(const ReturnSeries& index,
                                  std::span<const ReturnSeries> constituents) {
  if (constituents.empty()) {
    throw InputShapeError("variance ratio: no constituents");
  }
  double total = 0.0;
  for (const auto& s : constituents) {
    if (s.size() != index.size()) {
      throw InputShapeError("variance ratio: constituent '" + s.asset_id() +
                            "' does not cover the index periods");
    }
    total += summarize(s).variance;
  }
  const double index_var = summarize(index).variance;
  if (!(index_var > 0.0)) {
    throw DomainError("variance ratio: index returns have zero variance");
  }
  return total / static_cast<double>(constituents.size()) / index_var;
}

/// Herfindahl index 1 / sum f_i^2; measures concentration, not correlation.
inline double inverse_participation_ratio(std::span<const double> f) {
  double ss = 0.0;
  for (double x : f) {
    if (!std::isfinite(x)) {
      throw DomainError("inverse participation ratio: non-finite weight");
    }
    ss += x * x;
  }
  if (ss == 0.0) {
    throw DomainError("inverse participation ratio: all weights are zero");
  }
  return 1.0 / ss;
}

/// Every applicable estimate for one asset set. m_uniform is filled only
/// when all off-diagonal correlations agree and lie in [0, 1].
inline EffSizeReport make_report(const CorrelationMatrix& c,
                                 const SectorPartition* sectors = nullptr,
                                 std::optional<double> variance_ratio = std::nullopt) {
  EffSizeReport r;
  r.M = c.dim();
  r.m_exact = m_ef_exact(c);
  if (c.dim() >= 2 && c.is_uniform()) {
    const double cu = c(0, 1);
    if (cu >= 0.0 && cu <= 1.0) r.m_uniform = m_ef_uniform(c.dim(), cu);
  } else if (c.dim() == 1) {
    r.m_uniform = 1.0;
  }
  r.m_even = m_ef_even(c);
  if (sectors != nullptr) r.m_sector = m_ef_sector(c, *sectors);
  r.m_variance_ratio = variance_ratio;
  return r;
}

}  // namespace effsize
