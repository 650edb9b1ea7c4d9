#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace oa3 {

using DenseVector = std::vector<double>;

/// Canonical sparse vector: strictly increasing indices, no stored zeros.
class SparseVector {
 public:
  using Index = std::uint32_t;
  struct Entry {
    Index index;
    double value;
  };

  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  /// Validates canonical form; throws DimensionError on violation.
  SparseVector(std::size_t dim, std::vector<Entry> entries);
  SparseVector(std::size_t dim, std::initializer_list<Entry> entries)
      : SparseVector(dim, std::vector<Entry>(entries)) {}

  /// Builds from arbitrary pairs: sorts, drops zeros, rejects duplicates.
  static SparseVector from_unsorted(std::size_t dim,
                                    std::vector<Entry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const Entry> entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  double squared_norm() const noexcept;
  /// Multiplies every value by `factor`; a zero factor yields the empty vector.
  SparseVector scaled(double factor) const;
  /// Same entries in a space of dimension `dim` (must cover the support).
  SparseVector with_dim(std::size_t dim) const;
  DenseVector to_dense() const;

  friend bool operator==(const SparseVector& a, const SparseVector& b);

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

inline bool operator==(const SparseVector::Entry& a,
                       const SparseVector::Entry& b) {
  return a.index == b.index && a.value == b.value;
}

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  DenseMatrix transpose() const;
  DenseMatrix operator*(const DenseMatrix& rhs) const;
  DenseVector operator*(std::span<const double> v) const;
  DenseVector operator*(const SparseVector& v) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(const SparseVector& a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

/// xᵀMx, touching only the rows and columns in x's support.
double quad_form(const SparseVector& x, const DenseMatrix& m);

/// M − (Mx)(Mx)ᵀ/(γ + xᵀMx): the inverse of M⁻¹ + xxᵀ/γ for symmetric M.
DenseMatrix rank_one_downdate(const DenseMatrix& m, const SparseVector& x,
                              double gamma);

/// In-place variant; returns xᵀMx evaluated before the update.
double rank_one_downdate_inplace(DenseMatrix& m, const SparseVector& x,
                                 double gamma);

struct Orthonormalized {
  DenseMatrix rows;
  std::size_t degenerate_count = 0;
};

/// Modified Gram–Schmidt over the rows of `v`.
///
/// A row whose residual norm falls below `tol` is replaced by the matching
/// row of `fallback` (projected and renormalized), or by the first standard
/// basis vector that survives projection when no fallback is given. Each
/// replacement increments `degenerate_count`.
Orthonormalized orthonormalize_rows(
    const DenseMatrix& v, double tol = 1e-10,
    const DenseMatrix* fallback = nullptr);

/// Gaussian elimination with partial pivoting for small square systems.
/// Throws SingularMatrixError when a pivot drops below 1e-12 relative to
/// the largest entry of `a`.
DenseVector solve_small(const DenseMatrix& a, std::span<const double> b);

/// max |a_ij − b_ij|
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace oa3
