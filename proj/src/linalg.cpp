#include "oa3/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oa3/errors.hpp"

namespace oa3 {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.index >= dim_) {
      throw DimensionError("sparse index " + std::to_string(e.index) +
                           " out of range for dim " + std::to_string(dim_));
    }
    if (k > 0 && entries_[k - 1].index >= e.index) {
      throw DimensionError("sparse indices must be strictly increasing");
    }
    if (e.value == 0.0) {
      throw DimensionError("sparse vector stores an explicit zero");
    }
  }
}

SparseVector SparseVector::from_unsorted(std::size_t dim,
                                         std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
  return SparseVector(dim, std::move(entries));
}

double SparseVector::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return s;
}

SparseVector SparseVector::scaled(double factor) const {
  SparseVector out(dim_);
  out.entries_.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double v = e.value * factor;
    if (v != 0.0) out.entries_.push_back({e.index, v});
  }
  return out;
}

SparseVector SparseVector::with_dim(std::size_t dim) const {
  return SparseVector(dim, entries_);
}

DenseVector SparseVector::to_dense() const {
  DenseVector out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

bool operator==(const SparseVector& a, const SparseVector& b) {
  return a.dim_ == b.dim_ && a.entries_ == b.entries_;
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged matrix literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  require(cols_ == rhs.rows_, "matrix product shape mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      auto dst = out.row(i);
      auto src = rhs.row(k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) dst[j] += a * src[j];
    }
  }
  return out;
}

DenseVector DenseMatrix::operator*(std::span<const double> v) const {
  require(cols_ == v.size(), "matrix-vector shape mismatch");
  DenseVector out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = dot(row(i), v);
  return out;
}

DenseVector DenseMatrix::operator*(const SparseVector& v) const {
  require(cols_ == v.dim(), "matrix-vector shape mismatch");
  DenseVector out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto r = row(i);
    double s = 0.0;
    for (const auto& e : v) s += r[e.index] * e.value;
    out[i] = s;
  }
  return out;
}

double dot(const SparseVector& a, std::span<const double> b) {
  require(a.dim() == b.size(), "dot: dimension mismatch");
  double s = 0.0;
  for (const auto& e : a) s += e.value * b[e.index];
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double quad_form(const SparseVector& x, const DenseMatrix& m) {
  require(m.square() && m.rows() == x.dim(), "quad_form: dimension mismatch");
  double s = 0.0;
  for (const auto& ei : x) {
    const auto r = m.row(ei.index);
    double inner = 0.0;
    for (const auto& ej : x) inner += r[ej.index] * ej.value;
    s += ei.value * inner;
  }
  return s;
}

double rank_one_downdate_inplace(DenseMatrix& m, const SparseVector& x,
                                 double gamma) {
  require(m.square() && m.rows() == x.dim(),
          "rank_one_downdate: dimension mismatch");
  if (!(gamma > 0.0)) throw DimensionError("rank_one_downdate: gamma <= 0");
  const std::size_t d = m.rows();
  if (x.empty()) return 0.0;

  const DenseVector mx = m * x;
  double v = 0.0;
  for (const auto& e : x) v += e.value * mx[e.index];
  const double scale = 1.0 / (gamma + v);

  // Upper triangle is updated and mirrored, so the result is symmetric.
  for (std::size_t i = 0; i < d; ++i) {
    const double si = mx[i] * scale;
    if (si == 0.0) {
      for (std::size_t j = i + 1; j < d; ++j) m(j, i) = m(i, j);
      continue;
    }
    auto r = m.row(i);
    for (std::size_t j = i; j < d; ++j) {
      r[j] -= si * mx[j];
      m(j, i) = r[j];
    }
  }
  return v;
}

DenseMatrix rank_one_downdate(const DenseMatrix& m, const SparseVector& x,
                              double gamma) {
  DenseMatrix out = m;
  rank_one_downdate_inplace(out, x, gamma);
  return out;
}

namespace {

// Subtracts projections onto rows [0, count) of q (modified Gram–Schmidt).
void project_out(std::span<double> r, const DenseMatrix& q,
                 std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const auto qj = q.row(j);
    const double c = dot(qj, std::span<const double>(r));
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * qj[k];
  }
}

double norm2(std::span<const double> r) {
  return std::sqrt(dot(r, r));
}

bool normalize_into(std::span<double> r, double tol) {
  const double n = norm2(r);
  if (!(n >= tol)) return false;
  for (auto& v : r) v /= n;
  return true;
}

}  // namespace

Orthonormalized orthonormalize_rows(const DenseMatrix& v, double tol,
                                    const DenseMatrix* fallback) {
  require(v.rows() <= v.cols(), "orthonormalize_rows: more rows than cols");
  if (fallback != nullptr) {
    require(fallback->rows() == v.rows() && fallback->cols() == v.cols(),
            "orthonormalize_rows: fallback shape mismatch");
  }
  Orthonormalized out{v, 0};
  DenseMatrix& q = out.rows;
  const std::size_t n = v.cols();

  for (std::size_t i = 0; i < v.rows(); ++i) {
    auto r = q.row(i);
    project_out(r, q, i);
    if (normalize_into(r, tol)) continue;

    ++out.degenerate_count;
    if (fallback != nullptr) {
      std::copy(fallback->row(i).begin(), fallback->row(i).end(), r.begin());
      project_out(r, q, i);
      if (normalize_into(r, tol)) continue;
    }
    // Some basis vector keeps at least (n - i)/n of its squared norm.
    const double need = static_cast<double>(n - i) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      double captured = 0.0;
      for (std::size_t j = 0; j < i; ++j) captured += q(j, k) * q(j, k);
      if (1.0 - captured + 1e-12 < need) continue;
      std::fill(r.begin(), r.end(), 0.0);
      r[k] = 1.0;
      project_out(r, q, i);
      project_out(r, q, i);
      if (normalize_into(r, tol)) break;
    }
  }
  return out;
}

DenseVector solve_small(const DenseMatrix& a, std::span<const double> b) {
  require(a.square() && a.rows() == b.size(), "solve_small: shape mismatch");
  const std::size_t n = a.rows();
  DenseMatrix m = a;
  DenseVector y(b.begin(), b.end());

  double scale = 0.0;
  for (double v : a.values()) scale = std::max(scale, std::abs(v));
  const double pivot_floor = 1e-12 * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (!(std::abs(m(piv, col)) > pivot_floor) || scale == 0.0) {
      throw SingularMatrixError("solve_small: singular matrix");
    }
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(piv, c));
      std::swap(y[col], y[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      y[r] -= f * y[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m(i, c) * y[c];
    y[i] = s / m(i, i);
  }
  return y;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff: shape mismatch");
  return max_abs_diff(a.values(), b.values());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oa3
