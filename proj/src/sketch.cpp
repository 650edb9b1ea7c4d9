#include "oa3/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oa3/errors.hpp"
#include "oa3/random.hpp"

namespace oa3 {

namespace {

nlohmann::json matrix_json(const DenseMatrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

void check_shape(std::size_t dim, std::size_t m) {
  if (m == 0) throw ConfigError("sketch size must be >= 1");
  if (m > dim) {
    throw ConfigError("sketch size " + std::to_string(m) +
                      " exceeds dimension " + std::to_string(dim));
  }
}

}  // namespace

DenseMatrix initial_directions(std::size_t m, std::size_t dim,
                               std::optional<std::uint64_t> seed) {
  check_shape(dim, m);
  DenseMatrix v(m, dim);
  if (!seed) {
    for (std::size_t i = 0; i < m; ++i) v(i, i) = 1.0;
    return v;
  }
  Rng rng(*seed);
  for (auto i = 0u; i < m; ++i)
    for (auto& x : v.row(i)) x = rng.normal();
  return orthonormalize_rows(v).rows;
}

// ---------------------------------------------------------------------------

OjaSketch::OjaSketch(std::size_t dim, std::size_t m,
                     std::optional<std::uint64_t> init_seed)
    : lambda_(m, 0.0),
      v_(initial_directions(m, dim, init_seed)),
      s_(m, dim),
      h_(m, 1.0) {}

void OjaSketch::update(const SparseVector& x_hat) {
  ++t_;
  const double step = 1.0 / static_cast<double>(t_);
  const DenseVector vx = v_ * x_hat;

  DenseMatrix moved = v_;
  for (std::size_t i = 0; i < m(); ++i) {
    lambda_[i] = (1.0 - step) * lambda_[i] + step * vx[i] * vx[i];
    const double coef = step * vx[i];
    if (coef == 0.0) continue;
    auto r = moved.row(i);
    for (const auto& e : x_hat) r[e.index] += coef * e.value;
  }
  auto orth = orthonormalize_rows(moved, 1e-10, &v_);
  degenerate_ += orth.degenerate_count;
  v_ = std::move(orth.rows);

  const double t = static_cast<double>(t_);
  for (std::size_t i = 0; i < m(); ++i) {
    const double scale = std::sqrt(t * lambda_[i]);
    auto src = v_.row(i);
    auto dst = s_.row(i);
    for (std::size_t j = 0; j < dim(); ++j) dst[j] = scale * src[j];
    h_[i] = 1.0 / (1.0 + t * lambda_[i]);
  }
}

double OjaSketch::variance(const SparseVector& x) const {
  const DenseVector sx = s_ * x;
  double captured = 0.0;
  for (std::size_t i = 0; i < m(); ++i) captured += sx[i] * h_[i] * sx[i];
  return std::max(0.0, x.squared_norm() - captured);
}

DenseVector OjaSketch::correction(const SparseVector& g) const {
  DenseVector w = s_ * g;
  DenseVector out(dim(), 0.0);
  for (std::size_t i = 0; i < m(); ++i) {
    const double c = w[i] * h_[i];
    if (c == 0.0) continue;
    auto r = s_.row(i);
    for (std::size_t j = 0; j < dim(); ++j) out[j] += c * r[j];
  }
  return out;
}

nlohmann::json OjaSketch::snapshot(bool full) const {
  nlohmann::json j;
  j["t"] = t_;
  j["m"] = m();
  j["lambda"] = lambda_;
  j["h"] = h_;
  j["degenerate_count"] = degenerate_;
  if (full) j["v"] = matrix_json(v_);
  return j;
}

// ---------------------------------------------------------------------------

namespace {

// aᵀKb for m-vectors.
double k_inner(const DenseMatrix& k, std::span<const double> a,
               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    s += a[i] * dot(k.row(i), b);
  }
  return s;
}

}  // namespace

Decomposition decompose(const DenseMatrix& f, const DenseMatrix& k) {
  if (!f.square() || !k.square() || f.rows() != k.rows()) {
    throw DimensionError("decompose: F and K must be m×m");
  }
  const std::size_t m = f.rows();
  Decomposition out{DenseMatrix(m, m), DenseMatrix(m, m), 0};
  double kmax = 0.0;
  for (std::size_t i = 0; i < m; ++i) kmax = std::max(kmax, k(i, i));

  DenseVector kf(m), beta(m);
  // Projects `vec` K-orthogonally against Q rows [0, i); returns coefficients.
  auto project = [&](std::span<const double> vec, std::size_t i) {
    DenseVector alpha(m, 0.0);
    kf = k * vec;
    for (std::size_t j = 0; j < i; ++j) alpha[j] = dot(out.q.row(j), kf);
    std::copy(vec.begin(), vec.end(), beta.begin());
    for (std::size_t j = 0; j < i; ++j) {
      for (std::size_t c = 0; c < m; ++c) beta[c] -= alpha[j] * out.q(j, c);
    }
    return alpha;
  };
  auto k_norm = [&](std::span<const double> vec) {
    return std::sqrt(std::max(0.0, k_inner(k, vec, vec)));
  };

  for (std::size_t i = 0; i < m; ++i) {
    const auto row = f.row(i);
    DenseVector alpha = project(row, i);
    const double c = k_norm(beta);
    const double fnorm = std::sqrt(dot(row, row));
    alpha[i] = c;

    if (c > 1e-10 * fnorm * std::sqrt(kmax) && c > 0.0) {
      for (std::size_t col = 0; col < m; ++col) out.q(i, col) = beta[col] / c;
    } else {
      ++out.degenerate_count;
      alpha[i] = 0.0;
      // Largest surviving basis direction keeps Q at full rank.
      double best = 0.0;
      DenseVector best_beta(m, 0.0);
      DenseVector e(m, 0.0);
      for (std::size_t b = 0; b < m; ++b) {
        std::fill(e.begin(), e.end(), 0.0);
        e[b] = 1.0;
        project(e, i);
        const double cb = k_norm(beta);
        if (cb > best) {
          best = cb;
          best_beta = beta;
        }
      }
      if (best > 0.0) {
        for (std::size_t col = 0; col < m; ++col) out.q(i, col) = best_beta[col] / best;
      }
    }
    for (std::size_t col = 0; col < m; ++col) out.l(i, col) = alpha[col];
  }
  return out;
}

SparseOjaSketch::SparseOjaSketch(std::size_t dim, std::size_t m,
                                 std::optional<std::uint64_t> init_seed)
    : lambda_(m, 0.0),
      f_(DenseMatrix::identity(m)),
      u_(initial_directions(m, dim, init_seed)),
      k_(DenseMatrix::identity(m)),
      h_(m, 1.0),
      delta_(m, 0.0) {}

DenseVector SparseOjaSketch::u_times(const SparseVector& x) const {
  return u_ * x;
}

const DenseVector& SparseOjaSketch::update(const SparseVector& x_hat) {
  ++t_;
  const double step = 1.0 / static_cast<double>(t_);
  const std::size_t n = m();

  const DenseVector ux = u_ * x_hat;
  const DenseVector fux = f_ * ux;
  DenseVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lambda_[i] = (1.0 - step) * lambda_[i] + step * fux[i] * fux[i];
    rhs[i] = step * fux[i];
  }
  // δ = F⁻¹ΓFUx̂
  delta_ = solve_small(f_, rhs);

  const double xx = x_hat.squared_norm();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      k_(i, j) += ux[i] * delta_[j] + delta_[i] * ux[j] + xx * delta_[i] * delta_[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (delta_[i] == 0.0) continue;
    auto r = u_.row(i);
    for (const auto& e : x_hat) r[e.index] += delta_[i] * e.value;
  }

  auto dec = decompose(f_, k_);
  degenerate_ += dec.degenerate_count;
  f_ = std::move(dec.q);

  const double t = static_cast<double>(t_);
  for (std::size_t i = 0; i < n; ++i) h_[i] = 1.0 / (1.0 + t * lambda_[i]);
  return delta_;
}

DenseVector SparseOjaSketch::captured_weights() const {
  const double t = static_cast<double>(t_);
  DenseVector w(m());
  for (std::size_t i = 0; i < m(); ++i) w[i] = t * lambda_[i] * h_[i];
  return w;
}

double SparseOjaSketch::variance(const SparseVector& x) const {
  const DenseVector w = f_ * u_times(x);
  const DenseVector d = captured_weights();
  double captured = 0.0;
  for (std::size_t i = 0; i < m(); ++i) captured += w[i] * d[i] * w[i];
  return std::max(0.0, x.squared_norm() - captured);
}

DenseMatrix SparseOjaSketch::directions() const { return f_ * u_; }

nlohmann::json SparseOjaSketch::snapshot(bool full) const {
  nlohmann::json j;
  j["t"] = t_;
  j["m"] = m();
  j["lambda"] = lambda_;
  j["h"] = h_;
  j["delta"] = delta_;
  j["degenerate_count"] = degenerate_;
  if (full) {
    j["f"] = matrix_json(f_);
    j["u"] = matrix_json(u_);
    j["k"] = matrix_json(k_);
  }
  return j;
}

}  // namespace oa3
