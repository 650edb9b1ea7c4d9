#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "json.hpp"
#include "oa3/linalg.hpp"

namespace oa3 {

/// m×d matrix with orthonormal rows: the first m standard basis rows, or a
/// seeded random orthonormal basis.
DenseMatrix initial_directions(std::size_t m, std::size_t dim,
                               std::optional<std::uint64_t> seed);

/// Oja's streaming estimate of the top-m eigenpairs of Σᵢ x̂ᵢx̂ᵢᵀ, giving
/// Σ ≈ I − SᵀHS with S = (tΛ)^{1/2}V and H = (I + SSᵀ)⁻¹ (diagonal since
/// V has orthonormal rows). Step size Γ_t = I/t.
class OjaSketch {
 public:
  OjaSketch(std::size_t dim, std::size_t m,
            std::optional<std::uint64_t> init_seed = std::nullopt);

  /// Absorbs one to-sketch vector x̂ = x/√γ.
  void update(const SparseVector& x_hat);

  /// ‖x‖² − (Sx)ᵀH(Sx), i.e. xᵀ(I − SᵀHS)x.
  double variance(const SparseVector& x) const;
  /// SᵀHSg as a dense vector.
  DenseVector correction(const SparseVector& g) const;

  std::size_t dim() const { return v_.cols(); }
  std::size_t m() const { return v_.rows(); }
  std::size_t t() const { return t_; }
  const DenseVector& lambda() const { return lambda_; }
  const DenseMatrix& v() const { return v_; }
  const DenseMatrix& s() const { return s_; }
  const DenseVector& h() const { return h_; }
  std::size_t degenerate_count() const { return degenerate_; }

  nlohmann::json snapshot(bool full) const;

 private:
  std::size_t t_ = 0;
  DenseVector lambda_;
  DenseMatrix v_;
  DenseMatrix s_;
  DenseVector h_;
  std::size_t degenerate_ = 0;
};

struct Decomposition {
  DenseMatrix l;
  DenseMatrix q;
  std::size_t degenerate_count = 0;
};

/// Gram–Schmidt over the rows of F in the inner product ⟨a,b⟩ = aᵀKb, so that
/// L·Q = F and QKQᵀ = I. A row whose K-norm residual c falls below
/// 1e-10·‖f‖·√max(K_ii) keeps m fixed: Q receives the standard basis
/// direction with the largest K-residual and L gets c = 0 on its diagonal.
Decomposition decompose(const DenseMatrix& f, const DenseMatrix& k);

/// Oja's sketch with V factored as F·U: U changes by a sparse rank-one term
/// per update and the m×m factor F restores orthonormality of FU through
/// the Gram matrix K = UUᵀ.
class SparseOjaSketch {
 public:
  SparseOjaSketch(std::size_t dim, std::size_t m,
                  std::optional<std::uint64_t> init_seed = std::nullopt);

  /// Absorbs x̂ and returns δ, the coefficient vector with U' = U + δx̂ᵀ.
  /// Throws SingularMatrixError if F has become singular.
  const DenseVector& update(const SparseVector& x_hat);

  /// ‖x‖² − wᵀ(tΛH)w with w = F(Ux).
  double variance(const SparseVector& x) const;
  /// U·x, touching only x's support.
  DenseVector u_times(const SparseVector& x) const;
  /// Diagonal of tΛH.
  DenseVector captured_weights() const;
  /// V = F·U (dense; for tests and snapshots).
  DenseMatrix directions() const;

  std::size_t dim() const { return u_.cols(); }
  std::size_t m() const { return u_.rows(); }
  std::size_t t() const { return t_; }
  const DenseVector& lambda() const { return lambda_; }
  const DenseMatrix& f() const { return f_; }
  const DenseMatrix& u() const { return u_; }
  const DenseMatrix& k() const { return k_; }
  const DenseVector& h() const { return h_; }
  const DenseVector& last_delta() const { return delta_; }
  std::size_t degenerate_count() const { return degenerate_; }

  nlohmann::json snapshot(bool full) const;

 private:
  std::size_t t_ = 0;
  DenseVector lambda_;
  DenseMatrix f_;
  DenseMatrix u_;
  DenseMatrix k_;
  DenseVector h_;
  DenseVector delta_;
  std::size_t degenerate_ = 0;
};

}  // namespace oa3
