#pragma once

#include <variant>

#include "oa3/learner.hpp"

namespace oa3 {

struct Prediction {
  double p = 0.0;
  Label y_hat = Label::Positive;
};

/// sign with sign(0) = +1.
inline Label predict_label(double p) {
  return p >= 0.0 ? Label::Positive : Label::Negative;
}

/// Gaussian weight model N(μ, Σ) with either a dense or a diagonal Σ.
/// Starts at μ = 0, Σ = I.
class ExactModel final : public Learner {
 public:
  using FullCov = DenseMatrix;
  using DiagCov = DenseVector;

  ExactModel(std::size_t dim, bool diagonal, double eta, double gamma,
             double rho);

  Algo algo() const override { return diagonal() ? Algo::OA3Diag : Algo::OA3; }
  std::size_t dim() const override { return mu_.size(); }

  Prediction predict(const SparseVector& x) const;
  double margin(const SparseVector& x) const override;
  double variance(const SparseVector& x) const override;
  LearnStep learn(const SparseVector& x, Label y) override;

  /// Woodbury downdate of Σ, then μ ← μ − η·Σ'·g. No-op at zero loss.
  /// Returns the loss at the pre-update μ.
  double update_full(const SparseVector& x, Label y);
  /// Diagonal analogue: Σ'ᵢ = Σᵢ − Σᵢ²xᵢ²/(γ + Σⱼ xⱼ²Σⱼ), μ ← μ − η·Σ'∘g.
  double update_diag(const SparseVector& x, Label y);

  bool diagonal() const { return std::holds_alternative<DiagCov>(cov_); }
  const DenseVector& mu() const { return mu_; }
  const FullCov& full_cov() const { return std::get<FullCov>(cov_); }
  const DiagCov& diag_cov() const { return std::get<DiagCov>(cov_); }
  DenseVector cov_diagonal() const;

  DenseVector weights() const override { return mu_; }
  nlohmann::json snapshot(bool full) const override;

  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  double rho() const { return rho_; }

 private:
  void check_dim(const SparseVector& x) const;

  DenseVector mu_;
  std::variant<FullCov, DiagCov> cov_;
  double eta_;
  double gamma_;
  double rho_;
};

}  // namespace oa3
