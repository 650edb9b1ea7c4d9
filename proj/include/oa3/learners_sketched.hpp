#pragma once

#include "oa3/learner.hpp"
#include "oa3/sketch.hpp"

namespace oa3 {

/// Sketched learner: Σ ≈ I − SᵀHS from an Oja sketch of the queried samples.
/// Every queried round feeds the sketch; μ moves only on positive loss, using
/// the sketch that already contains the current sample.
class SketchedModel final : public Learner {
 public:
  SketchedModel(std::size_t dim, const LearnerParams& params);

  Algo algo() const override { return Algo::SOA3; }
  std::size_t dim() const override { return mu_.size(); }

  double margin(const SparseVector& x) const override;
  double variance(const SparseVector& x) const override;
  LearnStep learn(const SparseVector& x, Label y) override;

  /// μ ← μ − η(g − SᵀHSg)
  void weight_update(const SparseVector& g);

  const DenseVector& mu() const { return mu_; }
  const OjaSketch& sketch() const { return sketch_; }

  DenseVector weights() const override { return mu_; }
  nlohmann::json snapshot(bool full) const override;

 private:
  DenseVector mu_;
  OjaSketch sketch_;
  double eta_;
  double gamma_;
  double rho_;
};

/// Sparse sketched learner: μ = μ̄ + Uᵀb with V = FU, so a round costs
/// O(m³ + m·nnz(x)) instead of O(m²d).
class SparseSketchedModel final : public Learner {
 public:
  SparseSketchedModel(std::size_t dim, const LearnerParams& params);

  Algo algo() const override { return Algo::SSOA3; }
  std::size_t dim() const override { return mu_bar_.size(); }

  /// μ̄ᵀx + bᵀ(Ux)
  double margin(const SparseVector& x) const override;
  double variance(const SparseVector& x) const override;
  LearnStep learn(const SparseVector& x, Label y) override;

  /// After a sketch update with coefficient δ on x̂:
  ///   μ̄ ← μ̄ − ηg − x̂(δᵀb),   b ← b + ηFᵀ(tΛH)F·U·g.
  /// The x̂(δᵀb) term cancels the shift of Uᵀb caused by U' = U + δx̂ᵀ.
  void weight_update(const SparseVector& g, const SparseVector& x_hat,
                     std::span<const double> delta);

  const DenseVector& mu_bar() const { return mu_bar_; }
  const DenseVector& b() const { return b_; }
  const SparseOjaSketch& sketch() const { return sketch_; }

  /// μ̄ + Uᵀb
  DenseVector weights() const override;
  nlohmann::json snapshot(bool full) const override;

 private:
  DenseVector mu_bar_;
  DenseVector b_;
  SparseOjaSketch sketch_;
  double eta_;
  double gamma_;
  double rho_;
};

}  // namespace oa3
