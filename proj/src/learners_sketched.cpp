#include "oa3/learners_sketched.hpp"

#include <cmath>
#include <string>

#include "oa3/errors.hpp"
#include "oa3/objective.hpp"

namespace oa3 {

namespace {

void check_dim(const SparseVector& x, std::size_t dim) {
  if (x.dim() != dim) {
    throw DimensionError("sample dimension " + std::to_string(x.dim()) +
                         " does not match model dimension " +
                         std::to_string(dim));
  }
}

}  // namespace

SketchedModel::SketchedModel(std::size_t dim, const LearnerParams& params)
    : mu_(dim, 0.0),
      sketch_(dim, params.sketch_m, params.sketch_init_seed),
      eta_(params.eta),
      gamma_(params.gamma),
      rho_(params.rho) {}

double SketchedModel::margin(const SparseVector& x) const { return dot(x, mu_); }

double SketchedModel::variance(const SparseVector& x) const {
  check_dim(x, dim());
  return sketch_.variance(x);
}

void SketchedModel::weight_update(const SparseVector& g) {
  const DenseVector corr = sketch_.correction(g);
  for (std::size_t j = 0; j < mu_.size(); ++j) mu_[j] += eta_ * corr[j];
  for (const auto& e : g) mu_[e.index] -= eta_ * e.value;
}

LearnStep SketchedModel::learn(const SparseVector& x, Label y) {
  check_dim(x, dim());
  const double l = loss_from_margin(dot(x, mu_), y, rho_);
  sketch_.update(x.scaled(1.0 / std::sqrt(gamma_)));
  if (l > 0.0) weight_update(subgradient(x, y, rho_));
  return {l, true};
}

nlohmann::json SketchedModel::snapshot(bool full) const {
  nlohmann::json j;
  j["algo"] = to_string(algo());
  j["dim"] = dim();
  j["mu"] = mu_;
  j["sketch"] = sketch_.snapshot(full);
  return j;
}

// ---------------------------------------------------------------------------

SparseSketchedModel::SparseSketchedModel(std::size_t dim,
                                         const LearnerParams& params)
    : mu_bar_(dim, 0.0),
      b_(params.sketch_m, 0.0),
      sketch_(dim, params.sketch_m, params.sketch_init_seed),
      eta_(params.eta),
      gamma_(params.gamma),
      rho_(params.rho) {}

double SparseSketchedModel::margin(const SparseVector& x) const {
  return dot(x, mu_bar_) + dot(b_, sketch_.u_times(x));
}

double SparseSketchedModel::variance(const SparseVector& x) const {
  check_dim(x, dim());
  return sketch_.variance(x);
}

void SparseSketchedModel::weight_update(const SparseVector& g,
                                        const SparseVector& x_hat,
                                        std::span<const double> delta) {
  const double drift = dot(delta, b_);
  if (drift != 0.0) {
    for (const auto& e : x_hat) mu_bar_[e.index] -= e.value * drift;
  }
  if (g.empty()) return;
  for (const auto& e : g) mu_bar_[e.index] -= eta_ * e.value;

  const DenseMatrix& f = sketch_.f();
  DenseVector w = f * sketch_.u_times(g);
  const DenseVector d = sketch_.captured_weights();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= d[i];
  // b += η Fᵀw
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto fr = f.row(i);
    for (std::size_t c = 0; c < b_.size(); ++c) b_[c] += eta_ * fr[c] * w[i];
  }
}

LearnStep SparseSketchedModel::learn(const SparseVector& x, Label y) {
  check_dim(x, dim());
  const double l = loss_from_margin(margin(x), y, rho_);
  const SparseVector x_hat = x.scaled(1.0 / std::sqrt(gamma_));
  const DenseVector delta = sketch_.update(x_hat);
  // Zero loss still needs the drift correction so the implied μ is unchanged.
  weight_update(l > 0.0 ? subgradient(x, y, rho_) : SparseVector(dim()), x_hat,
                delta);
  return {l, true};
}

DenseVector SparseSketchedModel::weights() const {
  DenseVector mu = mu_bar_;
  const DenseMatrix& u = sketch_.u();
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (b_[i] == 0.0) continue;
    const auto r = u.row(i);
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += b_[i] * r[j];
  }
  return mu;
}

nlohmann::json SparseSketchedModel::snapshot(bool full) const {
  nlohmann::json j;
  j["algo"] = to_string(algo());
  j["dim"] = dim();
  j["mu"] = weights();
  j["mu_bar"] = mu_bar_;
  j["b"] = b_;
  j["sketch"] = sketch_.snapshot(full);
  return j;
}

}  // namespace oa3
