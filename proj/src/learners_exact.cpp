#include "oa3/learners_exact.hpp"

#include <string>

#include "oa3/errors.hpp"
#include "oa3/objective.hpp"

namespace oa3 {

ExactModel::ExactModel(std::size_t dim, bool diagonal, double eta,
                       double gamma, double rho)
    : mu_(dim, 0.0), eta_(eta), gamma_(gamma), rho_(rho) {
  if (diagonal) {
    cov_ = DiagCov(dim, 1.0);
  } else {
    cov_ = FullCov::identity(dim);
  }
}

void ExactModel::check_dim(const SparseVector& x) const {
  if (x.dim() != mu_.size()) {
    throw DimensionError("sample dimension " + std::to_string(x.dim()) +
                         " does not match model dimension " +
                         std::to_string(mu_.size()));
  }
}

Prediction ExactModel::predict(const SparseVector& x) const {
  const double p = margin(x);
  return {p, predict_label(p)};
}

double ExactModel::margin(const SparseVector& x) const { return dot(x, mu_); }

double ExactModel::variance(const SparseVector& x) const {
  check_dim(x);
  if (const auto* diag = std::get_if<DiagCov>(&cov_)) {
    double v = 0.0;
    for (const auto& e : x) v += (*diag)[e.index] * e.value * e.value;
    return v;
  }
  return quad_form(x, std::get<FullCov>(cov_));
}

double ExactModel::update_full(const SparseVector& x, Label y) {
  check_dim(x);
  auto& sigma = std::get<FullCov>(cov_);
  const double l = loss_from_margin(dot(x, mu_), y, rho_);
  if (!(l > 0.0)) return l;

  rank_one_downdate_inplace(sigma, x, gamma_);
  // g = s·x with s = −ρ_t·y, so Σ'g = s·Σ'x.
  const double s = -class_weight(y, rho_) * label_value(y);
  const DenseVector sx = sigma * x;
  for (std::size_t i = 0; i < mu_.size(); ++i) mu_[i] -= eta_ * s * sx[i];
  return l;
}

double ExactModel::update_diag(const SparseVector& x, Label y) {
  check_dim(x);
  auto& sigma = std::get<DiagCov>(cov_);
  const double l = loss_from_margin(dot(x, mu_), y, rho_);
  if (!(l > 0.0)) return l;

  double denom = gamma_;
  for (const auto& e : x) denom += e.value * e.value * sigma[e.index];
  const double s = -class_weight(y, rho_) * label_value(y);
  for (const auto& e : x) {
    double& si = sigma[e.index];
    si -= si * e.value * si * e.value / denom;
    mu_[e.index] -= eta_ * si * (s * e.value);
  }
  return l;
}

LearnStep ExactModel::learn(const SparseVector& x, Label y) {
  const double l = diagonal() ? update_diag(x, y) : update_full(x, y);
  return {l, l > 0.0};
}

DenseVector ExactModel::cov_diagonal() const {
  if (const auto* diag = std::get_if<DiagCov>(&cov_)) return *diag;
  const auto& sigma = std::get<FullCov>(cov_);
  DenseVector out(sigma.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma(i, i);
  return out;
}

nlohmann::json ExactModel::snapshot(bool full) const {
  nlohmann::json j;
  j["algo"] = to_string(algo());
  j["dim"] = mu_.size();
  j["mu"] = mu_;
  j["sigma_diag"] = cov_diagonal();
  if (full && !diagonal()) {
    const auto& sigma = full_cov();
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sigma.rows(); ++i) {
      rows.push_back(std::vector<double>(sigma.row(i).begin(), sigma.row(i).end()));
    }
    j["sigma"] = std::move(rows);
  }
  return j;
}

}  // namespace oa3
