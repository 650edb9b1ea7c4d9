#include "oa3/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oa3/errors.hpp"

namespace oa3 {

std::string_view to_string(MetricMode mode) {
  return mode == MetricMode::Sum ? "sum" : "cost";
}

MetricMode parse_metric_mode(std::string_view s) {
  if (s == "sum") return MetricMode::Sum;
  if (s == "cost") return MetricMode::Cost;
  throw ConfigError("unknown metric mode '" + std::string(s) + "'");
}

namespace {

bool unit_weight(double w) { return w >= 0.0 && w <= 1.0; }

bool sums_to_one(double a, double b) { return std::abs(a + b - 1.0) <= 1e-12; }

}  // namespace

void CostConfig::validate() const {
  if (!unit_weight(alpha_p) || !unit_weight(alpha_n) ||
      !sums_to_one(alpha_p, alpha_n)) {
    throw ConfigError("alpha_p and alpha_n must lie in [0,1] and sum to 1");
  }
  if (!unit_weight(c_p) || !unit_weight(c_n) || !sums_to_one(c_p, c_n)) {
    throw ConfigError("c_p and c_n must lie in [0,1] and sum to 1");
  }
  if (mode == MetricMode::Sum && !(alpha_n > 0.0)) {
    throw ConfigError("alpha_n cannot be zero in sum mode");
  }
  if (mode == MetricMode::Cost && !(c_n > 0.0)) {
    throw ConfigError("c_n cannot be zero in cost mode");
  }
}

RhoBias RhoBias::from_value(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ConfigError("rho must be finite and > 0");
  }
  return {rho, std::max(1.0, rho), std::min(1.0, rho)};
}

RhoBias compute_rho(const CostConfig& cfg, std::size_t t_pos, std::size_t t_neg) {
  cfg.validate();
  if (cfg.mode == MetricMode::Cost) return RhoBias::from_value(cfg.c_p / cfg.c_n);
  if (t_pos == 0) throw DataError("sum-mode rho needs at least one positive sample");
  const double rho = (cfg.alpha_p * static_cast<double>(t_neg)) /
                     (cfg.alpha_n * static_cast<double>(t_pos));
  if (rho == 0.0) {
    throw DataError("sum-mode rho is zero (no negatives or alpha_p = 0)");
  }
  return RhoBias::from_value(rho);
}

double loss(std::span<const double> mu, const SparseVector& x, Label y,
            double rho) {
  return loss_from_margin(dot(x, mu), y, rho);
}

SparseVector subgradient(const SparseVector& x, Label y, double rho) {
  return x.scaled(-class_weight(y, rho) * label_value(y));
}

void MetricsAccumulator::record(Label y, Label y_hat) {
  if (y == Label::Positive) {
    ++t_pos_;
    if (y_hat != y) ++m_pos_;
  } else {
    ++t_neg_;
    if (y_hat != y) ++m_neg_;
  }
}

void MetricsAccumulator::record_query(std::size_t round, std::size_t budget_after) {
  ++queries_;
  if (budget_after == 0 && !exhausted_) exhausted_ = round;
}

void MetricsAccumulator::mark_exhausted(std::size_t round) {
  if (!exhausted_) exhausted_ = round;
}

MetricsAccumulator MetricsAccumulator::from_counts(std::size_t t_pos,
                                                   std::size_t t_neg,
                                                   std::size_t m_pos,
                                                   std::size_t m_neg) {
  if (m_pos > t_pos || m_neg > t_neg) {
    throw DataError("mistake count exceeds class count");
  }
  MetricsAccumulator acc;
  acc.t_pos_ = t_pos;
  acc.t_neg_ = t_neg;
  acc.m_pos_ = m_pos;
  acc.m_neg_ = m_neg;
  return acc;
}

Metrics finalize_metrics(const MetricsAccumulator& acc, const CostConfig& cfg) {
  constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
  Metrics m;
  m.sensitivity = acc.t_pos() > 0
                      ? static_cast<double>(acc.t_pos() - acc.m_pos()) /
                            static_cast<double>(acc.t_pos())
                      : kUndefined;
  m.specificity = acc.t_neg() > 0
                      ? static_cast<double>(acc.t_neg() - acc.m_neg()) /
                            static_cast<double>(acc.t_neg())
                      : kUndefined;
  m.sum = cfg.alpha_p * m.sensitivity + cfg.alpha_n * m.specificity;
  m.cost = cfg.c_p * static_cast<double>(acc.m_pos()) +
           cfg.c_n * static_cast<double>(acc.m_neg());
  return m;
}

}  // namespace oa3
