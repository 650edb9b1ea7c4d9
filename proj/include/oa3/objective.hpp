#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "oa3/data.hpp"
#include "oa3/linalg.hpp"

namespace oa3 {

enum class MetricMode { Sum, Cost };

std::string_view to_string(MetricMode mode);
MetricMode parse_metric_mode(std::string_view s);

/// Weights for the two evaluation metrics. Both metrics are always reported;
/// `mode` only selects which one drives the loss bias ρ.
struct CostConfig {
  MetricMode mode = MetricMode::Sum;
  double alpha_p = 0.5;
  double alpha_n = 0.5;
  double c_p = 0.9;
  double c_n = 0.1;

  void validate() const;
};

struct RhoBias {
  double rho = 1.0;
  double rho_max = 1.0;
  double rho_min = 1.0;

  /// Throws ConfigError unless rho is finite and positive.
  static RhoBias from_value(double rho);
};

/// ρ = α_p·T_n/(α_n·T_p) in Sum mode, c_p/c_n in Cost mode.
RhoBias compute_rho(const CostConfig& cfg, std::size_t t_pos, std::size_t t_neg);

/// Class weight applied to the hinge: ρ for positives, 1 for negatives.
inline double class_weight(Label y, double rho) {
  return y == Label::Positive ? rho : 1.0;
}

/// Weighted hinge on a precomputed margin p = μᵀx.
inline double loss_from_margin(double margin, Label y, double rho) {
  const double h = 1.0 - label_value(y) * margin;
  return h > 0.0 ? class_weight(y, rho) * h : 0.0;
}

double loss(std::span<const double> mu, const SparseVector& x, Label y, double rho);

/// −ρ_t·y·x, the hinge subgradient in its active region.
SparseVector subgradient(const SparseVector& x, Label y, double rho);

/// Per-run tallies for the cost-sensitive metrics.
class MetricsAccumulator {
 public:
  void record(Label y, Label y_hat);
  void record_query(std::size_t round, std::size_t budget_after);
  /// Marks exhaustion for B = 0 runs (before the first round).
  void mark_exhausted(std::size_t round);

  std::size_t t_pos() const noexcept { return t_pos_; }
  std::size_t t_neg() const noexcept { return t_neg_; }
  std::size_t m_pos() const noexcept { return m_pos_; }
  std::size_t m_neg() const noexcept { return m_neg_; }
  std::size_t queries() const noexcept { return queries_; }
  std::optional<std::size_t> budget_exhausted_round() const noexcept {
    return exhausted_;
  }

  static MetricsAccumulator from_counts(std::size_t t_pos, std::size_t t_neg,
                                        std::size_t m_pos, std::size_t m_neg);

 private:
  std::size_t t_pos_ = 0;
  std::size_t t_neg_ = 0;
  std::size_t m_pos_ = 0;
  std::size_t m_neg_ = 0;
  std::size_t queries_ = 0;
  std::optional<std::size_t> exhausted_;
};

/// Metrics over the whole stream. A class with no samples makes the
/// dependent metrics NaN (the undefined marker).
struct Metrics {
  double sum = 0.0;
  double cost = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
};

Metrics finalize_metrics(const MetricsAccumulator& acc, const CostConfig& cfg);

}  // namespace oa3
