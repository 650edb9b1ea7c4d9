#pragma once

#include <span>

#include "oa3/random.hpp"

namespace oa3 {

/// Parameters of the asymmetric, confidence-aware query rule. η and γ are the
/// learner's own update parameters.
struct QueryConfig {
  double delta_pos = 1.0;
  double delta_neg = 1.0;
  double eta = 1.0;
  double gamma = 1.0;
  double rho_max = 1.0;

  void validate() const;
};

struct QueryDecision {
  double p = 0.0;     // margin
  double v = 0.0;     // variance
  double c = 0.0;     // confidence, <= 0
  double q = 0.0;     // clamped query parameter
  double prob = 1.0;  // Pr(Z = 1)
  bool z = true;
};

/// c = −½·η·ρ_max / (1/v + 1/γ); zero when v = 0.
double confidence(double v, const QueryConfig& cfg);

/// max(0, |p| + c)
double query_param(double p, double c);

/// δ₊/(δ₊+q) for p ≥ 0, δ₋/(δ₋+q) otherwise.
double query_probability(double p, double q, const QueryConfig& cfg);

/// Z = 1 iff a fresh uniform u ∈ [0,1) satisfies u < prob. Always consumes
/// exactly one variate, including when prob = 1.
bool draw(double prob, Rng& rng);

/// Runs the full rule for one round.
QueryDecision decide(double p, double v, const QueryConfig& cfg, Rng& rng);

struct TracePoint {
  double q = 0.0;
  double p = 0.0;
};

/// Expected number of queries over a frozen trajectory:
/// Σ 𝟙{q≤0} + Σ_{q>0,p≥0} δ₊/(δ₊+q) + Σ_{q>0,p<0} δ₋/(δ₋+q).
double expected_queries(std::span<const TracePoint> trace, const QueryConfig& cfg);

}  // namespace oa3
