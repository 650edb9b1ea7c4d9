#include "oa3/query.hpp"

#include <cmath>

#include "oa3/errors.hpp"

namespace oa3 {

void QueryConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(delta_pos) || !positive(delta_neg)) {
    throw ConfigError("query biases delta_pos and delta_neg must be > 0");
  }
  if (!positive(eta)) throw ConfigError("eta must be > 0");
  if (!positive(gamma)) throw ConfigError("gamma must be > 0");
  if (!(rho_max >= 1.0) || !std::isfinite(rho_max)) {
    throw ConfigError("rho_max must be >= 1");
  }
}

double confidence(double v, const QueryConfig& cfg) {
  if (v <= 0.0) return 0.0;
  return -0.5 * cfg.eta * cfg.rho_max / (1.0 / v + 1.0 / cfg.gamma);
}

double query_param(double p, double c) {
  const double q = std::abs(p) + c;
  return q > 0.0 ? q : 0.0;
}

double query_probability(double p, double q, const QueryConfig& cfg) {
  const double delta = p >= 0.0 ? cfg.delta_pos : cfg.delta_neg;
  return delta / (delta + q);
}

bool draw(double prob, Rng& rng) { return rng.uniform() < prob; }

QueryDecision decide(double p, double v, const QueryConfig& cfg, Rng& rng) {
  QueryDecision d;
  d.p = p;
  d.v = v;
  d.c = confidence(v, cfg);
  d.q = query_param(p, d.c);
  d.prob = query_probability(p, d.q, cfg);
  d.z = draw(d.prob, rng);
  return d;
}

double expected_queries(std::span<const TracePoint> trace,
                        const QueryConfig& cfg) {
  double total = 0.0;
  for (const auto& pt : trace) {
    total += pt.q <= 0.0 ? 1.0 : query_probability(pt.p, pt.q, cfg);
  }
  return total;
}

}  // namespace oa3
