#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oa3/data.hpp"
#include "oa3/learner.hpp"
#include "oa3/objective.hpp"
#include "oa3/query.hpp"

namespace oa3 {

struct RunConfig {
  Algo algo = Algo::OA3;
  std::size_t budget = 0;
  CostConfig metric;
  double eta = 1.0;
  double gamma = 1.0;
  double delta_pos = 1.0;
  double delta_neg = 1.0;
  std::optional<double> rho_override;
  std::size_t sketch_m = 5;
  std::optional<std::uint64_t> sketch_init_seed;
  std::vector<std::uint64_t> seeds{1};
  std::string dataset_name = "data";
  /// Worker threads for run_experiment; 0 picks hardware concurrency.
  std::size_t threads = 0;
  bool keep_trace = false;

  void validate() const;
  /// ρ from the override or from the dataset's class counts.
  RhoBias rho_for(const Dataset& ds) const;
  QueryConfig query_config(const RhoBias& rho) const;
  LearnerParams learner_params(const RhoBias& rho) const;
};

struct RoundOutcome {
  std::size_t t = 0;  // 1-based round index
  double p = 0.0;
  Label y_hat = Label::Positive;
  Label y = Label::Positive;
  bool z = false;
  bool queried = false;
  std::size_t budget_after = 0;
  double loss = 0.0;  // NaN on rounds that were not queried
  bool updated = false;
  bool mistake = false;

  friend bool operator==(const RoundOutcome& a, const RoundOutcome& b);
};

struct RunSummary {
  double sum = 0.0;
  double cost = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::size_t queries_used = 0;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget_exhausted_round;
};

struct RunResult {
  std::vector<RoundOutcome> trace;  // empty unless requested
  RunSummary summary;
};

/// One pass over `ds` in its given order. `rng_seed` drives the query draws.
/// Mistakes are counted on every round from the prediction made before any
/// update in that round.
RunResult run_stream(Learner& learner, const Dataset& ds, const RunConfig& cfg,
                     const RhoBias& rho, std::uint64_t rng_seed,
                     bool keep_trace);

/// Seed used for the query rng of a run; distinct from the permutation seed.
std::uint64_t query_seed(std::uint64_t seed);

struct MetricStats {
  double sum = 0.0;
  double cost = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double queries_used = 0.0;
  double wall_clock_seconds = 0.0;
};

struct Aggregate {
  std::vector<RunSummary> runs;  // in seed order
  std::vector<std::vector<RoundOutcome>> traces;  // per seed, when kept
  MetricStats mean;
  MetricStats stddev;  // sample standard deviation, 0 for a single run
};

Aggregate aggregate(std::vector<RunSummary> runs);

/// Per seed: permute with that seed, fresh learner, one stream pass.
/// Seeds run on worker threads; the dataset is shared read-only.
Aggregate run_experiment(const RunConfig& cfg, const Dataset& ds);

enum class OutputFormat { Csv, Json };

/// One result row: either a run, `__mean__` or `__std__`.
struct ResultRow {
  std::string algo;
  std::string dataset;
  std::size_t budget = 0;
  std::string metric_mode;
  double eta = 0.0;
  double gamma = 0.0;
  double delta_pos = 0.0;
  double delta_neg = 0.0;
  std::size_t sketch_m = 0;
  std::string seed;
  double sum = 0.0;
  double cost = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double queries_used = 0.0;
  double wall_clock_seconds = 0.0;
};

std::vector<ResultRow> result_rows(const Aggregate& agg, const RunConfig& cfg);
void emit_results(std::ostream& out, const Aggregate& agg, const RunConfig& cfg,
                  OutputFormat format);
void emit_rows(std::ostream& out, const std::vector<ResultRow>& rows,
               OutputFormat format);
std::vector<ResultRow> parse_results_csv(std::istream& in);

/// Per-round CSV: seed,t,p,y_hat,y,z,queried,budget_after,loss,updated,mistake
void emit_trace(std::ostream& out, const Aggregate& agg);

extern const std::vector<std::string> kResultColumns;

}  // namespace oa3
