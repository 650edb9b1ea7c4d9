#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oa3/errors.hpp"
#include "oa3/harness.hpp"
#include "oa3/learners_exact.hpp"

using namespace oa3;

namespace {

Dataset small_synth(std::size_t n = 400, std::uint64_t seed = 3) {
  return generate_synthetic({.dim = 10, .n_samples = n, .imbalance_ratio = 4,
                             .separation = 2, .sparsity = 0.6, .offset = 1, .seed = seed});
}

RunConfig base_config(Algo algo, std::size_t budget) {
  RunConfig cfg;
  cfg.algo = algo;
  cfg.budget = budget;
  cfg.delta_pos = 5;
  cfg.delta_neg = 1;
  cfg.sketch_m = 3;
  cfg.threads = 2;
  return cfg;
}

constexpr Algo kAlgos[] = {Algo::OA3, Algo::OA3Diag, Algo::SOA3, Algo::SSOA3};

}  // namespace

TEST_CASE("budget 0 on a frozen zero model") {
  std::vector<LabeledSample> neg;
  for (int i = 0; i < 5; ++i) neg.push_back({SparseVector(2, {{0, 1}}), Label::Negative});
  const Dataset all_neg(neg, 2);
  RunConfig cfg = base_config(Algo::OA3, 0);
  cfg.rho_override = 1.0;
  auto l = make_learner(Algo::OA3, 2, cfg.learner_params(RhoBias::from_value(1.0)));
  const auto r = run_stream(*l, all_neg, cfg, RhoBias::from_value(1.0), 1, true);
  CHECK(r.summary.queries_used == 0);
  std::size_t mistakes = 0;
  for (const auto& o : r.trace) {
    CHECK(o.y_hat == Label::Positive);
    CHECK(!o.queried);
    CHECK(std::isnan(o.loss));
    mistakes += o.mistake;
  }
  CHECK(mistakes == 5);
  CHECK(l->weights() == DenseVector{0, 0});
  CHECK(std::isnan(r.summary.sum));
  CHECK(r.summary.specificity == 0.0);
  REQUIRE(r.summary.budget_exhausted_round);
  CHECK(*r.summary.budget_exhausted_round == 0);

  neg[0].y = Label::Positive;
  const Dataset mixed(neg, 2);
  const auto rho = cfg.rho_for(mixed);
  auto l2 = make_learner(Algo::OA3, 2, cfg.learner_params(rho));
  const auto r2 = run_stream(*l2, mixed, cfg, rho, 1, false);
  CHECK(r2.summary.sensitivity == 1.0);
  CHECK(r2.summary.specificity == 0.0);
  CHECK(r2.summary.sum == 0.5);
  CHECK(r2.summary.cost == doctest::Approx(0.4));
}

TEST_CASE("forced queries equal a plain online pass bit-exactly") {
  const auto ds = small_synth(300);
  for (Algo algo : kAlgos) {
    RunConfig cfg = base_config(algo, ds.size());
    cfg.delta_pos = cfg.delta_neg = 1e9;
    const auto rho = cfg.rho_for(ds);
    auto active = make_learner(algo, ds.dim(), cfg.learner_params(rho));
    const auto r = run_stream(*active, ds, cfg, rho, 5, true);
    CHECK(r.summary.queries_used == ds.size());

    auto online = make_learner(algo, ds.dim(), cfg.learner_params(rho));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double p = online->margin(ds[i].x);
      CHECK(p == r.trace[i].p);
      online->learn(ds[i].x, ds[i].y);
    }
    CHECK(online->weights() == active->weights());
    CHECK(online->snapshot(true) == active->snapshot(true));
  }
}

TEST_CASE("run_stream is deterministic, budget-safe and metrics reconstruct") {
  const auto ds = small_synth();
  for (Algo algo : kAlgos) {
    for (std::size_t budget : {0UL, 1UL, 20UL, 1000UL}) {
      RunConfig cfg = base_config(algo, budget);
      const auto rho = cfg.rho_for(ds);
      auto a = make_learner(algo, ds.dim(), cfg.learner_params(rho));
      auto b = make_learner(algo, ds.dim(), cfg.learner_params(rho));
      const auto ra = run_stream(*a, ds, cfg, rho, 17, true);
      const auto rb = run_stream(*b, ds, cfg, rho, 17, true);
      CHECK(ra.trace == rb.trace);
      CHECK(a->snapshot(true) == b->snapshot(true));

      std::size_t queried = 0, remaining = budget;
      MetricsAccumulator acc;
      for (const auto& o : ra.trace) {
        if (o.queried) {
          CHECK(o.z);
          CHECK(remaining > 0);
          --remaining;
          ++queried;
        } else {
          CHECK(!o.updated);
        }
        CHECK(o.budget_after == remaining);
        CHECK(o.mistake == (o.y != o.y_hat));
        if (algo == Algo::OA3 || algo == Algo::OA3Diag) {
          if (o.queried) CHECK(o.updated == (o.loss > 0.0));
        } else if (o.queried) {
          CHECK(o.updated);
        }
        acc.record(o.y, o.y_hat);
      }
      CHECK(queried <= budget);
      CHECK(queried == ra.summary.queries_used);
      const auto m = finalize_metrics(acc, cfg.metric);
      CHECK(m.sum == ra.summary.sum);
      CHECK(m.cost == ra.summary.cost);
      CHECK(m.sensitivity == ra.summary.sensitivity);
      CHECK(m.specificity == ra.summary.specificity);
    }
  }
}

TEST_CASE("state is frozen after budget exhaustion") {
  const auto ds = small_synth(200);
  for (Algo algo : kAlgos) {
    RunConfig cfg = base_config(algo, 7);
    const auto rho = cfg.rho_for(ds);
    auto full = make_learner(algo, ds.dim(), cfg.learner_params(rho));
    const auto r = run_stream(*full, ds, cfg, rho, 2, true);
    REQUIRE(r.summary.budget_exhausted_round);
    const std::size_t k = *r.summary.budget_exhausted_round;
    CHECK(r.summary.queries_used == 7);

    std::vector<LabeledSample> prefix(ds.samples().begin(), ds.samples().begin() + k);
    auto part = make_learner(algo, ds.dim(), cfg.learner_params(rho));
    run_stream(*part, Dataset(prefix, ds.dim()), cfg, rho, 2, false);
    CHECK(part->snapshot(true) == full->snapshot(true));
  }
}

TEST_CASE("aggregate") {
  RunSummary s{.sum = 0.7, .cost = 3, .sensitivity = 0.6, .specificity = 0.8, .queries_used = 4};
  const auto one = aggregate({s});
  CHECK(one.mean.sum == 0.7);
  CHECK(one.stddev.sum == 0.0);
  CHECK(one.stddev.cost == 0.0);

  RunSummary t = s;
  t.sum = 0.9;
  const auto two = aggregate({s, t});
  CHECK(two.mean.sum == doctest::Approx(0.8));
  CHECK(two.stddev.sum == doctest::Approx(std::sqrt(0.02)));
}

TEST_CASE("run_experiment") {
  const auto ds = small_synth();
  RunConfig cfg = base_config(Algo::SSOA3, 30);
  cfg.seeds = {4, 4};
  const auto same = run_experiment(cfg, ds);
  CHECK(same.stddev.sum == 0.0);
  CHECK(same.stddev.queries_used == 0.0);

  cfg.seeds = {9};
  const auto single = run_experiment(cfg, ds);
  CHECK(single.mean.sum == single.runs[0].sum);
  CHECK(single.stddev.sum == 0.0);

  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.threads = 3;
  const auto a = run_experiment(cfg, ds);
  cfg.threads = 1;
  const auto b = run_experiment(cfg, ds);
  REQUIRE(a.runs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.runs[i].seed == cfg.seeds[i]);
    CHECK(a.runs[i].sum == b.runs[i].sum);
    CHECK(a.runs[i].queries_used == b.runs[i].queries_used);
    CHECK(a.runs[i].queries_used <= cfg.budget);
  }
}

TEST_CASE("RunConfig validation") {
  RunConfig cfg;
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.eta = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.algo = Algo::SOA3;
  cfg.sketch_m = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.rho_override = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("dimension mismatch between learner and data") {
  const auto ds = small_synth(20);
  RunConfig cfg = base_config(Algo::OA3, 5);
  auto l = make_learner(Algo::OA3, ds.dim() + 1, {});
  CHECK_THROWS_AS(run_stream(*l, ds, cfg, RhoBias::from_value(1.0), 1, false), DimensionError);
}

TEST_CASE("CSV output has the fixed header and round-trips") {
  const auto ds = small_synth();
  RunConfig cfg = base_config(Algo::OA3Diag, 25);
  cfg.seeds = {1, 2, 3};
  cfg.dataset_name = "toy";
  const auto agg = run_experiment(cfg, ds);

  std::ostringstream out;
  emit_results(out, agg, cfg, OutputFormat::Csv);
  const std::string text = out.str();
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "algo,dataset,budget,metric_mode,eta,gamma,delta_pos,delta_neg,sketch_m,seed,sum,cost,"
        "sensitivity,specificity,queries_used,wall_clock_seconds");

  std::istringstream in(text);
  const auto rows = parse_results_csv(in);
  const auto expected = result_rows(agg, cfg);
  REQUIRE(rows.size() == 5);
  REQUIRE(expected.size() == 5);
  CHECK(rows[3].seed == "__mean__");
  CHECK(rows[4].seed == "__std__");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].algo == "oa3_diag");
    CHECK(rows[i].dataset == "toy");
    CHECK(rows[i].seed == expected[i].seed);
    CHECK(rows[i].sum == expected[i].sum);
    CHECK(rows[i].cost == expected[i].cost);
    CHECK(rows[i].sensitivity == expected[i].sensitivity);
    CHECK(rows[i].specificity == expected[i].specificity);
    CHECK(rows[i].queries_used == expected[i].queries_used);
    CHECK(rows[i].wall_clock_seconds == expected[i].wall_clock_seconds);
  }
  CHECK(rows[3].sum == agg.mean.sum);
  CHECK(rows[4].sum == agg.stddev.sum);

  cfg.seeds = {1};
  std::ostringstream one;
  emit_results(one, run_experiment(cfg, ds), cfg, OutputFormat::Csv);
  CHECK(one.str().rfind(header, 0) == 0);
}

TEST_CASE("JSON output mirrors the CSV fields") {
  const auto ds = small_synth();
  RunConfig cfg = base_config(Algo::OA3, 10);
  cfg.seeds = {1, 2};
  std::ostringstream out;
  emit_results(out, run_experiment(cfg, ds), cfg, OutputFormat::Json);
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j.is_array());
  CHECK(j.size() == 4);
  for (const auto& col : kResultColumns) CHECK(j[0].contains(col));
}

TEST_CASE("trace CSV") {
  const auto ds = small_synth(30);
  RunConfig cfg = base_config(Algo::OA3, 5);
  cfg.keep_trace = true;
  const auto agg = run_experiment(cfg, ds);
  std::ostringstream out;
  emit_trace(out, agg);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "seed,t,p,y_hat,y,z,queried,budget_after,loss,updated,mistake");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 30);
}
