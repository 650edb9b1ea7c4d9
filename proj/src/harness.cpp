#include "oa3/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "oa3/errors.hpp"
#include "oa3/learners_exact.hpp"

namespace oa3 {

const std::vector<std::string> kResultColumns = {
    "algo",        "dataset",     "budget",       "metric_mode",
    "eta",         "gamma",       "delta_pos",    "delta_neg",
    "sketch_m",    "seed",        "sum",          "cost",
    "sensitivity", "specificity", "queries_used", "wall_clock_seconds"};

void RunConfig::validate() const {
  metric.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  query_config(RhoBias{}).validate();
  if (rho_override) RhoBias::from_value(*rho_override);
  if ((algo == Algo::SOA3 || algo == Algo::SSOA3) && sketch_m == 0) {
    throw ConfigError("sketch size must be >= 1");
  }
}

RhoBias RunConfig::rho_for(const Dataset& ds) const {
  if (rho_override) return RhoBias::from_value(*rho_override);
  return compute_rho(metric, ds.t_pos(), ds.t_neg());
}

QueryConfig RunConfig::query_config(const RhoBias& rho) const {
  return {delta_pos, delta_neg, eta, gamma, rho.rho_max};
}

LearnerParams RunConfig::learner_params(const RhoBias& rho) const {
  return {eta, gamma, rho.rho, sketch_m, sketch_init_seed};
}

namespace {

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

bool operator==(const RoundOutcome& a, const RoundOutcome& b) {
  return a.t == b.t && same_double(a.p, b.p) && a.y_hat == b.y_hat &&
         a.y == b.y && a.z == b.z && a.queried == b.queried &&
         a.budget_after == b.budget_after && same_double(a.loss, b.loss) &&
         a.updated == b.updated && a.mistake == b.mistake;
}

RunResult run_stream(Learner& learner, const Dataset& ds, const RunConfig& cfg,
                     const RhoBias& rho, std::uint64_t rng_seed,
                     bool keep_trace) {
  if (ds.dim() != learner.dim()) {
    throw DimensionError("dataset dimension " + std::to_string(ds.dim()) +
                         " does not match learner dimension " +
                         std::to_string(learner.dim()));
  }
  const QueryConfig qcfg = cfg.query_config(rho);
  Rng rng(rng_seed);
  MetricsAccumulator acc;
  std::size_t remaining = cfg.budget;
  if (remaining == 0) acc.mark_exhausted(0);

  RunResult result;
  if (keep_trace) result.trace.reserve(ds.size());

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& [x, y] = ds[i];
    RoundOutcome out;
    out.t = i + 1;
    out.y = y;
    out.p = learner.margin(x);
    out.y_hat = predict_label(out.p);
    out.mistake = out.y_hat != y;
    acc.record(y, out.y_hat);

    const QueryDecision d = decide(out.p, learner.variance(x), qcfg, rng);
    out.z = d.z;
    out.queried = d.z && remaining > 0;
    out.loss = std::numeric_limits<double>::quiet_NaN();
    if (out.queried) {
      --remaining;
      const LearnStep step = learner.learn(x, y);
      out.loss = step.loss;
      out.updated = step.updated;
      acc.record_query(out.t, remaining);
    }
    out.budget_after = remaining;
    if (keep_trace) result.trace.push_back(out);
  }
  const auto stop = std::chrono::steady_clock::now();

  const Metrics m = finalize_metrics(acc, cfg.metric);
  auto& s = result.summary;
  s.sum = m.sum;
  s.cost = m.cost;
  s.sensitivity = m.sensitivity;
  s.specificity = m.specificity;
  s.queries_used = acc.queries();
  s.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
  s.seed = rng_seed;
  s.budget_exhausted_round = acc.budget_exhausted_round();
  return result;
}

std::uint64_t query_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Aggregate aggregate(std::vector<RunSummary> runs) {
  Aggregate agg;
  agg.runs = std::move(runs);
  const auto n = static_cast<double>(agg.runs.size());
  if (agg.runs.empty()) return agg;

  auto fields = [](MetricStats& st) {
    return std::array<double*, 6>{&st.sum, &st.cost, &st.sensitivity,
                                  &st.specificity, &st.queries_used,
                                  &st.wall_clock_seconds};
  };
  auto values = [](const RunSummary& r) {
    return std::array<double, 6>{r.sum, r.cost, r.sensitivity, r.specificity,
                                 static_cast<double>(r.queries_used),
                                 r.wall_clock_seconds};
  };
  auto mean = fields(agg.mean);
  auto sd = fields(agg.stddev);
  for (const auto& r : agg.runs) {
    const auto v = values(r);
    for (std::size_t k = 0; k < v.size(); ++k) *mean[k] += v[k];
  }
  for (auto* p : mean) *p /= n;
  if (agg.runs.size() > 1) {
    for (const auto& r : agg.runs) {
      const auto v = values(r);
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double dv = v[k] - *mean[k];
        *sd[k] += dv * dv;
      }
    }
    for (auto* p : sd) *p = std::sqrt(*p / (n - 1.0));
  }
  return agg;
}

Aggregate run_experiment(const RunConfig& cfg, const Dataset& ds) {
  cfg.validate();
  const RhoBias rho = cfg.rho_for(ds);
  const LearnerParams params = cfg.learner_params(rho);
  const std::size_t n = cfg.seeds.size();

  std::vector<RunSummary> runs(n);
  std::vector<std::vector<RoundOutcome>> traces(cfg.keep_trace ? n : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[i];
        const Dataset order = permute(ds, seed);
        auto learner = make_learner(cfg.algo, ds.dim(), params);
        RunResult r = run_stream(*learner, order, cfg, rho, query_seed(seed),
                                 cfg.keep_trace);
        r.summary.seed = seed;
        runs[i] = r.summary;
        if (cfg.keep_trace) traces[i] = std::move(r.trace);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t workers = cfg.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Aggregate agg = aggregate(std::move(runs));
  agg.traces = std::move(traces);
  return agg;
}

// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

ResultRow base_row(const RunConfig& cfg) {
  ResultRow row;
  row.algo = std::string(to_string(cfg.algo));
  row.dataset = cfg.dataset_name;
  row.budget = cfg.budget;
  row.metric_mode = std::string(to_string(cfg.metric.mode));
  row.eta = cfg.eta;
  row.gamma = cfg.gamma;
  row.delta_pos = cfg.delta_pos;
  row.delta_neg = cfg.delta_neg;
  const bool sketched = cfg.algo == Algo::SOA3 || cfg.algo == Algo::SSOA3;
  row.sketch_m = sketched ? cfg.sketch_m : 0;
  return row;
}

void fill(ResultRow& row, const MetricStats& st) {
  row.sum = st.sum;
  row.cost = st.cost;
  row.sensitivity = st.sensitivity;
  row.specificity = st.specificity;
  row.queries_used = st.queries_used;
  row.wall_clock_seconds = st.wall_clock_seconds;
}

std::vector<std::string> row_cells(const ResultRow& r) {
  return {r.algo,
          r.dataset,
          std::to_string(r.budget),
          r.metric_mode,
          format_double(r.eta),
          format_double(r.gamma),
          format_double(r.delta_pos),
          format_double(r.delta_neg),
          std::to_string(r.sketch_m),
          r.seed,
          format_double(r.sum),
          format_double(r.cost),
          format_double(r.sensitivity),
          format_double(r.specificity),
          format_double(r.queries_used),
          format_double(r.wall_clock_seconds)};
}

nlohmann::json json_number(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

double parse_cell_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw DataError("malformed number '" + s + "' in results CSV");
  }
  return v;
}

std::size_t parse_cell_count(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw DataError("malformed count '" + s + "' in results CSV");
  }
  return v;
}

}  // namespace

std::vector<ResultRow> result_rows(const Aggregate& agg, const RunConfig& cfg) {
  std::vector<ResultRow> rows;
  for (const auto& run : agg.runs) {
    ResultRow row = base_row(cfg);
    row.seed = std::to_string(run.seed);
    fill(row, MetricStats{run.sum, run.cost, run.sensitivity, run.specificity,
                          static_cast<double>(run.queries_used),
                          run.wall_clock_seconds});
    rows.push_back(std::move(row));
  }
  ResultRow mean = base_row(cfg);
  mean.seed = "__mean__";
  fill(mean, agg.mean);
  ResultRow sd = base_row(cfg);
  sd.seed = "__std__";
  fill(sd, agg.stddev);
  rows.push_back(std::move(mean));
  rows.push_back(std::move(sd));
  return rows;
}

void emit_rows(std::ostream& out, const std::vector<ResultRow>& rows,
               OutputFormat format) {
  if (format == OutputFormat::Csv) {
    for (std::size_t k = 0; k < kResultColumns.size(); ++k) {
      out << (k ? "," : "") << kResultColumns[k];
    }
    out << '\n';
    for (const auto& r : rows) {
      const auto cells = row_cells(r);
      for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
      out << '\n';
    }
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"algo", r.algo},
                     {"dataset", r.dataset},
                     {"budget", r.budget},
                     {"metric_mode", r.metric_mode},
                     {"eta", r.eta},
                     {"gamma", r.gamma},
                     {"delta_pos", r.delta_pos},
                     {"delta_neg", r.delta_neg},
                     {"sketch_m", r.sketch_m},
                     {"seed", r.seed},
                     {"sum", json_number(r.sum)},
                     {"cost", json_number(r.cost)},
                     {"sensitivity", json_number(r.sensitivity)},
                     {"specificity", json_number(r.specificity)},
                     {"queries_used", json_number(r.queries_used)},
                     {"wall_clock_seconds", json_number(r.wall_clock_seconds)}});
    }
    out << arr.dump(2) << '\n';
  }
  if (!out) throw DataError("write error while emitting results");
}

void emit_results(std::ostream& out, const Aggregate& agg, const RunConfig& cfg,
                  OutputFormat format) {
  emit_rows(out, result_rows(agg, cfg), format);
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("results CSV is empty");
  if (split_csv(line) != kResultColumns) {
    throw DataError("results CSV header does not match the expected columns");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto c = split_csv(line);
    if (c.size() != kResultColumns.size()) {
      throw DataError("results CSV row has " + std::to_string(c.size()) +
                      " cells, expected " + std::to_string(kResultColumns.size()));
    }
    ResultRow r;
    r.algo = c[0];
    r.dataset = c[1];
    r.budget = parse_cell_count(c[2]);
    r.metric_mode = c[3];
    r.eta = parse_cell_double(c[4]);
    r.gamma = parse_cell_double(c[5]);
    r.delta_pos = parse_cell_double(c[6]);
    r.delta_neg = parse_cell_double(c[7]);
    r.sketch_m = parse_cell_count(c[8]);
    r.seed = c[9];
    r.sum = parse_cell_double(c[10]);
    r.cost = parse_cell_double(c[11]);
    r.sensitivity = parse_cell_double(c[12]);
    r.specificity = parse_cell_double(c[13]);
    r.queries_used = parse_cell_double(c[14]);
    r.wall_clock_seconds = parse_cell_double(c[15]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_trace(std::ostream& out, const Aggregate& agg) {
  out << "seed,t,p,y_hat,y,z,queried,budget_after,loss,updated,mistake\n";
  for (std::size_t i = 0; i < agg.traces.size(); ++i) {
    const auto seed = agg.runs[i].seed;
    for (const auto& r : agg.traces[i]) {
      out << seed << ',' << r.t << ',' << format_double(r.p) << ','
          << static_cast<int>(r.y_hat) << ',' << static_cast<int>(r.y) << ','
          << r.z << ',' << r.queried << ',' << r.budget_after << ','
          << (r.queried ? format_double(r.loss) : "") << ',' << r.updated << ','
          << r.mistake << '\n';
    }
  }
  if (!out) throw DataError("write error while emitting trace");
}

}  // namespace oa3
