// oa3: budgeted online active learning on imbalanced binary streams.
//
//   oa3 run     --data file.svm --algo soa3 --budget 500 --seeds 1,2,3 --out r.csv
//   oa3 synth   --dim 20 --n 20000 --ratio 10 --separation 2 --sparsity 1 --seed 7 --out s.svm
//   oa3 inspect --data file.svm
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oa3/data.hpp"
#include "oa3/errors.hpp"
#include "oa3/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw oa3::ConfigError("bad seed '" + tok + "'");
    }
  }
  if (seeds.empty()) throw oa3::ConfigError("--seeds must list at least one seed");
  return seeds;
}

// "dim=20,n=20000,ratio=10,separation=2,sparsity=1,seed=7[,offset=1]"
oa3::SynthConfig parse_synth_spec(const std::string& text) {
  oa3::SynthConfig cfg;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw oa3::ConfigError("--synth item '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      if (key == "dim") cfg.dim = std::stoull(val);
      else if (key == "n") cfg.n_samples = std::stoull(val);
      else if (key == "ratio") cfg.imbalance_ratio = std::stod(val);
      else if (key == "separation") cfg.separation = std::stod(val);
      else if (key == "sparsity") cfg.sparsity = std::stod(val);
      else if (key == "offset") cfg.offset = std::stod(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else throw oa3::ConfigError("unknown --synth key '" + key + "'");
    } catch (const oa3::ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw oa3::ConfigError("bad value for --synth key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

oa3::Dataset load_dataset(const std::string& path, std::optional<std::size_t> dim) {
  std::ifstream in(path);
  if (!in) throw oa3::DataError("cannot open '" + path + "'");
  try {
    return oa3::parse_libsvm(in, dim);
  } catch (const oa3::ParseError& e) {
    throw oa3::DataError(path + ": " + e.what());
  }
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw oa3::DataError("cannot write '" + path + "'");
  fn(out);
  out.flush();
  if (!out) throw oa3::DataError("write failed for '" + path + "'");
}

struct RunArgs {
  std::string data;
  std::string synth;
  std::optional<std::size_t> dim;
  std::string algo = "oa3";
  std::size_t budget = 0;
  std::string metric = "sum";
  double alpha_p = 0.5;
  double c_p = 0.9;
  double eta = 1.0;
  double gamma = 1.0;
  double delta_pos = 1.0;
  double delta_neg = 1.0;
  std::size_t sketch_m = 5;
  std::optional<double> rho;
  std::string seeds = "1";
  std::string out = "-";
  std::string format = "csv";
  std::string trace;
  std::string snapshot;
  bool full_state = false;
  std::size_t threads = 0;
};

int cmd_run(const RunArgs& a) {
  oa3::RunConfig cfg;
  cfg.algo = oa3::parse_algo(a.algo);
  cfg.budget = a.budget;
  cfg.metric.mode = oa3::parse_metric_mode(a.metric);
  cfg.metric.alpha_p = a.alpha_p;
  cfg.metric.alpha_n = 1.0 - a.alpha_p;
  cfg.metric.c_p = a.c_p;
  cfg.metric.c_n = 1.0 - a.c_p;
  cfg.eta = a.eta;
  cfg.gamma = a.gamma;
  cfg.delta_pos = a.delta_pos;
  cfg.delta_neg = a.delta_neg;
  cfg.rho_override = a.rho;
  cfg.sketch_m = a.sketch_m;
  cfg.seeds = parse_seeds(a.seeds);
  cfg.threads = a.threads;
  cfg.keep_trace = !a.trace.empty();
  const auto format = a.format == "json" ? oa3::OutputFormat::Json : oa3::OutputFormat::Csv;
  cfg.validate();

  oa3::Dataset ds;
  if (!a.synth.empty()) {
    ds = oa3::generate_synthetic(parse_synth_spec(a.synth));
    cfg.dataset_name = "synth";
  } else {
    auto normalized = oa3::normalize(load_dataset(a.data, a.dim));
    if (normalized.zero_norm_count > 0) {
      std::cerr << "warning: " << normalized.zero_norm_count
                << " zero-norm samples left unnormalized\n";
    }
    ds = std::move(normalized.data);
    cfg.dataset_name = std::filesystem::path(a.data).stem().string();
  }
  if (ds.size() == 0) throw oa3::DataError("dataset is empty");

  const oa3::Aggregate agg = oa3::run_experiment(cfg, ds);
  with_output(a.out, [&](std::ostream& os) { oa3::emit_results(os, agg, cfg, format); });
  if (!a.trace.empty()) {
    with_output(a.trace, [&](std::ostream& os) { oa3::emit_trace(os, agg); });
  }
  if (!a.snapshot.empty()) {
    // Re-runs the first seed to capture its final learner state.
    const auto seed = cfg.seeds.front();
    const auto rho = cfg.rho_for(ds);
    auto learner = oa3::make_learner(cfg.algo, ds.dim(), cfg.learner_params(rho));
    oa3::run_stream(*learner, oa3::permute(ds, seed), cfg, rho, oa3::query_seed(seed), false);
    with_output(a.snapshot, [&](std::ostream& os) {
      os << learner->snapshot(a.full_state).dump(2) << '\n';
    });
  }
  return 0;
}

int cmd_synth(const oa3::SynthConfig& cfg, const std::string& out) {
  const oa3::Dataset ds = oa3::generate_synthetic(cfg);
  with_output(out, [&](std::ostream& os) { oa3::write_libsvm(os, ds); });
  return 0;
}

int cmd_inspect(const std::string& path, std::optional<std::size_t> dim) {
  const oa3::Dataset ds = load_dataset(path, dim);
  std::cout << "dim " << ds.dim() << '\n'
            << "T " << ds.size() << '\n'
            << "T_p " << ds.t_pos() << '\n'
            << "T_n " << ds.t_neg() << '\n';
  if (ds.t_pos() > 0) {
    std::cout << "ratio 1:" << static_cast<double>(ds.t_neg()) / static_cast<double>(ds.t_pos())
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted online active learning for imbalanced binary streams"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run an experiment over one or more seeds");
  auto* data_opt = run->add_option("--data", ra.data, "LIBSVM dataset path");
  auto* synth_opt = run->add_option("--synth", ra.synth,
                                    "Synthetic stream: dim=,n=,ratio=,separation=,sparsity=,seed=[,offset=]");
  data_opt->excludes(synth_opt);
  run->add_option("--dim", ra.dim, "Pad dataset dimensionality");
  run->add_option("--algo", ra.algo, "oa3 | oa3_diag | soa3 | ssoa3")
      ->check(CLI::IsMember({"oa3", "oa3_diag", "soa3", "ssoa3"}));
  run->add_option("--budget", ra.budget, "Label query budget B")->required();
  run->add_option("--metric", ra.metric, "sum | cost")->check(CLI::IsMember({"sum", "cost"}));
  run->add_option("--alpha-p", ra.alpha_p, "Sensitivity weight (alpha_n = 1 - alpha_p)");
  run->add_option("--c-p", ra.c_p, "Positive mistake cost (c_n = 1 - c_p)");
  run->add_option("--eta", ra.eta, "Learning rate");
  run->add_option("--gamma", ra.gamma, "Regularization parameter");
  run->add_option("--delta-pos", ra.delta_pos, "Query bias for positive predictions");
  run->add_option("--delta-neg", ra.delta_neg, "Query bias for negative predictions");
  run->add_option("--sketch-m", ra.sketch_m, "Sketch size (soa3, ssoa3)");
  run->add_option("--rho", ra.rho, "Override the loss bias rho");
  run->add_option("--seeds", ra.seeds, "Comma-separated seeds");
  run->add_option("--out", ra.out, "Results path ('-' for stdout)");
  run->add_option("--format", ra.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--trace", ra.trace, "Per-round trace CSV path");
  run->add_option("--snapshot", ra.snapshot, "Final learner state JSON (first seed)");
  run->add_flag("--full-state", ra.full_state, "Include dense matrices in --snapshot");
  run->add_option("--threads", ra.threads, "Worker threads (0 = all cores)");

  oa3::SynthConfig sc;
  std::string synth_out = "-";
  auto* synth = app.add_subcommand("synth", "Write a synthetic imbalanced stream as LIBSVM text");
  synth->add_option("--dim", sc.dim, "Dimensionality")->required();
  synth->add_option("--n", sc.n_samples, "Number of samples")->required();
  synth->add_option("--ratio", sc.imbalance_ratio, "T_n / T_p")->required();
  synth->add_option("--separation", sc.separation, "Distance between class means")->required();
  synth->add_option("--sparsity", sc.sparsity, "Fraction of coordinates kept")->required();
  synth->add_option("--offset", sc.offset, "Shared class-independent offset");
  synth->add_option("--seed", sc.seed, "Generator seed")->required();
  synth->add_option("--out", synth_out, "Output path ('-' for stdout)")->required();

  std::string inspect_path;
  std::optional<std::size_t> inspect_dim;
  auto* inspect = app.add_subcommand("inspect", "Print dataset statistics");
  inspect->add_option("--data", inspect_path, "LIBSVM dataset path")->required();
  inspect->add_option("--dim", inspect_dim, "Pad dataset dimensionality");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) {
      if (ra.data.empty() && ra.synth.empty()) {
        throw oa3::ConfigError("run needs --data or --synth");
      }
      return cmd_run(ra);
    }
    if (*synth) return cmd_synth(sc, synth_out);
    if (*inspect) return cmd_inspect(inspect_path, inspect_dim);
  } catch (const oa3::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const oa3::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const oa3::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const oa3::DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
