#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "oa3/data.hpp"
#include "oa3/errors.hpp"
#include "oa3/harness.hpp"
#include "oa3/learner.hpp"
#include "oa3/objective.hpp"
#include "oa3/query.hpp"

namespace py = pybind11;
using namespace oa3;

namespace {

SparseVector sparse_from_dict(const std::map<std::uint32_t, double>& m, std::size_t dim) {
  std::vector<SparseVector::Entry> e;
  for (const auto& [i, v] : m) e.push_back({i, v});
  return SparseVector::from_unsorted(dim, std::move(e));
}

std::map<std::uint32_t, double> sparse_to_dict(const SparseVector& x) {
  std::map<std::uint32_t, double> m;
  for (const auto& e : x) m[e.index] = e.value;
  return m;
}

Label label_from_int(int y) {
  if (y == 1) return Label::Positive;
  if (y == -1) return Label::Negative;
  throw ConfigError("label must be +1 or -1");
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["seed"] = s.seed;
  d["sum"] = s.sum;
  d["cost"] = s.cost;
  d["sensitivity"] = s.sensitivity;
  d["specificity"] = s.specificity;
  d["queries_used"] = s.queries_used;
  d["wall_clock_seconds"] = s.wall_clock_seconds;
  d["budget_exhausted_round"] = s.budget_exhausted_round;
  return d;
}

py::dict stats_dict(const MetricStats& s) {
  py::dict d;
  d["sum"] = s.sum;
  d["cost"] = s.cost;
  d["sensitivity"] = s.sensitivity;
  d["specificity"] = s.specificity;
  d["queries_used"] = s.queries_used;
  d["wall_clock_seconds"] = s.wall_clock_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Budgeted online active learning for imbalanced binary streams";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("t_pos", &Dataset::t_pos)
      .def_property_readonly("t_neg", &Dataset::t_neg)
      .def("__len__", &Dataset::size)
      .def("sample", [](const Dataset& ds, std::size_t i) {
        if (i >= ds.size()) throw py::index_error();
        return py::make_tuple(sparse_to_dict(ds[i].x), static_cast<int>(ds[i].y));
      })
      .def("to_libsvm", [](const Dataset& ds) {
        std::ostringstream out;
        write_libsvm(out, ds);
        return out.str();
      });

  m.def("parse_libsvm", [](const std::string& text, std::optional<std::size_t> dim) {
    std::istringstream in(text);
    return parse_libsvm(in, dim);
  }, py::arg("text"), py::arg("dim") = py::none());

  m.def("normalize", [](const Dataset& ds) { return normalize(ds).data; });
  m.def("permute", &permute, py::arg("dataset"), py::arg("seed"));

  m.def("generate_synthetic",
        [](std::size_t dim, std::size_t n, double ratio, double separation, double sparsity,
           double offset, std::uint64_t seed) {
          return generate_synthetic({dim, n, ratio, separation, sparsity, offset, seed});
        },
        py::arg("dim"), py::arg("n"), py::arg("ratio"), py::arg("separation") = 2.0,
        py::arg("sparsity") = 1.0, py::arg("offset") = 0.0, py::arg("seed") = 1);

  m.def("compute_rho", [](const std::string& mode, std::size_t t_pos, std::size_t t_neg) {
    CostConfig cfg;
    cfg.mode = parse_metric_mode(mode);
    return compute_rho(cfg, t_pos, t_neg).rho;
  });

  m.def("metrics", [](std::size_t t_pos, std::size_t t_neg, std::size_t m_pos, std::size_t m_neg,
                      double alpha_p, double c_p) {
    CostConfig cfg{.alpha_p = alpha_p, .alpha_n = 1.0 - alpha_p, .c_p = c_p, .c_n = 1.0 - c_p};
    const auto r = finalize_metrics(MetricsAccumulator::from_counts(t_pos, t_neg, m_pos, m_neg), cfg);
    py::dict d;
    d["sum"] = r.sum;
    d["cost"] = r.cost;
    d["sensitivity"] = r.sensitivity;
    d["specificity"] = r.specificity;
    return d;
  }, py::arg("t_pos"), py::arg("t_neg"), py::arg("m_pos"), py::arg("m_neg"),
     py::arg("alpha_p") = 0.5, py::arg("c_p") = 0.9);

  m.def("query_probability",
        [](double p, double v, double delta_pos, double delta_neg, double eta, double gamma,
           double rho_max) {
          const QueryConfig cfg{delta_pos, delta_neg, eta, gamma, rho_max};
          cfg.validate();
          return query_probability(p, query_param(p, confidence(v, cfg)), cfg);
        },
        py::arg("p"), py::arg("v"), py::arg("delta_pos") = 1.0, py::arg("delta_neg") = 1.0,
        py::arg("eta") = 1.0, py::arg("gamma") = 1.0, py::arg("rho_max") = 1.0);

  py::class_<Learner>(m, "Learner")
      .def_property_readonly("algo", [](const Learner& l) { return std::string(to_string(l.algo())); })
      .def_property_readonly("dim", &Learner::dim)
      .def("margin", [](const Learner& l, const std::map<std::uint32_t, double>& x) {
        return l.margin(sparse_from_dict(x, l.dim()));
      })
      .def("variance", [](const Learner& l, const std::map<std::uint32_t, double>& x) {
        return l.variance(sparse_from_dict(x, l.dim()));
      })
      .def("learn", [](Learner& l, const std::map<std::uint32_t, double>& x, int y) {
        const auto step = l.learn(sparse_from_dict(x, l.dim()), label_from_int(y));
        return py::make_tuple(step.loss, step.updated);
      })
      .def("weights", &Learner::weights)
      .def("snapshot_json", [](const Learner& l, bool full) { return l.snapshot(full).dump(); },
           py::arg("full") = false);

  m.def("make_learner",
        [](const std::string& algo, std::size_t dim, double eta, double gamma, double rho,
           std::size_t sketch_m, std::optional<std::uint64_t> sketch_init_seed) {
          return make_learner(parse_algo(algo), dim, {eta, gamma, rho, sketch_m, sketch_init_seed});
        },
        py::arg("algo"), py::arg("dim"), py::arg("eta") = 1.0, py::arg("gamma") = 1.0,
        py::arg("rho") = 1.0, py::arg("sketch_m") = 5, py::arg("sketch_init_seed") = py::none());

  m.def("run_experiment",
        [](const Dataset& ds, const std::string& algo, std::size_t budget, const std::string& metric,
           double eta, double gamma, double delta_pos, double delta_neg, std::optional<double> rho,
           std::size_t sketch_m, const std::vector<std::uint64_t>& seeds, std::size_t threads) {
          RunConfig cfg;
          cfg.algo = parse_algo(algo);
          cfg.budget = budget;
          cfg.metric.mode = parse_metric_mode(metric);
          cfg.eta = eta;
          cfg.gamma = gamma;
          cfg.delta_pos = delta_pos;
          cfg.delta_neg = delta_neg;
          cfg.rho_override = rho;
          cfg.sketch_m = sketch_m;
          cfg.seeds = seeds;
          cfg.threads = threads;
          cfg.validate();
          Aggregate agg;
          {
            py::gil_scoped_release release;
            agg = run_experiment(cfg, ds);
          }
          py::list runs;
          for (const auto& r : agg.runs) runs.append(summary_dict(r));
          py::dict d;
          d["runs"] = runs;
          d["mean"] = stats_dict(agg.mean);
          d["std"] = stats_dict(agg.stddev);
          return d;
        },
        py::arg("dataset"), py::arg("algo") = "oa3", py::arg("budget") = 0,
        py::arg("metric") = "sum", py::arg("eta") = 1.0, py::arg("gamma") = 1.0,
        py::arg("delta_pos") = 1.0, py::arg("delta_neg") = 1.0, py::arg("rho") = py::none(),
        py::arg("sketch_m") = 5, py::arg("seeds") = std::vector<std::uint64_t>{1},
        py::arg("threads") = 0);
}
