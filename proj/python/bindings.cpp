#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ccmsel/enumeration.hpp"
#include "ccmsel/errors.hpp"
#include "ccmsel/evidence.hpp"
#include "ccmsel/graph_io.hpp"
#include "ccmsel/prior_config.hpp"
#include "ccmsel/prior_fit.hpp"
#include "ccmsel/simulate.hpp"

namespace py = pybind11;
using namespace ccmsel;

namespace {

py::dict volume_dict(const VolumeEstimate& v) {
  py::dict d;
  d["log_count"] = v.log_count.log();
  d["std_error_log"] = v.std_error_log;
  d["method"] = std::string(to_string(v.method));
  d["samples"] = v.samples;
  return d;
}

SamplingOptions sampling(std::int64_t samples, std::uint64_t seed, int oracle_limit, int jobs) {
  SamplingOptions o;
  o.samples = samples;
  o.seed = seed;
  o.oracle_limit = oracle_limit;
  o.jobs = jobs;
  return o;
}

py::dict evidence_dict(const EvidenceResult& r) {
  py::dict d;
  d["model"] = std::string(to_string(r.model));
  d["log_evidence"] = r.log_evidence.log();
  d["log10_evidence"] = r.log_evidence.log10();
  d["log_integral"] = r.log_integral.log();
  d["log_volume"] = r.log_volume.log();
  d["method"] = std::string(to_string(r.method));
  d["volume"] = volume_dict(r.volume);
  d["diagnostics"] = r.diagnostics;
  return d;
}

std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> mixing_of(const Graph& g) {
  return degree_mixing(g);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian model selection for congruence class network models";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::enum_<NodeType>(m, "NodeType")
      .value("Primary", NodeType::Primary)
      .value("Specialty", NodeType::Specialty)
      .value("Untyped", NodeType::Untyped);

  py::class_<Graph>(m, "Graph")
      .def(py::init<std::vector<std::string>, std::vector<NodeType>, std::vector<Graph::Edge>>(),
           py::arg("ids"), py::arg("types"), py::arg("edges"))
      .def_static("with_nodes", &Graph::with_nodes, py::arg("n"), py::arg("edges"))
      .def_static("with_types", &Graph::with_types, py::arg("types"), py::arg("edges"))
      .def_static("from_json", [](const std::string& text) {
        return graph_from_json(nlohmann::json::parse(text));
      })
      .def_static("read", &read_graph, py::arg("path"))
      .def("to_json", &serialize_graph)
      .def_property_readonly("n", &Graph::node_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("ids", &Graph::ids)
      .def_property_readonly("types", &Graph::types)
      .def_property_readonly("edges", &Graph::edges)
      .def("degrees", &Graph::degrees)
      .def("degree_distribution", [](const Graph& g) { return degree_distribution(g); })
      .def("degree_mixing", &mixing_of)
      .def("type_mixing", [](const Graph& g) {
        const auto t = type_mixing(g);
        return py::make_tuple(t.pp, t.ps, t.ss);
      })
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph n=" + std::to_string(g.node_count()) +
               " edges=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("log_volume", [](const Graph& g, const std::string& statistic, std::int64_t samples,
                         std::uint64_t seed, int oracle_limit, int jobs) {
          py::gil_scoped_release nogil;
          const auto v = log_volume(g, statistic_kind_from_string(statistic),
                                    sampling(samples, seed, oracle_limit, jobs));
          py::gil_scoped_acquire gil;
          return volume_dict(v);
        },
        py::arg("graph"), py::arg("statistic"), py::arg("samples") = 1000, py::arg("seed") = 0,
        py::arg("oracle_limit") = 8, py::arg("jobs") = 1);

  m.def("evidence", [](const Graph& g, const std::string& model, const std::string& priors,
                       std::int64_t samples, std::uint64_t seed, int jobs, bool normalized_pmf,
                       bool degree_multinomial, std::int64_t mc_samples) {
          const auto config = parse_prior_config(priors);
          EvidenceOptions o;
          o.sampling = sampling(samples, seed, 8, jobs);
          o.normalized_degree_pmf = normalized_pmf;
          o.degree_multinomial = degree_multinomial;
          o.mc_samples = mc_samples;
          o.mc_seed = seed;
          const auto spec = config.spec(model_id_from_string(model));
          EvidenceResult r;
          {
            py::gil_scoped_release nogil;
            r = evidence(g, spec, o);
          }
          return evidence_dict(r);
        },
        py::arg("graph"), py::arg("model"), py::arg("priors") = "", py::arg("samples") = 1000,
        py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("normalized_pmf") = false,
        py::arg("degree_multinomial") = true, py::arg("mc_samples") = 0,
        "Log evidence of one model; `priors` is the text of a prior config file.");

  m.def("posterior_probabilities",
        [](const std::vector<double>& log_evidences, std::optional<std::vector<double>> priors) {
          const auto p = priors.value_or(
              std::vector<double>(log_evidences.size(), 1.0 / double(log_evidences.size())));
          return posterior_probabilities(log_evidences, p);
        },
        py::arg("log_evidences"), py::arg("priors") = py::none());

  m.def("simulate", [](const std::string& mechanism, std::int32_t n, std::uint64_t seed,
                       double p, double lambda, std::int32_t n_primary, double p_pp, double p_ps,
                       double p_ss, std::array<double, 3> beta) {
          SimConfig c;
          c.n = n;
          c.seed = seed;
          if (mechanism == "er") c.mechanism = ErMechanism{p};
          else if (mechanism == "exp") c.mechanism = ExponentialDegreeMechanism{lambda};
          else if (mechanism == "block") c.mechanism = BlockMixingMechanism{n_primary, p_pp, p_ps, p_ss};
          else if (mechanism == "degmix")
            c.mechanism = DegreeMixingMechanism{lambda, Eigen::Vector3d(beta[0], beta[1], beta[2])};
          else throw DomainError("unknown mechanism '" + mechanism + "'");
          return sample_network(c);
        },
        py::arg("mechanism"), py::arg("n"), py::arg("seed"), py::arg("p") = 0.0,
        py::arg("lambda_") = 1.0, py::arg("n_primary") = 0, py::arg("p_pp") = 0.0,
        py::arg("p_ps") = 0.0, py::arg("p_ss") = 0.0,
        py::arg("beta") = std::array<double, 3>{0.0, 0.0, 0.0});

  m.def("replica_seed", &replica_seed, py::arg("seed"), py::arg("replica"));

  m.def("fit_prior", [](const std::map<std::string, Graph>& states, const std::string& exclude,
                        const std::string& model, std::int64_t max_degree, int jobs) {
          const auto rep = fit_prior(states, exclude, model_id_from_string(model), max_degree, jobs);
          PriorConfig config;
          config.specs[rep.fitted.id] = rep.fitted;
          py::dict d;
          d["priors"] = format_prior_config(config);
          d["per_state_summaries"] = rep.per_state_summaries;
          d["warnings"] = rep.warnings;
          return d;
        },
        py::arg("states"), py::arg("exclude"), py::arg("model"), py::arg("max_degree") = 300,
        py::arg("jobs") = 1,
        "Leave-one-out prior fit; returns the prior config text and per-state summaries.");
}
