#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "findhccs/artifacts.hpp"
#include "findhccs/config.hpp"
#include "findhccs/extract.hpp"
#include "findhccs/features.hpp"
#include "findhccs/pipeline.hpp"
#include "findhccs/synth.hpp"
#include "findhccs/validate.hpp"

namespace py = pybind11;
using namespace findhccs;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side does the dict conversion.
std::string run(const std::string& config_json) {
  auto cfg = pipeline_config_from_json(json::parse(config_json));
  apply_env_overrides(cfg);
  cfg.validate();
  const auto summary = run_pipeline(cfg);
  json stages = json::array();
  for (const auto& s : summary.stages) stages.push_back({{"name", s.name}, {"counts", s.counts}, {"seconds", s.seconds}});
  return json{{"stages", stages}, {"artifacts", summary.artifacts}, {"total_seconds", summary.total_seconds}}.dump();
}

std::string synth(const std::string& spec_json, const std::string& out_dir) {
  auto spec = synth_spec_from_json(json::parse(spec_json));
  spec.validate();
  const auto corpus = generate_corpus(spec);
  ArtifactSet out(out_dir);
  out.write("posts.jsonl", [&](std::ostream& o) { write_posts_jsonl(o, corpus.posts); });
  out.write("truth.csv", [&](std::ostream& o) { write_truth_csv(o, corpus.truth); });
  out.write_text("synth.json", to_json(spec).dump(2) + "\n");
  out.commit();
  return json{{"posts", corpus.posts.size()}, {"truth", corpus.truth}}.dump();
}

CollapsedGraph graph_from(const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  CollapsedGraph g;
  for (const auto& [a, b, w] : edges) {
    if (a == b) throw ContractError("self-loop on '" + a + "'");
    g.nodes.insert(a);
    g.nodes.insert(b);
    g.edges[make_pair_key(a, b)] += w;
  }
  return g;
}

std::vector<std::pair<std::vector<std::string>, double>> extract(
    const std::vector<std::tuple<std::string, std::string, double>>& edges, const std::string& method, double theta,
    double threshold, std::uint64_t seed) {
  const auto g = graph_from(edges);
  std::vector<Hcc> hccs;
  switch (extraction_method_from_string(method)) {
    case ExtractionMethod::FsaV: hccs = extract_fsa_v(g, theta, seed); break;
    case ExtractionMethod::Knn: hccs = extract_knn(g); break;
    case ExtractionMethod::Threshold: hccs = extract_threshold(g, threshold); break;
  }
  std::vector<std::pair<std::vector<std::string>, double>> out;
  for (const auto& h : hccs) out.emplace_back(h.members, h.mew);
  return out;
}

double similarity(const std::set<std::string>& x, const std::set<std::string>& y, const std::string& measure) {
  if (measure == "jaccard") return set_similarity(x, y, SetMeasure::Jaccard);
  if (measure == "overlap") return set_similarity(x, y, SetMeasure::Overlap);
  throw ContractError("unknown measure '" + measure + "' (expected jaccard or overlap)");
}

std::vector<std::string> names(auto const& arr) { return {arr.begin(), arr.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coordinated-behaviour detection core";

  static py::exception<ContractError> contract_error(m, "ContractError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ContractError& e) {
      contract_error(e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const EmptyCorpusError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("_run", &run, py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
  m.def("_synth", &synth, py::arg("spec_json"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
  m.def("_load_config", [](const std::string& path) { return load_config_file(path).dump(); }, py::arg("path"));
  m.def("extract", &extract, py::arg("edges"), py::arg("method") = "fsa_v", py::arg("theta") = 0.3,
        py::arg("threshold") = 0.1, py::arg("seed") = 0,
        "HCCs of a weighted edge list as (members, mean edge weight) pairs.");
  m.def("set_similarity", &similarity, py::arg("x"), py::arg("y"), py::arg("measure") = "jaccard");
  m.def("ngram_cosine", &ngram_cosine, py::arg("a"), py::arg("b"));
  m.def("report", [](const std::string& artifacts, const std::vector<std::string>& which) {
    ReportOptions opts;
    opts.which = which;
    return run_report(artifacts, opts);
  }, py::arg("artifacts"), py::arg("which"));
  m.def("export_features", [](const std::string& artifacts, const std::string& out, std::optional<std::uint64_t> seed) {
    export_features(artifacts, out, seed);
  }, py::arg("artifacts"), py::arg("out"), py::arg("seed") = py::none());
  m.def("account_feature_names", [] { return names(account_feature_names()); });
  m.def("group_feature_names", [] { return names(group_feature_names()); });
}
