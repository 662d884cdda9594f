// find-hccs: command line front end for the coordination pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "findhccs/artifacts.hpp"
#include "findhccs/config.hpp"
#include "findhccs/csv.hpp"
#include "findhccs/evidence.hpp"
#include "findhccs/extract.hpp"
#include "findhccs/graphml.hpp"
#include "findhccs/ingest.hpp"
#include "findhccs/lcn.hpp"
#include "findhccs/pipeline.hpp"
#include "findhccs/synth.hpp"

namespace fs = std::filesystem;
using namespace findhccs;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::uint64_t seed_with_env(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  PipelineConfig probe;
  probe.seed = flag.value_or(fallback);
  if (!flag) apply_env_overrides(probe);
  return probe.seed;
}

std::string read_header(const fs::path& p) {
  auto in = open_input(p);
  csv::Row row;
  if (!csv::read_row(in, row)) return {};
  std::string out;
  for (const auto& f : row) out += (out.empty() ? "" : ",") + f;
  return out;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Find highly coordinating communities in social media posts"};
  app.require_subcommand(1);

  // parse
  auto* parse = app.add_subcommand("parse", "Normalize posts and extract interactions");
  std::string parse_input, parse_format = "canonical-jsonl", parse_out;
  parse->add_option("--input", parse_input, "Post corpus")->required();
  parse->add_option("--format", parse_format, "canonical-jsonl, canonical-csv or twitter-v1.1");
  parse->add_option("--out-dir", parse_out, "Output directory")->required();

  // evidence
  auto* evidence = app.add_subcommand("evidence", "Find pairwise coordination evidence per window");
  PipelineConfig ev_cfg;
  std::string ev_interactions, ev_out, ev_detail_out, ev_multiplicity = "min-count";
  std::vector<std::string> ev_criteria{"co-retweet"};
  std::optional<std::int64_t> ev_gamma_minutes, ev_gamma_seconds;
  evidence->add_option("--interactions", ev_interactions, "interactions.csv from parse")->required();
  evidence->add_option("--criterion", ev_criteria, "Coordination criteria (repeatable)");
  evidence->add_option("--gamma-minutes", ev_gamma_minutes, "Window length in minutes (default 15)");
  evidence->add_option("--gamma-seconds", ev_gamma_seconds, "Window length in seconds");
  evidence->add_option("--origin", ev_cfg.origin, "Epoch of window 0");
  evidence->add_flag("--include-quotes", ev_cfg.include_quotes_as_reposts, "Count quotes as reposts");
  evidence->add_option("--multiplicity", ev_multiplicity, "min-count or binary");
  evidence->add_option("--workers", ev_cfg.workers, "Worker threads (0 = all cores)");
  evidence->add_option("--out", ev_out, "evidence.csv")->required();
  evidence->add_option("--detail-out", ev_detail_out, "Per-target evidence CSV");

  // lcn
  auto* lcn_cmd = app.add_subcommand("lcn", "Build and aggregate latent coordination networks");
  std::string lcn_evidence, lcn_out, lcn_windows_out, lcn_graphml;
  int lcn_frame = 1;
  double lcn_alpha = 0.0;
  lcn_cmd->add_option("--evidence", lcn_evidence, "evidence.csv")->required();
  lcn_cmd->add_option("--frame-windows", lcn_frame, "Sliding frame length T");
  lcn_cmd->add_option("--alpha", lcn_alpha, "Decay factor");
  lcn_cmd->add_option("--out", lcn_out, "lcn.csv")->required();
  lcn_cmd->add_option("--windows-out", lcn_windows_out, "Per-window summary CSV");
  lcn_cmd->add_option("--graphml", lcn_graphml, "Also write GraphML");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract HCCs from an LCN");
  std::string ex_lcn, ex_out, ex_method = "fsa_v";
  double ex_theta = 0.3, ex_threshold = 0.1;
  std::optional<std::uint64_t> ex_seed;
  std::vector<std::string> ex_weights;
  extract->add_option("--lcn", ex_lcn, "lcn.csv")->required();
  extract->add_option("--method", ex_method, "fsa_v, knn or threshold");
  extract->add_option("--theta", ex_theta, "FSA_V growth ratio");
  extract->add_option("--threshold", ex_threshold, "Normalized weight threshold");
  extract->add_option("--seed", ex_seed, "Louvain seed");
  extract->add_option("--weight", ex_weights, "criterion=multiplier (repeatable)");
  extract->add_option("--out-dir", ex_out, "Output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Compute validation metrics over a run");
  std::string rp_dir;
  ReportOptions rp;
  std::vector<std::string> rp_runs, rp_excluded;
  std::optional<std::uint64_t> rp_seed;
  report->add_option("--artifacts", rp_dir, "Run output directory")->required();
  report->add_option("--which", rp.which, "Reports to produce")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(report_kinds()));
  report->add_option("--runs", rp_runs, "Other run directories (membership)");
  report->add_option("--bin-seconds", rp.timeline_bin_seconds, "Timeline bin length");
  report->add_option("--min-cooccurrence", rp.cooccurrence_min_weight, "Minimum hashtag co-occurrence");
  report->add_option("--exclude-hashtag", rp_excluded, "Hashtags left out of co-occurrence");
  report->add_option("--seed", rp_seed, "Random baseline seed");

  // features
  auto* features = app.add_subcommand("features", "Export classifier feature vectors");
  std::string ft_dir, ft_out;
  std::optional<std::uint64_t> ft_seed;
  features->add_option("--artifacts", ft_dir, "Run output directory")->required();
  features->add_option("--out", ft_out, "features.csv")->required();
  features->add_option("--seed", ft_seed, "Random baseline seed");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a corpus with planted coordinating groups");
  std::string sy_config, sy_out;
  std::optional<std::uint64_t> sy_seed;
  synth->add_option("--config", sy_config, "Synth spec (TOML or JSON)");
  synth->add_option("--seed", sy_seed, "Seed");
  synth->add_option("--out-dir", sy_out, "Output directory")->required();

  // score
  auto* score = app.add_subcommand("score", "Score detected HCCs against planted truth");
  std::string sc_hccs, sc_truth, sc_out;
  score->add_option("--hccs", sc_hccs, "hccs.csv")->required();
  score->add_option("--truth", sc_truth, "truth.csv")->required();
  score->add_option("--out", sc_out, "Write the report as JSON here");

  // run
  auto* run = app.add_subcommand("run", "Run parse, evidence, aggregate and extract from a config");
  std::string run_config, run_out;
  run->add_option("--config", run_config, "Pipeline config (TOML or JSON)")->required();
  run->add_option("--output-dir", run_out, "Override output_dir");

  // export-graph
  auto* exporter = app.add_subcommand("export-graph", "Convert an LCN or HCC artifact");
  std::string xg_input, xg_format = "graphml", xg_out;
  exporter->add_option("--input", xg_input, "lcn.csv, hccs.csv or hcc_edges.csv")->required();
  exporter->add_option("--format", xg_format, "graphml or edge-csv")->check(CLI::IsMember({"graphml", "edge-csv"}));
  exporter->add_option("--out", xg_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) {
      const auto parsed = parse_posts_file(parse_input, input_format_from_string(parse_format));
      const auto interactions = extract_interactions(parsed.posts, resolve_conversations(parsed.posts));
      ArtifactSet out(parse_out);
      out.write("posts.jsonl", [&](std::ostream& o) { write_posts_jsonl(o, parsed.posts); });
      out.write("interactions.csv", [&](std::ostream& o) { write_interactions_csv(o, interactions); });
      out.commit();
      print_json({{"posts", parsed.posts.size()}, {"skipped", parsed.skipped}, {"interactions", interactions.size()}});
    } else if (*evidence) {
      if (ev_gamma_minutes && ev_gamma_seconds) throw ContractError("give --gamma-minutes or --gamma-seconds, not both");
      ev_cfg.gamma_seconds = ev_gamma_seconds ? *ev_gamma_seconds : ev_gamma_minutes.value_or(15) * 60;
      if (ev_cfg.gamma_seconds < 1) throw ContractError("gamma must be at least one second");
      ev_cfg.criteria.clear();
      for (const auto& c : ev_criteria) ev_cfg.criteria.push_back(criterion_from_string(c));
      ev_cfg.multiplicity = multiplicity_from_string(ev_multiplicity);
      auto in = open_input(ev_interactions);
      const auto interactions = read_interactions_csv(in);
      std::vector<EvidenceDetail> details;
      const auto pairs = find_all_evidence(interactions, ev_cfg, ev_detail_out.empty() ? nullptr : &details);
      const fs::path target(ev_out);
      ArtifactSet out(target.parent_path().empty() ? fs::path(".") : target.parent_path());
      out.write(target.filename().string(), [&](std::ostream& o) { write_evidence_csv(o, pairs); });
      if (!ev_detail_out.empty()) {
        const fs::path d(ev_detail_out);
        ArtifactSet detail_out(d.parent_path().empty() ? fs::path(".") : d.parent_path());
        detail_out.write(d.filename().string(), [&](std::ostream& o) { write_evidence_detail_csv(o, details); });
        detail_out.commit();
      }
      out.commit();
      print_json({{"pairs", pairs.size()}});
    } else if (*lcn_cmd) {
      PipelineConfig check;
      check.input = "-";
      check.frame_windows = lcn_frame;
      check.alpha = lcn_alpha;
      check.validate();
      auto in = open_input(lcn_evidence);
      std::map<WindowIndex, Lcn> windows;
      const Lcn lcn = aggregate_evidence(read_evidence_csv(in), lcn_frame, lcn_alpha, &windows);
      const fs::path target(lcn_out);
      ArtifactSet out(target.parent_path().empty() ? fs::path(".") : target.parent_path());
      out.write(target.filename().string(), [&](std::ostream& o) { write_lcn_csv(o, lcn); });
      auto sibling = [&](const std::string& path, auto&& body) {
        const fs::path p(path);
        if (p.parent_path().empty() || fs::equivalent(fs::absolute(p.parent_path()), fs::absolute(out.dir()))) {
          out.write(p.filename().string(), body);
        } else {
          ArtifactSet other(p.parent_path());
          other.write(p.filename().string(), body);
          other.commit();
        }
      };
      if (!lcn_windows_out.empty())
        sibling(lcn_windows_out, [&](std::ostream& o) { write_window_summaries_csv(o, windows); });
      if (!lcn_graphml.empty()) sibling(lcn_graphml, [&](std::ostream& o) { write_lcn_graphml(o, lcn); });
      out.commit();
      const auto s = summarize(lcn);
      print_json({{"windows", windows.size()}, {"nodes", s.nodes}, {"edges", s.edges}, {"total_weight", s.total_weight}});
    } else if (*extract) {
      ExtractionParams params;
      params.method = extraction_method_from_string(ex_method);
      params.theta = ex_theta;
      params.threshold = ex_threshold;
      params.louvain_seed = seed_with_env(ex_seed, 0);
      for (const auto& w : ex_weights) {
        const auto eq = w.find('=');
        if (eq == std::string::npos) throw ContractError(fmt::format("--weight expects criterion=multiplier (got '{}')", w));
        const std::string name = w.substr(0, eq);
        criterion_from_string(name);
        try {
          params.criterion_weights[name] = std::stod(w.substr(eq + 1));
        } catch (const std::exception&) {
          throw ContractError(fmt::format("--weight expects a number after '=' (got '{}')", w));
        }
      }
      params.validate();
      auto in = open_input(ex_lcn);
      const auto hccs = extract_hccs(read_lcn_csv(in), params);
      ArtifactSet out(ex_out);
      out.write("hccs.csv", [&](std::ostream& o) { write_hccs_csv(o, hccs); });
      out.write("hcc_edges.csv", [&](std::ostream& o) { write_hcc_edges_csv(o, hccs); });
      out.write("hccs.graphml", [&](std::ostream& o) { write_hccs_graphml(o, hccs); });
      out.commit();
      std::size_t members = 0;
      for (const auto& h : hccs) members += h.members.size();
      print_json({{"hccs", hccs.size()}, {"members", members}});
    } else if (*report) {
      for (const auto& r : rp_runs) rp.runs.emplace_back(r);
      rp.cooccurrence_excluded.insert(rp_excluded.begin(), rp_excluded.end());
      if (rp_seed) rp.seed = rp_seed;
      else if (std::getenv("FINDHCCS_SEED")) rp.seed = seed_with_env(std::nullopt, 0);
      const auto files = run_report(rp_dir, rp);
      print_json({{"written", files}});
    } else if (*features) {
      std::optional<std::uint64_t> seed = ft_seed;
      if (!seed && std::getenv("FINDHCCS_SEED")) seed = seed_with_env(std::nullopt, 0);
      export_features(ft_dir, ft_out, seed);
    } else if (*synth) {
      SynthSpec spec;
      if (!sy_config.empty()) spec = synth_spec_from_json(load_config_file(sy_config));
      spec.seed = seed_with_env(sy_seed, spec.seed);
      spec.validate();
      const auto corpus = generate_corpus(spec);
      ArtifactSet out(sy_out);
      out.write("posts.jsonl", [&](std::ostream& o) { write_posts_jsonl(o, corpus.posts); });
      out.write("truth.csv", [&](std::ostream& o) { write_truth_csv(o, corpus.truth); });
      out.write_text("synth.json", to_json(spec).dump(2) + "\n");
      out.commit();
      print_json({{"posts", corpus.posts.size()}, {"planted_groups", corpus.truth.size()}});
    } else if (*score) {
      auto members = open_input(sc_hccs);
      const fs::path edges_path = fs::path(sc_hccs).parent_path() / "hcc_edges.csv";
      std::vector<Hcc> hccs;
      if (fs::exists(edges_path)) {
        auto edges = open_input(edges_path);
        hccs = read_hccs_csv(members, &edges);
      } else {
        hccs = read_hccs_csv(members);
      }
      auto truth_in = open_input(sc_truth);
      const auto report_json = to_json(score_recovery(hccs, read_truth_csv(truth_in)));
      if (!sc_out.empty()) {
        const fs::path p(sc_out);
        ArtifactSet out(p.parent_path().empty() ? fs::path(".") : p.parent_path());
        out.write_text(p.filename().string(), report_json.dump(2) + "\n");
        out.commit();
      }
      print_json(report_json);
    } else if (*run) {
      PipelineConfig cfg = pipeline_config_from_json(load_config_file(run_config));
      if (!run_out.empty()) cfg.output_dir = run_out;
      apply_env_overrides(cfg);
      // Relative input paths are resolved against the config file.
      if (!cfg.input.empty() && fs::path(cfg.input).is_relative() && !fs::exists(cfg.input)) {
        const fs::path beside = fs::path(run_config).parent_path() / cfg.input;
        if (fs::exists(beside)) cfg.input = beside.string();
      }
      cfg.validate();
      const auto summary = run_pipeline(cfg);
      nlohmann::json stages = nlohmann::json::array();
      for (const auto& s : summary.stages)
        stages.push_back({{"name", s.name}, {"counts", s.counts}, {"seconds", s.seconds}});
      print_json({{"output_dir", cfg.output_dir}, {"stages", stages}, {"total_seconds", summary.total_seconds}});
    } else if (*exporter) {
      const fs::path input(xg_input);
      const std::string header = read_header(input);
      const fs::path target(xg_out);
      ArtifactSet out(target.parent_path().empty() ? fs::path(".") : target.parent_path());
      const bool graphml = xg_format == "graphml";
      if (header == "node_a,node_b,criterion,weight") {
        auto in = open_input(input);
        const Lcn lcn = read_lcn_csv(in);
        out.write(target.filename().string(), [&](std::ostream& o) {
          if (graphml) write_lcn_graphml(o, lcn);
          else write_collapsed_csv(o, collapse_edges(lcn));
        });
      } else if (header == "hcc_id,account_id" || header == "hcc_id,node_a,node_b,weight") {
        const fs::path dir = input.parent_path();
        auto members = open_input(require_artifact(dir.empty() ? "." : dir, "hccs.csv", "extract"));
        auto edges = open_input(require_artifact(dir.empty() ? "." : dir, "hcc_edges.csv", "extract"));
        const auto hccs = read_hccs_csv(members, &edges);
        out.write(target.filename().string(), [&](std::ostream& o) {
          if (graphml) write_hccs_graphml(o, hccs);
          else write_hcc_edges_csv(o, hccs);
        });
      } else {
        throw ContractError(fmt::format("'{}' is not an LCN or HCC artifact (header '{}')", xg_input, header));
      }
      out.commit();
    }
  } catch (const ContractError& e) {
    std::cerr << "find-hccs: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "find-hccs: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
