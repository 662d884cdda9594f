#include "findhccs/pipeline.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "findhccs/artifacts.hpp"
#include "findhccs/csv.hpp"
#include "findhccs/features.hpp"
#include "findhccs/graphml.hpp"
#include "findhccs/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace findhccs {

const std::vector<std::string>& report_kinds() {
  static const std::vector<std::string> kinds{"membership", "irr-imr",  "entropy",   "content-sim",
                                              "cooccurrence", "timeline", "reason-net"};
  return kinds;
}

void PipelineConfig::validate() const {
  if (input.empty()) throw ContractError("config: 'input' is required");
  if (criteria.empty()) throw ContractError("config: at least one criterion is required");
  if (gamma_seconds < 1) throw ContractError(fmt::format("gamma must be at least one second (got {} s)", gamma_seconds));
  if (frame_windows < 1) throw ContractError(fmt::format("frame_windows T must be >= 1 (got {})", frame_windows));
  if (frame_windows == 1) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError(fmt::format("alpha must lie in [0, 1] (got {})", alpha));
  } else if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ContractError(fmt::format("alpha must satisfy α∈(0,1] when T > 1 (got {})", alpha));
  }
  extraction.validate();
  if (output_dir.empty()) throw ContractError("config: 'output_dir' must not be empty");
  for (const auto& r : reports)
    if (std::find(report_kinds().begin(), report_kinds().end(), r) == report_kinds().end())
      throw ContractError(fmt::format("unknown report '{}'", r));
  if (std::find(reports.begin(), reports.end(), "reason-net") != reports.end() && !evidence_detail)
    throw ContractError("report 'reason-net' needs evidence_detail = true");
}

namespace {

template <typename T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ContractError(fmt::format("config: '{}' has the wrong type", key));
  }
}

std::vector<std::string> string_list(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return get<std::vector<std::string>>(doc, key);
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& doc) {
  static const std::set<std::string> known{
      "input",  "format",   "criteria",         "criterion",       "include_quotes_as_reposts",
      "gamma_minutes", "gamma_seconds", "origin", "frame_windows", "alpha",
      "method", "theta",    "threshold",        "seed",            "output_dir",
      "evidence_detail", "per_window_hccs", "multiplicity", "workers", "criterion_weights",
      "reports"};
  if (!doc.is_object()) throw ContractError("config must be a table/object");
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw ContractError(fmt::format("config: unknown key '{}'", key));

  PipelineConfig cfg;
  if (doc.contains("input")) cfg.input = get<std::string>(doc, "input");
  if (doc.contains("format")) cfg.format = input_format_from_string(get<std::string>(doc, "format"));
  if (doc.contains("criteria") && doc.contains("criterion"))
    throw ContractError("config: give either 'criteria' or 'criterion', not both");
  for (const char* key : {"criteria", "criterion"}) {
    if (!doc.contains(key)) continue;
    cfg.criteria.clear();
    for (const auto& name : string_list(doc, key)) {
      const Criterion c = criterion_from_string(name);
      if (std::find(cfg.criteria.begin(), cfg.criteria.end(), c) == cfg.criteria.end()) cfg.criteria.push_back(c);
    }
  }
  if (doc.contains("include_quotes_as_reposts"))
    cfg.include_quotes_as_reposts = get<bool>(doc, "include_quotes_as_reposts");
  if (doc.contains("gamma_minutes") && doc.contains("gamma_seconds"))
    throw ContractError("config: give either 'gamma_minutes' or 'gamma_seconds', not both");
  if (doc.contains("gamma_minutes")) cfg.gamma_seconds = get<std::int64_t>(doc, "gamma_minutes") * 60;
  if (doc.contains("gamma_seconds")) cfg.gamma_seconds = get<std::int64_t>(doc, "gamma_seconds");
  if (doc.contains("origin")) cfg.origin = get<Timestamp>(doc, "origin");
  if (doc.contains("frame_windows")) cfg.frame_windows = get<int>(doc, "frame_windows");
  if (doc.contains("alpha")) cfg.alpha = get<double>(doc, "alpha");
  if (doc.contains("method")) cfg.extraction.method = extraction_method_from_string(get<std::string>(doc, "method"));
  if (doc.contains("theta")) cfg.extraction.theta = get<double>(doc, "theta");
  if (doc.contains("threshold")) cfg.extraction.threshold = get<double>(doc, "threshold");
  if (doc.contains("seed")) cfg.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("output_dir")) cfg.output_dir = get<std::string>(doc, "output_dir");
  if (doc.contains("evidence_detail")) cfg.evidence_detail = get<bool>(doc, "evidence_detail");
  if (doc.contains("per_window_hccs")) cfg.per_window_hccs = get<bool>(doc, "per_window_hccs");
  if (doc.contains("multiplicity")) cfg.multiplicity = multiplicity_from_string(get<std::string>(doc, "multiplicity"));
  if (doc.contains("workers")) cfg.workers = get<unsigned>(doc, "workers");
  if (doc.contains("criterion_weights")) {
    for (const auto& [name, w] : doc.at("criterion_weights").items()) {
      criterion_from_string(name);
      if (!w.is_number()) throw ContractError(fmt::format("config: criterion weight '{}' must be a number", name));
      cfg.extraction.criterion_weights[name] = w.get<double>();
    }
  }
  if (doc.contains("reports")) cfg.reports = string_list(doc, "reports");
  cfg.extraction.louvain_seed = cfg.seed;
  return cfg;
}

json to_json(const PipelineConfig& cfg) {
  json criteria = json::array();
  for (auto c : cfg.criteria) criteria.push_back(std::string(to_string(c)));
  json weights = json::object();
  for (const auto& [c, w] : cfg.extraction.criterion_weights) weights[c] = w;
  // workers is left out: outputs do not depend on it.
  return {{"input", cfg.input},
          {"format", std::string(to_string(cfg.format))},
          {"criteria", criteria},
          {"include_quotes_as_reposts", cfg.include_quotes_as_reposts},
          {"gamma_seconds", cfg.gamma_seconds},
          {"origin", cfg.origin},
          {"frame_windows", cfg.frame_windows},
          {"alpha", cfg.alpha},
          {"method", std::string(to_string(cfg.extraction.method))},
          {"theta", cfg.extraction.theta},
          {"threshold", cfg.extraction.threshold},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir},
          {"evidence_detail", cfg.evidence_detail},
          {"per_window_hccs", cfg.per_window_hccs},
          {"multiplicity", std::string(to_string(cfg.multiplicity))},
          {"criterion_weights", weights},
          {"reports", cfg.reports}};
}

void apply_env_overrides(PipelineConfig& cfg) {
  const char* env = std::getenv("FINDHCCS_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-')
    throw ContractError(fmt::format("FINDHCCS_SEED must be a non-negative integer (got '{}')", env));
  cfg.seed = v;
  cfg.extraction.louvain_seed = v;
}

std::vector<EvidencePair> find_all_evidence(const std::vector<Interaction>& interactions, const PipelineConfig& cfg,
                                            std::vector<EvidenceDetail>* details) {
  const WindowConfig window = WindowConfig::seconds(cfg.gamma_seconds, cfg.origin);
  const EvidenceOptions opts{cfg.multiplicity, cfg.workers};
  std::vector<EvidencePair> pairs;
  for (Criterion c : cfg.criteria) {
    const CriterionSpec spec{c, cfg.include_quotes_as_reposts};
    const auto filtered = filter_interactions(interactions, spec);
    auto found = find_coordination(filtered, spec, window, opts);
    pairs.insert(pairs.end(), found.begin(), found.end());
    if (details) {
      auto d = find_coordination_detailed(filtered, spec, window, opts);
      details->insert(details->end(), d.begin(), d.end());
    }
  }
  auto key = [](const auto& p) { return std::tie(p.window_index, p.account_a, p.account_b, p.criterion); };
  std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
  if (details)
    std::sort(details->begin(), details->end(), [](const EvidenceDetail& x, const EvidenceDetail& y) {
      return std::tie(x.window_index, x.account_a, x.account_b, x.criterion, x.target) <
             std::tie(y.window_index, y.account_a, y.account_b, y.criterion, y.target);
    });
  return pairs;
}

Lcn aggregate_evidence(const std::vector<EvidencePair>& pairs, int frame_windows, double alpha,
                       std::map<WindowIndex, Lcn>* windows) {
  auto per_window = build_window_lcns(pairs);
  Lcn out = decayed_aggregate(per_window, frame_windows, alpha);
  if (windows) *windows = std::move(per_window);
  return out;
}

void write_window_summaries_csv(std::ostream& out, const std::map<WindowIndex, Lcn>& windows) {
  csv::write_row(out, {"window_index", "nodes", "edges", "total_weight"});
  for (const auto& [w, lcn] : windows) {
    const auto s = summarize(lcn);
    csv::write_row(out, {std::to_string(w), std::to_string(s.nodes), std::to_string(s.edges),
                         csv::format_number(s.total_weight)});
  }
}

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer() : start_(Clock::now()), lap_(start_) {}
  double lap() {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - lap_).count();
    lap_ = now;
    return s;
  }
  double total() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_, lap_;
};

std::size_t member_count(const std::vector<Hcc>& hccs) {
  std::size_t n = 0;
  for (const auto& h : hccs) n += h.members.size();
  return n;
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  StageTimer timer;
  RunSummary summary;
  ArtifactSet out(cfg.output_dir);

  // parse
  const ParseResult parsed = parse_posts_file(cfg.input, cfg.format);
  const auto roots = resolve_conversations(parsed.posts);
  const auto interactions = extract_interactions(parsed.posts, roots);
  out.write("posts.jsonl", [&](std::ostream& o) { write_posts_jsonl(o, parsed.posts); });
  out.write("interactions.csv", [&](std::ostream& o) { write_interactions_csv(o, interactions); });
  summary.stages.push_back({"parse",
                            {{"posts", parsed.posts.size()},
                             {"skipped", parsed.skipped},
                             {"interactions", interactions.size()}},
                            timer.lap()});

  // evidence
  std::vector<EvidenceDetail> details;
  const auto pairs = find_all_evidence(interactions, cfg, cfg.evidence_detail ? &details : nullptr);
  out.write("evidence.csv", [&](std::ostream& o) { write_evidence_csv(o, pairs); });
  if (cfg.evidence_detail)
    out.write("evidence_detail.csv", [&](std::ostream& o) { write_evidence_detail_csv(o, details); });
  {
    json counts{{"pairs", pairs.size()}};
    if (cfg.evidence_detail) counts["detail_records"] = details.size();
    summary.stages.push_back({"evidence", counts, timer.lap()});
  }

  // aggregate
  std::map<WindowIndex, Lcn> windows;
  const Lcn lcn = aggregate_evidence(pairs, cfg.frame_windows, cfg.alpha, &windows);
  out.write("windows.csv", [&](std::ostream& o) { write_window_summaries_csv(o, windows); });
  out.write("lcn.csv", [&](std::ostream& o) { write_lcn_csv(o, lcn); });
  out.write("lcn.graphml", [&](std::ostream& o) { write_lcn_graphml(o, lcn); });
  const auto lcn_summary = summarize(lcn);
  summary.stages.push_back({"aggregate",
                            {{"windows", windows.size()},
                             {"nodes", lcn_summary.nodes},
                             {"edges", lcn_summary.edges},
                             {"total_weight", lcn_summary.total_weight}},
                            timer.lap()});

  // extract
  const auto hccs = extract_hccs(lcn, cfg.extraction);
  out.write("hccs.csv", [&](std::ostream& o) { write_hccs_csv(o, hccs); });
  out.write("hcc_edges.csv", [&](std::ostream& o) { write_hcc_edges_csv(o, hccs); });
  out.write("hccs.graphml", [&](std::ostream& o) { write_hccs_graphml(o, hccs); });
  json extract_counts{{"hccs", hccs.size()}, {"members", member_count(hccs)}};
  if (cfg.per_window_hccs) {
    std::size_t total = 0;
    out.write("hccs_per_window.csv", [&](std::ostream& o) {
      csv::write_row(o, {"window_index", "hcc_id", "account_id"});
      for (const auto& [w, window_lcn] : windows) {
        const auto found = extract_hccs(window_lcn, cfg.extraction);
        total += found.size();
        for (const auto& h : found)
          for (const auto& m : h.members) csv::write_row(o, {std::to_string(w), std::to_string(h.id), m});
      }
    });
    extract_counts["per_window_hccs"] = total;
  }
  summary.stages.push_back({"extract", extract_counts, timer.lap()});

  if (!cfg.reports.empty()) {
    ReportOptions ropts;
    ropts.which = cfg.reports;
    ropts.seed = cfg.seed;
    const auto files = run_report(out.dir(), ropts);
    summary.stages.push_back({"report", {{"files", files.size()}}, timer.lap()});
    for (const auto& f : files) summary.artifacts.push_back("report/" + f);
  }

  json stages = json::array();
  for (const auto& s : summary.stages) stages.push_back({{"name", s.name}, {"counts", s.counts}});
  summary.artifacts.insert(summary.artifacts.begin(), out.written().begin(), out.written().end());
  summary.artifacts.push_back("manifest.json");
  summary.artifacts.push_back("timings.json");
  std::sort(summary.artifacts.begin(), summary.artifacts.end());
  // output_dir is where the manifest lives; echoing it would make reruns elsewhere differ.
  json echo = to_json(cfg);
  echo.erase("output_dir");
  const json manifest{{"config", echo}, {"stages", stages}, {"artifacts", summary.artifacts}};
  out.write_text("manifest.json", manifest.dump(2) + "\n");
  summary.stages.push_back({"manifest", json::object(), timer.lap()});

  summary.total_seconds = timer.total();
  json timing_rows = json::array();
  double cumulative = 0.0;
  for (const auto& s : summary.stages) {
    cumulative += s.seconds;
    timing_rows.push_back({{"name", s.name}, {"seconds", s.seconds}, {"cumulative_seconds", cumulative}});
  }
  const json timings{{"stages", timing_rows}, {"total_seconds", summary.total_seconds}};
  out.write_text("timings.json", timings.dump(2) + "\n");
  out.commit();
  return summary;
}

namespace {

struct RunArtifacts {
  std::vector<Post> posts;
  std::vector<Hcc> hccs;
  json manifest;
};

std::vector<Post> load_posts(const fs::path& dir) {
  return parse_posts_file(require_artifact(dir, "posts.jsonl", "parse").string(), InputFormat::CanonicalJsonl).posts;
}

std::vector<Hcc> load_hccs(const fs::path& dir) {
  auto members = open_input(require_artifact(dir, "hccs.csv", "extract"));
  if (fs::exists(dir / "hcc_edges.csv")) {
    auto edges = open_input(dir / "hcc_edges.csv");
    return read_hccs_csv(members, &edges);
  }
  return read_hccs_csv(members);
}

json load_manifest(const fs::path& dir) {
  const fs::path p = dir / "manifest.json";
  if (!fs::exists(p)) return json::object();
  auto in = open_input(p);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(fmt::format("unreadable manifest '{}': {}", p.string(), e.what()));
  }
}

std::uint64_t resolve_seed(const json& manifest, std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  if (manifest.contains("config") && manifest["config"].contains("seed")) return manifest["config"]["seed"].get<std::uint64_t>();
  return 0;
}

AccountSet members_of(const Hcc& h) { return AccountSet(h.members.begin(), h.members.end()); }

AccountSet all_authors(const std::vector<Post>& posts) {
  AccountSet out;
  for (const auto& p : posts) out.insert(p.author_id);
  return out;
}

std::vector<std::pair<std::string, AccountSet>> labelled(const std::vector<Hcc>& hccs) {
  std::vector<std::pair<std::string, AccountSet>> out;
  for (const auto& h : hccs) out.emplace_back(std::to_string(h.id), members_of(h));
  return out;
}

}  // namespace

std::vector<std::string> run_report(const fs::path& artifacts, const ReportOptions& opts) {
  for (const auto& r : opts.which)
    if (std::find(report_kinds().begin(), report_kinds().end(), r) == report_kinds().end())
      throw ContractError(fmt::format("unknown report '{}'", r));
  if (opts.timeline_bin_seconds < 1) throw ContractError("timeline bin must be at least one second");
  auto wants = [&](const char* k) { return std::find(opts.which.begin(), opts.which.end(), k) != opts.which.end(); };

  const json manifest = load_manifest(artifacts);
  const auto hccs = load_hccs(artifacts);
  std::optional<std::vector<Post>> posts_cache;
  auto posts = [&]() -> const std::vector<Post>& {
    if (!posts_cache) posts_cache = load_posts(artifacts);
    return *posts_cache;
  };
  const std::uint64_t seed = resolve_seed(manifest, opts.seed);

  ArtifactSet out(artifacts / "report");
  if (wants("membership")) {
    std::vector<std::pair<std::string, AccountSet>> runs;
    std::vector<fs::path> dirs{artifacts};
    dirs.insert(dirs.end(), opts.runs.begin(), opts.runs.end());
    for (const auto& d : dirs) {
      AccountSet all;
      for (const auto& h : load_hccs(d)) all.insert(h.members.begin(), h.members.end());
      std::string label = fs::weakly_canonical(d).filename().string();
      for (const auto& r : runs)
        if (r.first == label) label = d.string();
      runs.emplace_back(label, std::move(all));
    }
    if (runs.size() < 2) throw ContractError("membership report needs at least one more run (--runs)");
    const auto jac = membership_similarity_matrix(runs, SetMeasure::Jaccard);
    const auto ovl = membership_similarity_matrix(runs, SetMeasure::Overlap);
    out.write("membership_jaccard.csv", [&](std::ostream& o) { write_matrix_csv(o, jac.similarity); });
    out.write("membership_overlap.csv", [&](std::ostream& o) { write_matrix_csv(o, ovl.similarity); });
    out.write("membership_common.csv", [&](std::ostream& o) {
      csv::Row header{"label"};
      for (const auto& r : runs) header.push_back(r.first);
      csv::write_row(o, header);
      for (std::size_t i = 0; i < runs.size(); ++i) {
        csv::Row row{runs[i].first};
        for (auto n : jac.common[i]) row.push_back(std::to_string(n));
        csv::write_row(o, row);
      }
    });
  }
  if (wants("irr-imr")) {
    out.write("irr_imr.csv", [&](std::ostream& o) {
      csv::write_row(o, {"hcc_id", "members", "irr", "imr"});
      for (const auto& h : hccs) {
        const auto m = members_of(h);
        csv::write_row(o, {std::to_string(h.id), std::to_string(m.size()),
                           csv::format_number(internal_ratio(m, posts(), RatioKind::RepostAuthor)),
                           csv::format_number(internal_ratio(m, posts(), RatioKind::Mention))});
      }
    });
  }
  if (wants("entropy")) {
    out.write("entropy.csv", [&](std::ostream& o) { write_entropy_csv(o, entropy_report(labelled(hccs), posts())); });
    const auto baseline = random_baseline(hccs, all_authors(posts()), seed);
    std::vector<std::pair<std::string, AccountSet>> groups;
    for (std::size_t i = 0; i < baseline.size(); ++i)
      groups.emplace_back(fmt::format("random-{}", i), AccountSet(baseline[i].begin(), baseline[i].end()));
    out.write("entropy_random.csv", [&](std::ostream& o) { write_entropy_csv(o, entropy_report(groups, posts())); });
  }
  if (wants("content-sim")) {
    const auto m = content_similarity_matrix(hccs, posts());
    out.write("content_similarity.csv", [&](std::ostream& o) { write_matrix_csv(o, m); });
  }
  if (wants("cooccurrence")) {
    AccountSet members;
    for (const auto& h : hccs) members.insert(h.members.begin(), h.members.end());
    std::vector<Post> member_posts;
    for (const auto& p : posts())
      if (members.count(p.author_id)) member_posts.push_back(p);
    const auto g = hashtag_cooccurrence(member_posts, opts.cooccurrence_min_weight, opts.cooccurrence_excluded);
    out.write("hashtag_cooccurrence.graphml", [&](std::ostream& o) { write_collapsed_graphml(o, g); });
  }
  if (wants("timeline")) {
    out.write("timeline.csv", [&](std::ostream& o) {
      csv::write_row(o, {"hcc_id", "bin_start_epoch", "count"});
      for (const auto& h : hccs)
        for (const auto& b : activity_timeline(members_of(h), posts(), opts.timeline_bin_seconds))
          csv::write_row(o, {std::to_string(h.id), std::to_string(b.bin_start), std::to_string(b.count)});
    });
  }
  if (wants("reason-net")) {
    std::optional<std::vector<EvidenceDetail>> details;
    if (fs::exists(artifacts / "evidence_detail.csv")) {
      auto in = open_input(artifacts / "evidence_detail.csv");
      details = read_evidence_detail_csv(in);
    }
    const auto net = account_reason_network(hccs, details);
    out.write("reason_network.graphml", [&](std::ostream& o) { write_reason_graphml(o, net); });
  }
  out.commit();
  return out.written();
}

void export_features(const fs::path& artifacts, const fs::path& out_path, std::optional<std::uint64_t> seed) {
  const auto hccs = load_hccs(artifacts);
  const auto posts = load_posts(artifacts);
  const auto baseline = random_baseline(hccs, all_authors(posts), resolve_seed(load_manifest(artifacts), seed));
  std::vector<LabelledGroup> groups;
  for (const auto& h : hccs) groups.push_back({fmt::format("hcc-{}", h.id), "coordinating", h.members});
  for (std::size_t i = 0; i < baseline.size(); ++i) groups.push_back({fmt::format("random-{}", i), "unlabeled", baseline[i]});
  const CorpusIndex index(posts);
  fs::path dir = out_path.parent_path();
  if (dir.empty()) dir = ".";
  ArtifactSet out(dir);
  out.write(out_path.filename().string(), [&](std::ostream& o) { export_feature_vectors(o, groups, index); });
  out.commit();
}

}  // namespace findhccs
