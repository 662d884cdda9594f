#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "findhccs/evidence.hpp"
#include "findhccs/extract.hpp"
#include "findhccs/ingest.hpp"
#include "findhccs/lcn.hpp"

namespace findhccs {

const std::vector<std::string>& report_kinds();

struct PipelineConfig {
  std::string input;
  InputFormat format = InputFormat::CanonicalJsonl;
  std::vector<Criterion> criteria{Criterion::CoRetweet};
  bool include_quotes_as_reposts = false;
  std::int64_t gamma_seconds = 15 * 60;
  Timestamp origin = 0;
  int frame_windows = 1;  // T
  double alpha = 0.0;     // decay off; only meaningful with T > 1
  ExtractionParams extraction;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool evidence_detail = false;
  bool per_window_hccs = false;
  Multiplicity multiplicity = Multiplicity::MinCount;
  unsigned workers = 0;  // 0 = all cores
  std::vector<std::string> reports;

  /// Throws ContractError naming the first violated contract.
  void validate() const;
};

/// Reads a config tree (TOML or JSON shaped). Unknown keys are rejected.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PipelineConfig& cfg);

/// FINDHCCS_SEED, when set, replaces the configured seed.
void apply_env_overrides(PipelineConfig& cfg);

/// Evidence for every configured criterion, sorted by window, pair, criterion.
std::vector<EvidencePair> find_all_evidence(const std::vector<Interaction>& interactions, const PipelineConfig& cfg,
                                            std::vector<EvidenceDetail>* details = nullptr);

/// Builds per-window LCNs and the (optionally decayed) aggregate.
Lcn aggregate_evidence(const std::vector<EvidencePair>& pairs, int frame_windows, double alpha,
                       std::map<WindowIndex, Lcn>* windows = nullptr);

void write_window_summaries_csv(std::ostream& out, const std::map<WindowIndex, Lcn>& windows);

struct StageRecord {
  std::string name;
  nlohmann::json counts;
  double seconds = 0.0;
};

struct RunSummary {
  std::vector<StageRecord> stages;
  double total_seconds = 0.0;
  std::vector<std::string> artifacts;
};

/// Runs parse, evidence, aggregate and extract, writing every artifact plus
/// manifest.json (config echo and counts) and timings.json (wall clock).
/// On failure the artifacts written so far are removed.
RunSummary run_pipeline(const PipelineConfig& cfg);

struct ReportOptions {
  std::vector<std::string> which;
  std::vector<std::filesystem::path> runs;  // more artifact dirs for membership
  std::int64_t timeline_bin_seconds = 86400;
  std::int64_t cooccurrence_min_weight = 1;
  std::set<std::string> cooccurrence_excluded;
  std::optional<std::uint64_t> seed;  // defaults to the run's seed
};

/// Writes metric files under <artifacts>/report/ and returns their names.
std::vector<std::string> run_report(const std::filesystem::path& artifacts, const ReportOptions& opts);

/// Feature vectors of every HCC member ("coordinating") and of a size-matched
/// random baseline ("unlabeled").
void export_features(const std::filesystem::path& artifacts, const std::filesystem::path& out,
                     std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace findhccs
