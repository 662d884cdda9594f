#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "findhccs/types.hpp"

namespace findhccs {

using WindowIndex = std::int64_t;

/// Discrete, half-open time windows [origin + i*length, origin + (i+1)*length).
struct WindowConfig {
  std::int64_t length_seconds = 15 * 60;
  Timestamp origin = 0;

  static WindowConfig minutes(std::int64_t gamma_minutes, Timestamp origin = 0);
  static WindowConfig seconds(std::int64_t gamma_seconds, Timestamp origin = 0);
};

WindowIndex assign_window(Timestamp timestamp, const WindowConfig& cfg);
Timestamp window_start(WindowIndex index, const WindowConfig& cfg);

enum class Criterion { CoRetweet, CoHashtag, CoUrl, CoDomain, CoMention, CoConv };

std::string_view to_string(Criterion c);
Criterion criterion_from_string(std::string_view name);
InteractionKind consumed_kind(Criterion c);

struct CriterionSpec {
  Criterion criterion = Criterion::CoRetweet;
  bool include_quotes_as_reposts = false;  // co-retweet only
};

/// How repeated use of one target by the same account inside one window counts.
enum class Multiplicity {
  MinCount,  // a pair sharing a target adds min(count_a, count_b)
  Binary,    // a pair sharing a target adds 1
};

Multiplicity multiplicity_from_string(std::string_view name);
std::string_view to_string(Multiplicity m);

struct EvidencePair {
  AccountId account_a;  // account_a < account_b
  AccountId account_b;
  std::string criterion;
  WindowIndex window_index = 0;
  std::int64_t weight = 0;

  bool operator==(const EvidencePair&) const = default;
};

/// Evidence kept per shared target, needed for account-reason networks.
struct EvidenceDetail {
  AccountId account_a;
  AccountId account_b;
  std::string criterion;
  WindowIndex window_index = 0;
  std::string target;
  std::int64_t weight = 0;

  bool operator==(const EvidenceDetail&) const = default;
};

std::vector<Interaction> filter_interactions(const std::vector<Interaction>& interactions, const CriterionSpec& spec);

struct EvidenceOptions {
  Multiplicity multiplicity = Multiplicity::MinCount;
  unsigned workers = 1;  // 0 = hardware concurrency
};

/// Pairwise coordination evidence, summed per (pair, window) and sorted by
/// (window, account_a, account_b). Output does not depend on worker count.
std::vector<EvidencePair> find_coordination(const std::vector<Interaction>& filtered, const CriterionSpec& spec,
                                            const WindowConfig& cfg, const EvidenceOptions& opts = {});

/// Same coincidences as find_coordination, one record per shared target,
/// sorted by (window, account_a, account_b, target).
std::vector<EvidenceDetail> find_coordination_detailed(const std::vector<Interaction>& filtered,
                                                       const CriterionSpec& spec, const WindowConfig& cfg,
                                                       const EvidenceOptions& opts = {});

void write_evidence_csv(std::ostream& out, const std::vector<EvidencePair>& pairs);
std::vector<EvidencePair> read_evidence_csv(std::istream& in);

void write_evidence_detail_csv(std::ostream& out, const std::vector<EvidenceDetail>& details);
std::vector<EvidenceDetail> read_evidence_detail_csv(std::istream& in);

}  // namespace findhccs
