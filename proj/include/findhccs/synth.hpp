#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "findhccs/extract.hpp"
#include "findhccs/types.hpp"

namespace findhccs {

enum class Strategy {
  Boost,    // co-retweet the same campaign posts
  Pollute,  // co-use the same campaign hashtags
  Bully,    // reply into the same victim's conversations, mentioning the victim
};

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct PlantedGroup {
  std::size_t size = 5;
  Strategy strategy = Strategy::Boost;
  int actions_per_window = 1;
  double adherence = 1.0;   // chance a member acts inside the shared window
  int active_windows = 24;  // windows in which the group acts
};

/// Synthetic corpus recipe. Background rate and repost share default to a
/// keyword-filtered election stream (0.31 posts/account/day, 54.5% reposts);
/// real collections range from 0.31 to 3.12 posts/account/day.
struct SynthSpec {
  std::uint64_t seed = 1;
  Timestamp start_epoch = 1577836800;  // 2020-01-01T00:00:00Z
  std::int64_t duration_minutes = 7 * 1440;
  std::int64_t gamma_minutes = 15;
  std::size_t background_accounts = 2000;
  double background_rate = 0.31;  // posts per account per day
  double repost_fraction = 0.545;
  std::size_t repost_pool = 5000;
  std::size_t hashtag_pool = 500;
  std::size_t url_pool = 1000;
  double zipf_exponent = 1.0;
  double planted_organic_rate = 0.0;  // planted members' own background posting, posts/day
  std::vector<PlantedGroup> planted;

  void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SynthSpec& spec);

struct SynthCorpus {
  std::vector<Post> posts;                      // ascending timestamp
  std::vector<std::vector<AccountId>> truth;    // planted groups, sorted members
};

/// Deterministic per seed.
SynthCorpus generate_corpus(const SynthSpec& spec);

void write_truth_csv(std::ostream& out, const std::vector<std::vector<AccountId>>& groups);
std::vector<std::vector<AccountId>> read_truth_csv(std::istream& in);

struct GroupMatch {
  int group_id = 0;
  int best_hcc = -1;  // -1 when nothing overlaps
  double jaccard = 0.0;
};

struct RecoveryReport {
  std::vector<GroupMatch> groups;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = false;  // false when nothing was detected
};

/// Matches every planted group to its best-Jaccard HCC; member-level
/// precision and recall over the union of detected and planted members.
RecoveryReport score_recovery(const std::vector<Hcc>& detected, const std::vector<std::vector<AccountId>>& truth);
nlohmann::json to_json(const RecoveryReport& report);

}  // namespace findhccs
