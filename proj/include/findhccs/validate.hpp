#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "findhccs/evidence.hpp"
#include "findhccs/extract.hpp"
#include "findhccs/lcn.hpp"
#include "findhccs/types.hpp"

namespace findhccs {

using AccountSet = std::set<AccountId>;

struct SimilarityMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;
};

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m);

enum class SetMeasure { Jaccard, Overlap };

/// Jaccard |X n Y| / |X u Y| (two empty sets: 1.0) or overlap
/// |X n Y| / min(|X|, |Y|) (throws DomainError when either set is empty).
double set_similarity(const AccountSet& x, const AccountSet& y, SetMeasure measure);

struct MembershipComparison {
  SimilarityMatrix similarity;
  std::vector<std::vector<std::size_t>> common;  // raw shared-member counts
};

MembershipComparison membership_similarity_matrix(const std::vector<std::pair<std::string, AccountSet>>& runs,
                                                  SetMeasure measure);

enum class RatioKind { RepostAuthor, Mention };

/// Internal retweet ratio (RepostAuthor) or internal mention ratio over the
/// posts authored by members; 0 when members produced none of that kind.
double internal_ratio(const AccountSet& members, const std::vector<Post>& posts, RatioKind kind);

enum class FeatureKind { Hashtag, UrlDomain, MentionedAccount, RetweetedAccount, RetweetedTweet };

std::string_view to_string(FeatureKind kind);
const std::vector<FeatureKind>& all_feature_kinds();

/// Shannon entropy in bits of the members' feature-value distribution;
/// nullopt when members never used the feature.
std::optional<double> feature_entropy(const AccountSet& members, const std::vector<Post>& posts, FeatureKind kind);

struct EntropyRow {
  std::string group_id;
  FeatureKind kind;
  double bits;
};

std::vector<EntropyRow> entropy_report(const std::vector<std::pair<std::string, AccountSet>>& groups,
                                       const std::vector<Post>& posts);
void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows);

/// Cosine similarity of 5-code-point n-gram count vectors, one document per
/// account (its posts' text in timestamp order, newline-joined). Labels are
/// grouped by HCC, larger HCCs first, members sorted within each block.
SimilarityMatrix content_similarity_matrix(const std::vector<Hcc>& hccs, const std::vector<Post>& posts);

/// Cosine similarity of the 5-gram vectors of two documents.
double ngram_cosine(std::string_view a, std::string_view b);

/// Groups drawn without replacement from the accounts outside every HCC, one
/// per HCC with matching size.
std::vector<std::vector<AccountId>> random_baseline(const std::vector<Hcc>& hccs, const AccountSet& all_accounts,
                                                    std::uint64_t seed);

/// Hashtags linked by the number of posts using both.
CollapsedGraph hashtag_cooccurrence(const std::vector<Post>& posts, std::int64_t min_edge_weight,
                                    const std::set<std::string>& excluded = {});

struct TimelineBin {
  Timestamp bin_start = 0;
  std::int64_t count = 0;

  bool operator==(const TimelineBin&) const = default;
};

/// Post counts of the group in epoch-aligned bins covering the corpus span.
std::vector<TimelineBin> activity_timeline(const AccountSet& group, const std::vector<Post>& posts,
                                           std::int64_t bin_seconds);

struct ReasonNetwork {
  struct Node {
    std::string id;
    std::string type;  // "account" or "reason"
    std::string label;
    int hcc_id = -1;   // accounts only
    std::string criterion;  // reasons only
  };
  struct Edge {
    std::string source;
    std::string target;
    std::string type;  // "coordinates-with" or "caused-by"
    double weight = 0.0;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

/// Two-level account-reason network. Requires per-target evidence; passing
/// nullopt (detail not retained) throws ContractError.
ReasonNetwork account_reason_network(const std::vector<Hcc>& hccs,
                                     const std::optional<std::vector<EvidenceDetail>>& details);

}  // namespace findhccs
