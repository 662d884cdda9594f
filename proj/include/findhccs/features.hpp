#pragma once

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "findhccs/extract.hpp"
#include "findhccs/ingest.hpp"
#include "findhccs/types.hpp"

namespace findhccs {

enum class ActivityNodeType { Account, Url, Hashtag };
enum class ActivityEdgeType { HashtagUse, UrlUse, Mention, Repost, Quote, Reply, InConversation };

std::string_view to_string(ActivityNodeType t);
std::string_view to_string(ActivityEdgeType t);

/// Typed multi-network of what an HCC's members did in the corpus.
struct ActivityNetwork {
  struct Edge {
    ActivityEdgeType type;
    std::string source;  // node id
    std::string target;  // node id
    Timestamp timestamp;
    PostId source_post_id;
  };
  std::map<std::string, ActivityNodeType> nodes;  // "account:x", "url:x", "hashtag:x"
  std::vector<Edge> edges;

  std::size_t count(ActivityNodeType t) const;
  std::size_t count(ActivityEdgeType t) const;
};

/// Corpus-wide lookups shared by every group.
struct CorpusIndex {
  explicit CorpusIndex(const std::vector<Post>& posts);

  const std::vector<Post>& posts;
  ConversationRoots roots;
  std::map<PostId, const Post*> by_id;
  std::map<AccountId, std::vector<const Post*>> by_author;  // timestamp order
  Timestamp first = 0;
  Timestamp last = 0;
  std::int64_t total_reposts = 0;
  std::int64_t total_mentions = 0;
  std::int64_t total_replies = 0;
  std::map<AccountId, std::int64_t> reposts_of;
  std::map<AccountId, std::int64_t> mentions_of;
  std::map<AccountId, std::int64_t> replies_to;

  double span_minutes() const;
};

ActivityNetwork build_activity_network(const std::vector<AccountId>& members, const CorpusIndex& corpus);

inline constexpr std::size_t kAccountFeatureCount = 13;
inline constexpr std::size_t kGroupFeatureCount = 17;

using AccountFeatures = std::array<double, kAccountFeatureCount>;
using GroupFeatures = std::array<double, kGroupFeatureCount>;

const std::array<std::string_view, kAccountFeatureCount>& account_feature_names();
const std::array<std::string_view, kGroupFeatureCount>& group_feature_names();

/// Account-level features; profile fields come from the account's first post.
AccountFeatures account_features(const AccountId& account, const CorpusIndex& corpus, double span_minutes);

/// Group-level features; the three proportions divide by corpus-wide totals.
GroupFeatures group_features(const std::vector<AccountId>& members, const ActivityNetwork& network,
                             const CorpusIndex& corpus);

struct LabelledGroup {
  std::string group_id;
  std::string label;  // "coordinating" or "unlabeled"
  std::vector<AccountId> members;
};

/// One row per member: account_id, group_id, label, 13 account columns, 17
/// group columns. Rows follow group order, then account id.
void export_feature_vectors(std::ostream& out, const std::vector<LabelledGroup>& groups, const CorpusIndex& corpus);

}  // namespace findhccs
