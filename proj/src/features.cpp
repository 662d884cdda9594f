#include "findhccs/features.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "findhccs/csv.hpp"

namespace findhccs {

std::string_view to_string(ActivityNodeType t) {
  switch (t) {
    case ActivityNodeType::Account: return "account";
    case ActivityNodeType::Url: return "url";
    case ActivityNodeType::Hashtag: return "hashtag";
  }
  return "?";
}

std::string_view to_string(ActivityEdgeType t) {
  switch (t) {
    case ActivityEdgeType::HashtagUse: return "hashtag-use";
    case ActivityEdgeType::UrlUse: return "url-use";
    case ActivityEdgeType::Mention: return "mention";
    case ActivityEdgeType::Repost: return "repost";
    case ActivityEdgeType::Quote: return "quote";
    case ActivityEdgeType::Reply: return "reply";
    case ActivityEdgeType::InConversation: return "in-conversation";
  }
  return "?";
}

std::size_t ActivityNetwork::count(ActivityNodeType t) const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [t](const auto& n) { return n.second == t; }));
}

std::size_t ActivityNetwork::count(ActivityEdgeType t) const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [t](const Edge& e) { return e.type == t; }));
}

CorpusIndex::CorpusIndex(const std::vector<Post>& corpus) : posts(corpus), roots(resolve_conversations(corpus)) {
  if (!posts.empty()) {
    first = last = posts.front().timestamp;
  }
  for (const auto& p : posts) {
    first = std::min(first, p.timestamp);
    last = std::max(last, p.timestamp);
    by_id.emplace(p.post_id, &p);
    by_author[p.author_id].push_back(&p);
    if (p.reposted_post_id) {
      ++total_reposts;
      if (p.reposted_author_id) ++reposts_of[*p.reposted_author_id];
    }
    total_mentions += static_cast<std::int64_t>(p.mentioned_ids.size());
    for (const auto& m : p.mentioned_ids) ++mentions_of[m];
    if (p.replied_post_id) {
      ++total_replies;
      if (p.replied_author_id) ++replies_to[*p.replied_author_id];
    }
  }
  for (auto& [author, list] : by_author)
    std::stable_sort(list.begin(), list.end(), [](const Post* a, const Post* b) { return a->timestamp < b->timestamp; });
}

double CorpusIndex::span_minutes() const { return static_cast<double>(last - first) / 60.0; }

ActivityNetwork build_activity_network(const std::vector<AccountId>& members, const CorpusIndex& corpus) {
  ActivityNetwork net;
  auto account = [&](const std::string& id) {
    std::string key = "account:" + id;
    net.nodes.emplace(key, ActivityNodeType::Account);
    return key;
  };
  for (const auto& m : members) account(m);
  for (const auto& m : members) {
    auto it = corpus.by_author.find(m);
    if (it == corpus.by_author.end()) continue;
    const std::string self = "account:" + m;
    for (const Post* p : it->second) {
      auto edge = [&](ActivityEdgeType type, std::string target) {
        net.edges.push_back({type, self, std::move(target), p->timestamp, p->post_id});
      };
      for (const auto& h : p->hashtags) {
        std::string key = "hashtag:" + h;
        net.nodes.emplace(key, ActivityNodeType::Hashtag);
        edge(ActivityEdgeType::HashtagUse, key);
      }
      for (const auto& u : p->urls) {
        std::string key = "url:" + u;
        net.nodes.emplace(key, ActivityNodeType::Url);
        edge(ActivityEdgeType::UrlUse, key);
      }
      for (const auto& mention : p->mentioned_ids) edge(ActivityEdgeType::Mention, account(mention));
      if (p->reposted_post_id && p->reposted_author_id) edge(ActivityEdgeType::Repost, account(*p->reposted_author_id));
      if (p->quoted_post_id && p->quoted_author_id) edge(ActivityEdgeType::Quote, account(*p->quoted_author_id));
      if (p->replied_post_id) {
        if (p->replied_author_id) edge(ActivityEdgeType::Reply, account(*p->replied_author_id));
        // In conversation only when the tree is rooted at a post in the corpus.
        auto root = corpus.roots.find(p->post_id);
        if (root != corpus.roots.end()) {
          auto root_post = corpus.by_id.find(root->second);
          if (root_post != corpus.by_id.end() && root_post->second != p)
            edge(ActivityEdgeType::InConversation, account(root_post->second->author_id));
        }
      }
    }
  }
  return net;
}

const std::array<std::string_view, kAccountFeatureCount>& account_feature_names() {
  static const std::array<std::string_view, kAccountFeatureCount> names = {
      "post_count",      "repost_count",    "reply_count",      "posting_rate",
      "unique_mentions", "mention_count",   "unique_hashtags",  "hashtag_uses",
      "unique_urls",     "url_uses",        "default_profile_image",
      "profile_description_length",         "profile_url_length"};
  return names;
}

const std::array<std::string_view, kGroupFeatureCount>& group_feature_names() {
  static const std::array<std::string_view, kGroupFeatureCount> names = {
      "group_post_count",        "group_member_count",         "group_interaction_count",
      "group_user_count",        "group_author_count",         "group_unique_hashtags",
      "group_hashtag_uses",      "group_unique_urls",          "group_url_uses",
      "group_repost_count",      "group_quote_count",          "group_mention_count",
      "group_reply_count",       "group_in_conversation_count", "group_reposted_proportion",
      "group_mentioned_proportion", "group_replied_proportion"};
  return names;
}

namespace {

double code_points(const std::string& s) {
  return static_cast<double>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xc0) != 0x80; }));
}

double proportion(std::int64_t part, std::int64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(total);
}

}  // namespace

AccountFeatures account_features(const AccountId& account, const CorpusIndex& corpus, double span_minutes) {
  if (!(span_minutes > 0.0))
    throw ContractError(fmt::format("collection span must be positive to compute posting rate (got {} minutes)", span_minutes));
  AccountFeatures f{};
  auto it = corpus.by_author.find(account);
  if (it == corpus.by_author.end()) return f;
  const auto& posts = it->second;
  std::set<std::string> mentions, hashtags, urls;
  double mention_uses = 0, hashtag_uses = 0, url_uses = 0, reposts = 0, replies = 0;
  for (const Post* p : posts) {
    if (p->reposted_post_id) ++reposts;
    if (p->replied_post_id) ++replies;
    mentions.insert(p->mentioned_ids.begin(), p->mentioned_ids.end());
    hashtags.insert(p->hashtags.begin(), p->hashtags.end());
    urls.insert(p->urls.begin(), p->urls.end());
    mention_uses += static_cast<double>(p->mentioned_ids.size());
    hashtag_uses += static_cast<double>(p->hashtags.size());
    url_uses += static_cast<double>(p->urls.size());
  }
  const Post& first = *posts.front();
  f[0] = static_cast<double>(posts.size());
  f[1] = reposts;
  f[2] = replies;
  f[3] = static_cast<double>(posts.size()) / span_minutes;
  f[4] = static_cast<double>(mentions.size());
  f[5] = mention_uses;
  f[6] = static_cast<double>(hashtags.size());
  f[7] = hashtag_uses;
  f[8] = static_cast<double>(urls.size());
  f[9] = url_uses;
  f[10] = first.profile_default_image.value_or(false) ? 1.0 : 0.0;
  f[11] = first.profile_description ? code_points(*first.profile_description) : 0.0;
  f[12] = first.profile_url ? code_points(*first.profile_url) : 0.0;
  return f;
}

GroupFeatures group_features(const std::vector<AccountId>& members, const ActivityNetwork& network,
                             const CorpusIndex& corpus) {
  GroupFeatures g{};
  double posts = 0, authors = 0, reposts = 0, quotes = 0;
  std::int64_t reposted = 0, mentioned = 0, replied = 0;
  for (const auto& m : members) {
    if (auto it = corpus.by_author.find(m); it != corpus.by_author.end()) {
      posts += static_cast<double>(it->second.size());
      if (!it->second.empty()) ++authors;
      for (const Post* p : it->second) {
        if (p->reposted_post_id) ++reposts;
        if (p->quoted_post_id) ++quotes;
      }
    }
    if (auto it = corpus.reposts_of.find(m); it != corpus.reposts_of.end()) reposted += it->second;
    if (auto it = corpus.mentions_of.find(m); it != corpus.mentions_of.end()) mentioned += it->second;
    if (auto it = corpus.replies_to.find(m); it != corpus.replies_to.end()) replied += it->second;
  }
  g[0] = posts;
  g[1] = static_cast<double>(members.size());
  g[2] = static_cast<double>(network.edges.size());
  g[3] = static_cast<double>(network.count(ActivityNodeType::Account));
  g[4] = authors;
  g[5] = static_cast<double>(network.count(ActivityNodeType::Hashtag));
  g[6] = static_cast<double>(network.count(ActivityEdgeType::HashtagUse));
  g[7] = static_cast<double>(network.count(ActivityNodeType::Url));
  g[8] = static_cast<double>(network.count(ActivityEdgeType::UrlUse));
  g[9] = reposts;
  g[10] = quotes;
  g[11] = static_cast<double>(network.count(ActivityEdgeType::Mention));
  g[12] = static_cast<double>(network.count(ActivityEdgeType::Reply));
  g[13] = static_cast<double>(network.count(ActivityEdgeType::InConversation));
  g[14] = proportion(reposted, corpus.total_reposts);
  g[15] = proportion(mentioned, corpus.total_mentions);
  g[16] = proportion(replied, corpus.total_replies);
  return g;
}

void export_feature_vectors(std::ostream& out, const std::vector<LabelledGroup>& groups, const CorpusIndex& corpus) {
  csv::Row header{"account_id", "group_id", "label"};
  for (auto n : account_feature_names()) header.emplace_back(n);
  for (auto n : group_feature_names()) header.emplace_back(n);
  csv::write_row(out, header);

  const double span = corpus.span_minutes();
  for (const auto& group : groups) {
    auto members = group.members;
    std::sort(members.begin(), members.end());
    const auto network = build_activity_network(members, corpus);
    const auto gf = group_features(members, network, corpus);
    for (const auto& account : members) {
      const auto af = account_features(account, corpus, span);
      csv::Row row{account, group.group_id, group.label};
      for (double v : af) row.push_back(csv::format_number(v));
      for (double v : gf) row.push_back(csv::format_number(v));
      csv::write_row(out, row);
    }
  }
}

}  // namespace findhccs
