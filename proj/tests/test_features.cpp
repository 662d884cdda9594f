#include <doctest.h>

#include <sstream>

#include "findhccs/csv.hpp"
#include "findhccs/features.hpp"

using namespace findhccs;

namespace {

Post post(const std::string& id, const std::string& author, Timestamp t) {
  Post p;
  p.post_id = id;
  p.author_id = author;
  p.timestamp = t;
  return p;
}

std::size_t account_column(std::string_view name) {
  const auto& n = account_feature_names();
  return static_cast<std::size_t>(std::find(n.begin(), n.end(), name) - n.begin());
}

std::size_t group_column(std::string_view name) {
  const auto& n = group_feature_names();
  return static_cast<std::size_t>(std::find(n.begin(), n.end(), name) - n.begin());
}

}  // namespace

TEST_CASE("account features") {
  std::vector<Post> posts;
  for (int i = 0; i < 10; ++i) posts.push_back(post("a" + std::to_string(i), "a", i * 60));
  posts.push_back(post("end", "z", 1440 * 60));
  posts[0].mentioned_ids = {"x", "y"};
  posts[1].mentioned_ids = {"x"};
  posts[0].profile_description = "héllo";
  posts[0].profile_default_image = true;
  posts[3].reposted_post_id = "end";
  posts[3].reposted_author_id = "z";
  CorpusIndex corpus(posts);
  CHECK(corpus.span_minutes() == 1440.0);
  auto f = account_features("a", corpus, corpus.span_minutes());
  CHECK(f[account_column("posting_rate")] == doctest::Approx(10.0 / 1440.0).epsilon(1e-12));
  CHECK(f[account_column("unique_mentions")] == 2);
  CHECK(f[account_column("mention_count")] == 3);
  CHECK(f[account_column("repost_count")] == 1);
  CHECK(f[account_column("default_profile_image")] == 1);
  CHECK(f[account_column("profile_description_length")] == 5);
  CHECK(f[account_column("profile_url_length")] == 0);
  CHECK_THROWS_AS(account_features("a", corpus, 0.0), ContractError);
}

TEST_CASE("group proportions divide by corpus totals") {
  std::vector<Post> posts;
  for (int i = 0; i < 10; ++i) {
    posts.push_back(post("r" + std::to_string(i), "fan" + std::to_string(i), i));
    posts.back().reposted_post_id = "orig";
    posts.back().reposted_author_id = i == 0 ? "g1" : "other";
  }
  CorpusIndex corpus(posts);
  std::vector<AccountId> members{"g1", "g2"};
  auto net = build_activity_network(members, corpus);
  auto g = group_features(members, net, corpus);
  CHECK(g[group_column("group_reposted_proportion")] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g[group_column("group_mentioned_proportion")] == 0.0);
  CHECK(g[group_column("group_member_count")] == 2);
  CHECK(g[group_column("group_author_count")] == 0);
}

TEST_CASE("activity network") {
  std::vector<Post> posts;
  Post p = post("1", "m", 10);
  p.hashtags = {"vote"};
  p.mentioned_ids = {"x"};
  posts.push_back(p);
  posts.push_back(post("root", "v", 1));
  Post r = post("2", "m", 20);
  r.replied_post_id = "root";
  r.replied_author_id = "v";
  posts.push_back(r);
  Post deep = post("3", "m", 30);
  deep.replied_post_id = "2";
  deep.replied_author_id = "m";
  posts.push_back(deep);
  CorpusIndex corpus(posts);

  auto net = build_activity_network({"m"}, corpus);
  CHECK(net.count(ActivityNodeType::Account) == 3);  // m, x, v
  CHECK(net.count(ActivityNodeType::Hashtag) == 1);
  CHECK(net.count(ActivityEdgeType::HashtagUse) == 1);
  CHECK(net.count(ActivityEdgeType::Mention) == 1);
  CHECK(net.count(ActivityEdgeType::Reply) == 2);
  CHECK(net.count(ActivityEdgeType::InConversation) == 2);  // both replies sit under v's root
  for (const auto& e : net.edges)
    if (e.type == ActivityEdgeType::InConversation) CHECK(e.target == "account:v");

  auto g = group_features({"m"}, net, corpus);
  CHECK(g[group_column("group_in_conversation_count")] == 2);
  CHECK(g[group_column("group_interaction_count")] == static_cast<double>(net.edges.size()));
}

TEST_CASE("feature export") {
  std::vector<Post> posts;
  for (int i = 0; i < 30; ++i) {
    posts.push_back(post(std::to_string(i), "u" + std::to_string(i % 6), i * 100));
    if (i % 3 == 0) posts.back().hashtags = {"h" + std::to_string(i % 4)};
  }
  CorpusIndex corpus(posts);
  std::vector<LabelledGroup> groups{{"hcc-0", "coordinating", {"u2", "u0", "u1"}},
                                    {"hcc-1", "coordinating", {"u3", "u4"}},
                                    {"random-0", "unlabeled", {"u5", "u9", "u8", "u7", "u6"}}};
  std::stringstream s;
  export_feature_vectors(s, groups, corpus);
  csv::Table t(s);
  CHECK(t.header().size() == 3 + kAccountFeatureCount + kGroupFeatureCount);
  REQUIRE(t.rows().size() == 10);
  CHECK(t.rows()[0][0] == "u0");
  CHECK(t.rows()[0][2] == "coordinating");
  CHECK(t.rows()[9][2] == "unlabeled");

  std::map<std::string, std::vector<std::string>> group_cells;
  for (const auto& row : t.rows()) {
    std::vector<std::string> tail(row.begin() + 3 + kAccountFeatureCount, row.end());
    auto [it, fresh] = group_cells.emplace(row[1], tail);
    if (!fresh) CHECK(it->second == tail);
    const double unique = std::stod(row[t.column("unique_hashtags")]);
    const double uses = std::stod(row[t.column("hashtag_uses")]);
    CHECK(unique <= uses);
    const double authors = std::stod(row[t.column("group_author_count")]);
    const double members = std::stod(row[t.column("group_member_count")]);
    const double users = std::stod(row[t.column("group_user_count")]);
    CHECK(authors <= members);
    CHECK(members <= users);
  }
  CHECK(group_cells.size() == 3);
}
