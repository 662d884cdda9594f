#include <doctest.h>

#include <sstream>

#include "findhccs/ingest.hpp"
#include "findhccs/random.hpp"

using namespace findhccs;

namespace {

Post reply(const std::string& id, const std::string& parent, Timestamp t = 10) {
  Post p;
  p.post_id = id;
  p.author_id = "a_" + id;
  p.timestamp = t;
  if (!parent.empty()) p.replied_post_id = parent;
  return p;
}

Post full_post() {
  Post p;
  p.post_id = "p1";
  p.author_id = "alice";
  p.timestamp = 1600000000;
  p.text = "héllo \"world\" #Tag";
  p.hashtags = {"tag", "other"};
  p.mentioned_ids = {"bob"};
  p.urls = {"https://Example.COM/x?y=1", "not a url"};
  p.domains = {"example.com", ""};
  p.reposted_post_id = "p0";
  p.reposted_author_id = "carol";
  p.replied_post_id = "p-1";
  p.replied_author_id = "dave";
  p.quoted_post_id = "q9";
  return p;
}

}  // namespace

TEST_CASE("jsonl line with all fields round-trips") {
  std::stringstream s;
  write_post_jsonl(s, full_post());
  auto r = parse_posts(s, InputFormat::CanonicalJsonl);
  REQUIRE(r.posts.size() == 1);
  CHECK(r.posts[0] == full_post());
  CHECK(r.skipped == 0);
}

TEST_CASE("posts come back sorted by timestamp, stable on ties") {
  std::stringstream s;
  s << R"({"post_id":"a","author_id":"u","timestamp":20})" << "\n"
    << R"({"post_id":"b","author_id":"u","timestamp":10})" << "\n"
    << R"({"post_id":"c","author_id":"u","timestamp":10})" << "\n";
  auto r = parse_posts(s, InputFormat::CanonicalJsonl);
  REQUIRE(r.posts.size() == 3);
  CHECK(r.posts[0].post_id == "b");
  CHECK(r.posts[1].post_id == "c");
  CHECK(r.posts[2].post_id == "a");
}

TEST_CASE("record missing author_id is skipped and counted") {
  std::stringstream s;
  s << R"({"post_id":"a","author_id":"u","timestamp":1})" << "\n"
    << R"({"post_id":"x","timestamp":2})" << "\n"
    << R"({"post_id":"b","author_id":"v","timestamp":3})" << "\n"
    << R"({"post_id":"c","author_id":"w","timestamp":4})" << "\n";
  auto r = parse_posts(s, InputFormat::CanonicalJsonl);
  CHECK(r.posts.size() == 3);
  CHECK(r.skipped == 1);
}

TEST_CASE("malformed records: bad json, non-positive timestamp, duplicate id") {
  std::stringstream s;
  s << "{not json\n"
    << R"({"post_id":"a","author_id":"u","timestamp":0})" << "\n"
    << R"({"post_id":"b","author_id":"u","timestamp":5})" << "\n"
    << R"({"post_id":"b","author_id":"u","timestamp":6})" << "\n";
  auto r = parse_posts(s, InputFormat::CanonicalJsonl);
  CHECK(r.posts.size() == 1);
  CHECK(r.skipped == 3);
}

TEST_CASE("zero valid records is an empty-corpus error") {
  std::stringstream s("{\"post_id\":\"x\"}\n");
  CHECK_THROWS_AS(parse_posts(s, InputFormat::CanonicalJsonl), EmptyCorpusError);
  CHECK_THROWS_AS(parse_posts_file("/nonexistent/posts.jsonl", InputFormat::CanonicalJsonl), IoError);
}

TEST_CASE("hashtags are lowercased and lose the leading #; domains follow urls") {
  std::stringstream s(R"({"post_id":"a","author_id":"u","timestamp":1,"hashtags":["#AusPol","Vote"],"urls":["http://WWW.abc.net.au/news","::"]})"
                      "\n");
  auto r = parse_posts(s, InputFormat::CanonicalJsonl);
  REQUIRE(r.posts.size() == 1);
  CHECK(r.posts[0].hashtags == std::vector<std::string>{"auspol", "vote"});
  CHECK(r.posts[0].domains == std::vector<std::string>{"www.abc.net.au", ""});
}

TEST_CASE("canonical csv round-trips through the same Post values") {
  std::vector<Post> posts{full_post()};
  posts.push_back(reply("p2", "p1", 1600000001));
  std::stringstream s;
  write_posts_csv(s, posts);
  auto r = parse_posts(s, InputFormat::CanonicalCsv);
  REQUIRE(r.posts.size() == 2);
  CHECK(r.posts[0] == posts[0]);
  CHECK(r.posts[1] == posts[1]);
}

TEST_CASE("twitter v1.1 adapter maps retweets and replies") {
  std::stringstream s;
  s << R"({"id_str":"2","created_at":"Wed Oct 10 20:19:24 +0000 2018","text":"RT @x: hi",)"
       R"("user":{"id_str":"u1","default_profile_image":true,"description":"abc","url":"http://a.b"},)"
       R"("entities":{"hashtags":[],"user_mentions":[],"urls":[]},)"
       R"("retweeted_status":{"id_str":"1","user":{"id_str":"x"},"entities":{"hashtags":[{"text":"Vote"}],"user_mentions":[],"urls":[]}}})"
    << "\n"
    << R"({"id_str":"3","timestamp_ms":"1539202765000","text":"@u1 yes","user":{"id_str":"u2"},)"
       R"("in_reply_to_status_id_str":"2","in_reply_to_user_id_str":"u1",)"
       R"("entities":{"hashtags":[],"user_mentions":[{"id_str":"u1"}],"urls":[]}})"
    << "\n";
  auto r = parse_posts(s, InputFormat::TwitterV11);
  REQUIRE(r.posts.size() == 2);
  CHECK(r.posts[0].timestamp == 1539202764);
  CHECK(r.posts[0].reposted_post_id == "1");
  CHECK(r.posts[0].reposted_author_id == "x");
  CHECK(r.posts[0].hashtags == std::vector<std::string>{"vote"});
  CHECK(r.posts[0].profile_default_image == true);
  CHECK(r.posts[1].timestamp == 1539202765);
  CHECK(r.posts[1].replied_post_id == "2");
  CHECK(r.posts[1].mentioned_ids == std::vector<std::string>{"u1"});
}

TEST_CASE("conversation roots") {
  SUBCASE("3-chain resolves to the root") {
    auto roots = resolve_conversations({reply("p1", ""), reply("p2", "p1"), reply("p3", "p2")});
    CHECK(roots.at("p1") == "p1");
    CHECK(roots.at("p2") == "p1");
    CHECK(roots.at("p3") == "p1");
  }
  SUBCASE("post with no parent maps to itself") {
    auto roots = resolve_conversations({reply("solo", "")});
    CHECK(roots.at("solo") == "solo");
  }
  SUBCASE("dangling parent is the root key") {
    auto roots = resolve_conversations({reply("p2", "p1")});
    CHECK(roots.at("p2") == "p1");
  }
  SUBCASE("cycle is cut at the first revisited post") {
    auto roots = resolve_conversations({reply("a", "b"), reply("b", "a"), reply("c", "a")});
    // From a: a -> b -> a (revisited) so a is the root; b and c join it.
    CHECK(roots.at("a") == "a");
    CHECK(roots.at("b") == "a");
    CHECK(roots.at("c") == "a");
  }
}

TEST_CASE("interaction extraction counts") {
  Post p = reply("x", "");
  p.hashtags = {"h1", "h2"};
  p.mentioned_ids = {"m"};
  auto roots = resolve_conversations({p});
  auto out = extract_interactions(p, roots);
  REQUIRE(out.size() == 3);
  CHECK(out[0].kind == InteractionKind::Hashtag);
  CHECK(out[1].kind == InteractionKind::Hashtag);
  CHECK(out[2].kind == InteractionKind::Mention);

  Post plain = reply("y", "");
  CHECK(extract_interactions(plain, resolve_conversations({plain})).empty());

  std::vector<Post> chain{reply("p1", ""), reply("p2", "p1"), reply("p3", "p2")};
  auto all = extract_interactions(chain, resolve_conversations(chain));
  bool conv = false, rep = false;
  for (const auto& i : all) {
    if (i.source_post_id != "p3") continue;
    if (i.kind == InteractionKind::Conv) conv = i.target == "p1";
    if (i.kind == InteractionKind::Reply) rep = i.target == "p2";
  }
  CHECK(conv);
  CHECK(rep);
  // The root author gets no CONV for authoring the root.
  for (const auto& i : all) CHECK_FALSE(i.source_post_id == "p1");
}

TEST_CASE("unparsable url still yields URL but no DOMAIN") {
  Post p = reply("x", "");
  p.urls = {"::"};
  p.domains = {""};
  auto out = extract_interactions(p, resolve_conversations({p}));
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == InteractionKind::Url);
}

TEST_CASE("interactions csv round-trip") {
  std::vector<Post> chain{reply("p1", ""), reply("p2", "p1")};
  chain[1].hashtags = {"a,b"};
  auto all = extract_interactions(chain, resolve_conversations(chain));
  std::stringstream s;
  write_interactions_csv(s, all);
  CHECK(read_interactions_csv(s) == all);
}

// ---- properties ----

namespace {

Post random_post(Rng& rng, std::size_t i, std::size_t corpus) {
  Post p;
  p.post_id = "p" + std::to_string(i);
  p.author_id = "u" + std::to_string(rng.below(5));
  p.timestamp = 1 + static_cast<Timestamp>(rng.below(1000));
  p.text = rng.bernoulli(0.5) ? "text, with \"quotes\"\nand newline" : "";
  for (std::uint64_t k = rng.below(3); k > 0; --k) p.hashtags.push_back("h" + std::to_string(rng.below(4)));
  for (std::uint64_t k = rng.below(2); k > 0; --k) p.mentioned_ids.push_back("u" + std::to_string(rng.below(5)));
  for (std::uint64_t k = rng.below(2); k > 0; --k) {
    p.urls.push_back("https://s" + std::to_string(rng.below(3)) + ".org/" + std::to_string(rng.below(9)));
    p.domains.push_back(url_hostname(p.urls.back()));
  }
  if (rng.bernoulli(0.3)) {
    p.reposted_post_id = "ext" + std::to_string(rng.below(3));
    p.reposted_author_id = "e";
  }
  if (rng.bernoulli(0.4)) p.replied_post_id = "p" + std::to_string(rng.below(corpus + 2));
  if (rng.bernoulli(0.1)) p.quoted_post_id = "q";
  return p;
}

}  // namespace

TEST_CASE("property: jsonl round-trip, per-post locality, CONV targets are root fixed points") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(15);
    std::vector<Post> posts;
    for (std::size_t i = 0; i < n; ++i) posts.push_back(random_post(rng, i, n));

    std::stringstream s;
    write_posts_jsonl(s, posts);
    auto back = parse_posts(s, InputFormat::CanonicalJsonl).posts;
    std::stable_sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
    REQUIRE(back == posts);

    const auto roots = resolve_conversations(posts);
    const auto all = extract_interactions(posts, roots);
    std::vector<Interaction> concat;
    for (const auto& p : posts) {
      auto one = extract_interactions(p, roots);
      concat.insert(concat.end(), one.begin(), one.end());
    }
    CHECK(all == concat);
    for (const auto& i : all) {
      CHECK_FALSE(i.target.empty());
      if (i.kind != InteractionKind::Conv) continue;
      auto it = roots.find(i.target);
      // A root either is a corpus post mapping to itself or is a dangling key.
      if (it != roots.end()) CHECK(it->second == i.target);
    }
  }
}
