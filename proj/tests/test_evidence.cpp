#include <doctest.h>

#include <sstream>

#include "findhccs/evidence.hpp"
#include "oracles.hpp"

using namespace findhccs;

namespace {

Interaction act(InteractionKind k, const std::string& actor, const std::string& target, Timestamp t) {
  return {k, actor, target, t, actor + target + std::to_string(t)};
}

Interaction repost(const std::string& actor, const std::string& target, Timestamp t = 0) {
  return act(InteractionKind::Repost, actor, target, t);
}

const CriterionSpec kCoRetweet{Criterion::CoRetweet, false};

}  // namespace

TEST_CASE("window assignment") {
  const auto cfg = WindowConfig::minutes(15, 1000);
  CHECK(assign_window(1000, cfg) == 0);
  CHECK(assign_window(1000 + 899, cfg) == 0);
  CHECK(assign_window(1000 + 900, cfg) == 1);
  CHECK(assign_window(86400, WindowConfig::minutes(1440)) == 1);
  CHECK_THROWS_AS(assign_window(999, cfg), DomainError);
  CHECK_THROWS_AS(WindowConfig::minutes(0), ContractError);
  CHECK(assign_window(25, WindowConfig::seconds(10)) == 2);
}

TEST_CASE("criterion names map to kinds") {
  CHECK(consumed_kind(criterion_from_string("co-retweet")) == InteractionKind::Repost);
  CHECK(consumed_kind(criterion_from_string("co-hashtag")) == InteractionKind::Hashtag);
  CHECK(consumed_kind(criterion_from_string("co-url")) == InteractionKind::Url);
  CHECK(consumed_kind(criterion_from_string("co-domain")) == InteractionKind::Domain);
  CHECK(consumed_kind(criterion_from_string("co-mention")) == InteractionKind::Mention);
  CHECK(consumed_kind(criterion_from_string("co-conv")) == InteractionKind::Conv);
  CHECK_THROWS_AS(criterion_from_string("co-copypasta"), ContractError);
}

TEST_CASE("filter_interactions") {
  std::vector<Interaction> mixed{act(InteractionKind::Hashtag, "u", "a", 0), act(InteractionKind::Mention, "u", "v", 0),
                                 act(InteractionKind::Hashtag, "v", "b", 0)};
  auto f = filter_interactions(mixed, {Criterion::CoHashtag, false});
  REQUIRE(f.size() == 2);
  CHECK(f[0].target == "a");
  CHECK(f[1].target == "b");
  CHECK(filter_interactions({}, kCoRetweet).empty());
  std::vector<Interaction> rq{repost("u", "T"), act(InteractionKind::Quote, "v", "T", 0)};
  CHECK(filter_interactions(rq, {Criterion::CoRetweet, true}).size() == 2);
  CHECK(filter_interactions(rq, kCoRetweet).size() == 1);
}

TEST_CASE("find_coordination worked example") {
  std::vector<Interaction> in{repost("u", "T1"), repost("v", "T1"), repost("w", "T1"), repost("u", "T2"),
                              repost("v", "T2")};
  auto pairs = find_coordination(in, kCoRetweet, WindowConfig::minutes(15));
  std::vector<EvidencePair> want{{"u", "v", "co-retweet", 0, 2}, {"u", "w", "co-retweet", 0, 1},
                                 {"v", "w", "co-retweet", 0, 1}};
  CHECK(pairs == want);
  CHECK(pairs == oracle::brute_force_evidence(in, "co-retweet", WindowConfig::minutes(15)));
}

TEST_CASE("lone account and window boundary give no pairs") {
  std::vector<Interaction> alone;
  for (int i = 0; i < 5; ++i) alone.push_back(act(InteractionKind::Hashtag, "u", "h", i));
  CHECK(find_coordination(alone, {Criterion::CoHashtag, false}, WindowConfig::minutes(15)).empty());
  std::vector<Interaction> split{repost("u", "T1", 100), repost("v", "T1", 900 + 100)};
  CHECK(find_coordination(split, kCoRetweet, WindowConfig::minutes(15)).empty());
}

TEST_CASE("min-count versus binary multiplicity") {
  std::vector<Interaction> in{repost("u", "T", 1), repost("u", "T", 2), repost("u", "T", 3), repost("v", "T", 4),
                              repost("v", "T", 5)};
  auto cfg = WindowConfig::minutes(15);
  CHECK(find_coordination(in, kCoRetweet, cfg).at(0).weight == 2);
  CHECK(find_coordination(in, kCoRetweet, cfg, {Multiplicity::Binary, 1}).at(0).weight == 1);
}

TEST_CASE("detailed evidence sums to pair evidence and csv round-trips") {
  std::vector<Interaction> in{repost("u", "T1"), repost("v", "T1"), repost("u", "T2"), repost("v", "T2", 950),
                              repost("w", "T2", 960)};
  auto cfg = WindowConfig::minutes(15);
  auto details = find_coordination_detailed(in, kCoRetweet, cfg);
  auto pairs = find_coordination(in, kCoRetweet, cfg);
  std::map<std::tuple<WindowIndex, std::string, std::string>, std::int64_t> sum;
  for (const auto& d : details) sum[{d.window_index, d.account_a, d.account_b}] += d.weight;
  REQUIRE(sum.size() == pairs.size());
  for (const auto& p : pairs) CHECK(sum[{p.window_index, p.account_a, p.account_b}] == p.weight);

  std::stringstream s1, s2;
  write_evidence_csv(s1, pairs);
  CHECK(read_evidence_csv(s1) == pairs);
  write_evidence_detail_csv(s2, details);
  CHECK(read_evidence_detail_csv(s2) == details);
}

TEST_CASE("property: oracle equivalence, symmetry, worker independence") {
  Rng rng(3);
  const auto cfg = WindowConfig::minutes(15);
  for (int trial = 0; trial < 300; ++trial) {
    auto in = oracle::random_interactions(rng, 20, InteractionKind::Hashtag);
    const CriterionSpec spec{Criterion::CoHashtag, false};
    const auto mult = trial % 2 ? Multiplicity::Binary : Multiplicity::MinCount;
    auto got = find_coordination(in, spec, cfg, {mult, 1});
    CHECK(got == oracle::brute_force_evidence(in, "co-hashtag", cfg, mult));
    CHECK(got == find_coordination(in, spec, cfg, {mult, 4}));
    for (const auto& p : got) {
      CHECK(p.account_a < p.account_b);
      CHECK(p.weight >= 1);
    }
  }
}

TEST_CASE("property: window locality and monotonicity") {
  Rng rng(5);
  const auto cfg = WindowConfig::minutes(15);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = oracle::random_interactions(rng, 20, InteractionKind::Repost);
    auto base = find_coordination(in, kCoRetweet, cfg);

    // Rewriting every interaction outside window 0 leaves window 0 untouched.
    auto shuffled = in;
    for (auto& i : shuffled)
      if (assign_window(i.timestamp, cfg) != 0) i.target = "other" + std::to_string(rng.below(3));
    rng.shuffle(shuffled);
    auto window0 = [](std::vector<EvidencePair> v) {
      v.erase(std::remove_if(v.begin(), v.end(), [](const EvidencePair& p) { return p.window_index != 0; }), v.end());
      return v;
    };
    CHECK(window0(find_coordination(shuffled, kCoRetweet, cfg)) == window0(base));

    // Adding one interaction never lowers a weight.
    auto more = in;
    more.push_back(oracle::random_interactions(rng, 1, InteractionKind::Repost).empty()
                       ? repost("u0", "t0", 0)
                       : repost("u" + std::to_string(rng.below(6)), "t" + std::to_string(rng.below(4)),
                                static_cast<Timestamp>(rng.below(3600))));
    auto after = find_coordination(more, kCoRetweet, cfg);
    for (const auto& p : base) {
      auto it = std::find_if(after.begin(), after.end(), [&](const EvidencePair& q) {
        return q.window_index == p.window_index && q.account_a == p.account_a && q.account_b == p.account_b;
      });
      REQUIRE(it != after.end());
      CHECK(it->weight >= p.weight);
    }
  }
}
