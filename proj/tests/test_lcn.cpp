#include <doctest.h>

#include <sstream>

#include "findhccs/lcn.hpp"
#include "oracles.hpp"

using namespace findhccs;

namespace {

EvidencePair ep(const std::string& a, const std::string& b, const std::string& c, std::int64_t w, WindowIndex win = 0) {
  return {a, b, c, win, w};
}

Lcn single(const std::string& a, const std::string& b, double w, const std::string& c = "co-retweet") {
  Lcn l;
  l.nodes = {a, b};
  l.edges[make_pair_key(a, b)][c] = w;
  return l;
}

Lcn random_lcn(Rng& rng) {
  Lcn l;
  const char* criteria[] = {"co-retweet", "co-hashtag"};
  for (std::uint64_t e = rng.below(8); e > 0; --e) {
    auto a = "n" + std::to_string(rng.below(6)), b = "n" + std::to_string(rng.below(6));
    if (a == b) continue;
    l.nodes.insert(a);
    l.nodes.insert(b);
    l.edges[make_pair_key(a, b)][criteria[rng.below(2)]] += 0.1 + static_cast<double>(rng.below(50)) / 7.0;
  }
  return l;
}

}  // namespace

TEST_CASE("build_lcn") {
  auto l = build_lcn({ep("u", "v", "co-retweet", 2), ep("u", "v", "co-hashtag", 1)});
  REQUIRE(l.edges.size() == 1);
  CHECK(l.edges.at({"u", "v"}) == std::map<std::string, double>{{"co-hashtag", 1}, {"co-retweet", 2}});
  CHECK(l.window_index == 0);
  CHECK(build_lcn({}).edges.empty());
  CHECK(build_lcn({ep("u", "v", "co-retweet", 2), ep("u", "v", "co-retweet", 3)}).edges.at({"u", "v"}).at("co-retweet") == 5);
  CHECK_THROWS_AS(build_lcn({ep("u", "v", "co-retweet", 1, 0), ep("u", "v", "co-retweet", 1, 1)}), ContractError);
}

TEST_CASE("collapse_edges") {
  auto l = build_lcn({ep("u", "v", "co-retweet", 2), ep("u", "v", "co-hashtag", 1), ep("v", "w", "co-hashtag", 4)});
  CHECK(collapse_edges(l).edges.at({"u", "v"}) == 3);
  auto weighted = collapse_edges(l, {{"co-hashtag", 0.0}});
  CHECK(weighted.edges.at({"u", "v"}) == 2);
  CHECK(weighted.edges.count({"v", "w"}) == 0);  // collapsed to 0, removed
  CHECK(weighted.nodes == std::set<std::string>{"u", "v", "w"});
  CHECK(collapse_edges(single("a", "b", 7)).edges.at({"a", "b"}) == 7);
}

TEST_CASE("aggregate_lcns") {
  std::vector<Lcn> two{single("a", "b", 1), single("c", "d", 1)};
  CHECK(aggregate_lcns(two).edges.size() == 2);
  std::vector<Lcn> same{single("a", "b", 2), single("a", "b", 3)};
  CHECK(aggregate_lcns(same).edges.at({"a", "b"}).at("co-retweet") == 5);
  auto x = single("a", "b", 2);
  x.window_index.reset();
  std::vector<Lcn> one{x};
  CHECK(aggregate_lcns(one) == x);
}

TEST_CASE("decayed_weight") {
  std::vector<double> h1{3};
  CHECK(decayed_weight(h1, 0.5, 1) == 3);
  CHECK(decayed_weight(h1, 1.0, 1) == 3);
  std::vector<double> h2{3, 2};
  CHECK(decayed_weight(h2, 0.5, 2) == doctest::Approx(4).epsilon(1e-12));
  std::vector<double> h3{0, 1, 1};
  CHECK(decayed_weight(h3, 0.9, 3) == doctest::Approx(1.71).epsilon(1e-12));
  CHECK_THROWS_AS(decayed_weight(h3, 0.0, 3), ContractError);
  CHECK_THROWS_AS(decayed_weight(h3, 1.5, 3), ContractError);
  CHECK_THROWS_AS(decayed_weight(h3, 0.5, 0), ContractError);
}

TEST_CASE("sliding frame over windows") {
  std::map<WindowIndex, Lcn> w;
  w[4] = single("a", "b", 2);
  w[5] = single("a", "b", 3);
  auto f = sliding_frame(w, 5, 2, 0.5);
  CHECK(f.edges.at({"a", "b"}).at("co-retweet") == doctest::Approx(3 + 2 * 0.5));
  auto f1 = sliding_frame(w, 6, 2, 0.5);  // window 6 is empty
  CHECK(f1.edges.at({"a", "b"}).at("co-retweet") == doctest::Approx(1.5));
}

TEST_CASE("csv round-trip") {
  auto l = build_lcn({ep("u", "v", "co-retweet", 2), ep("u", "v", "co-hashtag", 1), ep("v", "w", "co-hashtag", 4)});
  l.window_index.reset();
  std::stringstream s;
  write_lcn_csv(s, l);
  CHECK(read_lcn_csv(s) == l);
}

TEST_CASE("property: aggregation is order independent and collapse is linear") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Lcn> ls;
    for (std::uint64_t k = 1 + rng.below(5); k > 0; --k) ls.push_back(random_lcn(rng));
    const Lcn agg = aggregate_lcns(ls);
    auto perm = ls;
    rng.shuffle(perm);
    CHECK(aggregate_lcns(perm) == agg);

    std::map<AccountPair, double> summed;
    for (const auto& l : ls)
      for (const auto& [e, w] : collapse_edges(l).edges) summed[e] += w;
    const auto collapsed = collapse_edges(agg);
    REQUIRE(collapsed.edges.size() == summed.size());
    for (const auto& [e, w] : summed) CHECK(collapsed.edges.at(e) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("property: decayed_weight is monotone and matches direct evaluation") {
  Rng rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(6));
    std::vector<double> h;
    for (int x = 0; x < T; ++x) h.push_back(static_cast<double>(rng.below(10)));
    const double alpha = 0.01 + 0.99 * rng.uniform();
    const double d = decayed_weight(h, alpha, T);
    CHECK(d == doctest::Approx(oracle::direct_decay(h, alpha, T)).epsilon(1e-12));
    auto bumped = h;
    bumped[rng.below(h.size())] += 1.0;
    CHECK(decayed_weight(bumped, alpha, T) >= d);
    CHECK(decayed_weight(h, std::min(1.0, alpha + 0.1), T) >= d);
    double plain = 0.0;
    for (double v : h) plain += v;
    CHECK(decayed_weight(h, 1.0, T) == doctest::Approx(plain).epsilon(1e-12));
  }
}
