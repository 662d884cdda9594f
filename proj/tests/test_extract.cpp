#include <doctest.h>

#include <cmath>
#include <sstream>

#include "findhccs/extract.hpp"
#include "findhccs/louvain.hpp"
#include "oracles.hpp"

using namespace findhccs;

namespace {

CollapsedGraph graph(std::initializer_list<std::tuple<const char*, const char*, double>> edges,
                     std::initializer_list<const char*> extra_nodes = {}) {
  CollapsedGraph g;
  for (auto [a, b, w] : edges) {
    g.nodes.insert(a);
    g.nodes.insert(b);
    g.edges[make_pair_key(a, b)] = w;
  }
  for (auto n : extra_nodes) g.nodes.insert(n);
  return g;
}

CollapsedGraph two_triangles() {
  return graph({{"a", "b", 10}, {"b", "c", 10}, {"a", "c", 10}, {"d", "e", 10}, {"e", "f", 10}, {"d", "f", 10},
                {"c", "d", 1}});
}

CollapsedGraph fsa_fixture() { return graph({{"a", "b", 10}, {"b", "c", 9}, {"c", "d", 1}, {"e", "f", 2}}); }

std::vector<std::set<std::string>> member_sets(const std::vector<Hcc>& hccs) {
  std::vector<std::set<std::string>> out;
  for (const auto& h : hccs) out.emplace_back(h.members.begin(), h.members.end());
  return out;
}

}  // namespace

TEST_CASE("louvain: two triangles split at the bridge and maximize modularity") {
  const auto g = two_triangles();
  const auto p = louvain_communities(g, 1);
  CHECK(oracle::canonical(p) == Partition{{"a", "b", "c"}, {"d", "e", "f"}});

  double best = -1.0;
  Partition arg;
  for (const auto& cand : oracle::all_partitions({"a", "b", "c", "d", "e", "f"})) {
    const double q = oracle::brute_modularity(g, cand);
    if (q > best) best = q, arg = cand;
  }
  CHECK(oracle::canonical(arg) == oracle::canonical(p));
  CHECK(modularity(g, p) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("louvain: trivial graphs") {
  CHECK(oracle::canonical(louvain_communities(graph({}, {"x", "y", "z"}), 0)) == Partition{{"x"}, {"y"}, {"z"}});
  CHECK(oracle::canonical(louvain_communities(graph({{"u", "v", 1}}), 0)) == Partition{{"u", "v"}});
}

TEST_CASE("property: louvain modularity agrees with the definition and is deterministic") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = oracle::random_graph(rng, 12, trial % 2 == 0);
    const auto p = louvain_communities(g, static_cast<std::uint64_t>(trial));
    CHECK(p == louvain_communities(g, static_cast<std::uint64_t>(trial)));
    CHECK(modularity(g, p) == doctest::Approx(oracle::brute_modularity(g, p)).epsilon(1e-9));
    std::set<std::string> seen;
    for (const auto& c : p)
      for (const auto& n : c) CHECK(seen.insert(n).second);
    CHECK(seen == g.nodes);
    if (g.nodes.size() <= 8) {
      double best = -1.0;
      for (const auto& cand : oracle::all_partitions({g.nodes.begin(), g.nodes.end()}))
        best = std::max(best, oracle::brute_modularity(g, cand));
      // Louvain is a heuristic; on tiny graphs it should land close to the optimum.
      CHECK(modularity(g, p) >= best - 0.1);
    }
  }
}

TEST_CASE("fsa_v hand traces") {
  const auto g = fsa_fixture();
  CHECK(mean_weight(g.edges) == 5.5);

  auto loose = extract_fsa_v(g, 0.3);
  REQUIRE(loose.size() == 1);
  CHECK(loose[0].members == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(loose[0].mew == doctest::Approx(20.0 / 3.0).epsilon(1e-15));

  auto tight = extract_fsa_v(g, 0.9);
  REQUIRE(tight.size() == 1);
  CHECK(tight[0].members == std::vector<std::string>{"a", "b", "c"});
  CHECK(tight[0].mew == 9.5);
}

TEST_CASE("fsa_v: uniform triangle yields nothing; empty graph; bad theta") {
  CHECK(extract_fsa_v(graph({{"a", "b", 2}, {"b", "c", 2}, {"a", "c", 2}}), 0.3).empty());
  CHECK(extract_fsa_v(CollapsedGraph{}, 0.3).empty());
  CHECK_THROWS_AS(extract_fsa_v(fsa_fixture(), 0.0), ContractError);
  CHECK_THROWS_AS(extract_fsa_v(fsa_fixture(), 1.1), ContractError);
  CHECK_NOTHROW(extract_fsa_v(fsa_fixture(), 1.0));
}

TEST_CASE("knn") {
  auto star = extract_knn(graph({{"c", "a", 5}, {"c", "b", 3}, {"c", "d", 1}}));
  REQUIRE(star.size() == 1);
  CHECK(star[0].members.size() == 4);
  CHECK(star[0].edges.size() == 3);

  auto pair = extract_knn(graph({{"u", "v", 1}}));
  REQUIRE(pair.size() == 1);
  CHECK(pair[0].members == std::vector<std::string>{"u", "v"});

  CHECK(extract_knn(graph({{"a", "b", 9}, {"c", "d", 8}})).size() == 2);
  CHECK(extract_knn(graph({}, {"lonely"})).empty());
}

TEST_CASE("threshold") {
  auto kept = extract_threshold(graph({{"a", "b", 10}, {"b", "c", 5}, {"c", "d", 1}}), 0.1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].edges.size() == 3);  // 0.1 is not < 0.1

  auto dropped = extract_threshold(graph({{"a", "b", 10}, {"c", "d", 0.5}}), 0.1);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0].members == std::vector<std::string>{"a", "b"});

  CHECK(extract_threshold(graph({{"x", "y", 0.01}}), 1.0).size() == 1);
  CHECK_THROWS_AS(extract_threshold(graph({{"x", "y", 1}}), 0.0), ContractError);
}

TEST_CASE("hcc ids follow size and csv round-trips") {
  auto hccs = make_hccs({{{{"x", "y"}, 1.0}}, {{{"a", "b"}, 2.0}, {{"b", "c"}, 4.0}}});
  REQUIRE(hccs.size() == 2);
  CHECK(hccs[0].id == 0);
  CHECK(hccs[0].members == std::vector<std::string>{"a", "b", "c"});
  CHECK(hccs[0].mew == 3.0);
  CHECK(hccs[1].members == std::vector<std::string>{"x", "y"});

  std::stringstream m, e;
  write_hccs_csv(m, hccs);
  write_hcc_edges_csv(e, hccs);
  CHECK(read_hccs_csv(m, &e) == hccs);
}

TEST_CASE("extract_hccs dispatches with criterion multipliers") {
  Lcn l;
  l.nodes = {"a", "b", "c", "d"};
  l.edges[{"a", "b"}] = {{"co-retweet", 10}};
  l.edges[{"c", "d"}] = {{"co-hashtag", 10}};
  ExtractionParams p;
  p.method = ExtractionMethod::Threshold;
  p.criterion_weights = {{"co-hashtag", 0.05}};
  auto hccs = extract_hccs(l, p);
  REQUIRE(hccs.size() == 1);
  CHECK(hccs[0].members == std::vector<std::string>{"a", "b"});
}

TEST_CASE("property: fsa_v invariants on random graphs") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = oracle::random_graph(rng, 40, trial % 3 != 0);
    const double theta = 0.05 + 0.95 * rng.uniform();
    const std::uint64_t seed = rng.below(1000);
    const auto hccs = extract_fsa_v(g, theta, seed);
    CHECK(hccs == extract_fsa_v(g, theta, seed));
    const double g_mean = mean_weight(g.edges);
    const auto partition = louvain_communities(g, seed);
    std::map<std::string, std::size_t> community;
    for (std::size_t c = 0; c < partition.size(); ++c)
      for (const auto& n : partition[c]) community[n] = c;
    std::set<std::string> seen;
    for (const auto& h : hccs) {
      CHECK(h.mew > g_mean);
      CHECK(h.members.size() >= 2);
      CHECK(h.mew == doctest::Approx(mean_weight(h.edges)));
      std::set<std::string> endpoints;
      for (const auto& [e, w] : h.edges) {
        CHECK(g.edges.at(e) == w);
        CHECK(community.at(e.first) == community.at(e.second));
        endpoints.insert(e.first);
        endpoints.insert(e.second);
      }
      CHECK(endpoints == std::set<std::string>(h.members.begin(), h.members.end()));
      for (const auto& m : h.members) CHECK(seen.insert(m).second);
    }
  }
}

TEST_CASE("property: threshold is scale invariant; knn union semantics") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_graph(rng, 30, false);
    auto scaled = g;
    const double factor = 0.5 + 4.0 * rng.uniform();
    for (auto& [e, w] : scaled.edges) w *= factor;
    CHECK(member_sets(extract_threshold(g, 0.1)) == member_sets(extract_threshold(scaled, 0.1)));

    const auto knn = extract_knn(g);
    CHECK(knn == extract_knn(g));
    if (g.nodes.size() < 2) continue;
    const auto k = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(g.nodes.size()))));
    std::map<AccountPair, double> retained;
    for (const auto& h : knn) retained.insert(h.edges.begin(), h.edges.end());
    // Every retained edge is among the k heaviest of one endpoint; each node
    // chose at most k edges, although its degree may exceed k.
    auto rank_ok = [&](const std::string& n, const AccountPair& e) {
      const double w = g.edges.at(e);
      std::size_t heavier = 0;
      for (const auto& [f, fw] : g.edges)
        if ((f.first == n || f.second == n) && (fw > w || (fw == w && f < e))) ++heavier;
      return heavier < k;
    };
    std::map<std::string, std::size_t> chosen;
    for (const auto& [e, w] : retained) {
      const bool a = rank_ok(e.first, e), b = rank_ok(e.second, e);
      CHECK((a || b));
      chosen[e.first] += a;
      chosen[e.second] += b;
    }
    for (const auto& [n, c] : chosen) CHECK(c <= k);
    for (const auto& [e, w] : g.edges)
      if (rank_ok(e.first, e) || rank_ok(e.second, e)) CHECK(retained.count(e) == 1);
  }
}
