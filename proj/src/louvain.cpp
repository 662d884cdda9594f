#include "findhccs/louvain.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "findhccs/random.hpp"

namespace findhccs {

namespace {

struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries, ascending neighbour
  std::vector<double> self_loop;                                   // A_ii (internal weight counted twice)
  std::vector<double> degree;                                      // k_i, includes self_loop
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

LevelGraph from_collapsed(const CollapsedGraph& g, const std::vector<std::string>& names) {
  std::unordered_map<std::string_view, std::uint32_t> index;
  for (std::uint32_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  LevelGraph lg;
  lg.adj.resize(names.size());
  lg.self_loop.assign(names.size(), 0.0);
  lg.degree.assign(names.size(), 0.0);
  for (const auto& [pair, w] : g.edges) {
    if (w <= 0.0) continue;
    auto a = index.at(pair.first), b = index.at(pair.second);
    if (a == b) {
      lg.self_loop[a] += 2.0 * w;
      continue;
    }
    lg.adj[a].emplace_back(b, w);
    lg.adj[b].emplace_back(a, w);
  }
  for (std::size_t i = 0; i < lg.size(); ++i) {
    std::sort(lg.adj[i].begin(), lg.adj[i].end());
    lg.degree[i] = lg.self_loop[i];
    for (const auto& [j, w] : lg.adj[i]) lg.degree[i] += w;
    lg.two_m += lg.degree[i];
  }
  return lg;
}

// Local-move phase. Returns community id per node, renumbered 0..k-1 in order
// of first appearance by node id, and whether any node moved.
std::pair<std::vector<std::uint32_t>, bool> local_moves(const LevelGraph& g, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> comm(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> tot = g.degree;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<double> link(n, -1.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  constexpr int kMaxPasses = 1000;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (std::uint32_t i : order) {
      const double ki = g.degree[i];
      if (ki <= 0.0) continue;
      const std::uint32_t own = comm[i];
      touched.clear();
      link[own] = 0.0;
      touched.push_back(own);
      for (const auto& [j, w] : g.adj[i]) {
        const auto c = comm[j];
        if (link[c] < 0.0) {
          link[c] = 0.0;
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[own] -= ki;
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * ki / g.two_m;
      const double eps = 1e-12 * std::max(1.0, ki);
      for (auto c : touched) {
        const double gain = link[c] - tot[c] * ki / g.two_m;
        if (gain > best_gain + eps) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += ki;
      if (best != own) {
        comm[i] = best;
        moved = true;
      }
      for (auto c : touched) link[c] = -1.0;
    }
    if (!moved) break;
    any_move = true;
  }

  std::vector<std::uint32_t> renumber(n, UINT32_MAX);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (renumber[comm[i]] == UINT32_MAX) renumber[comm[i]] = next++;
    comm[i] = renumber[comm[i]];
  }
  return {comm, any_move};
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t k) {
  LevelGraph out;
  out.adj.resize(k);
  out.self_loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  std::vector<std::map<std::uint32_t, double>> links(k);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ci = comm[i];
    out.self_loop[ci] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      const auto cj = comm[j];
      if (ci == cj) out.self_loop[ci] += w;  // each internal edge seen from both ends
      else links[ci][cj] += w;
    }
  }
  for (std::uint32_t c = 0; c < k; ++c) {
    out.adj[c].assign(links[c].begin(), links[c].end());
    out.degree[c] = out.self_loop[c];
    for (const auto& [j, w] : out.adj[c]) out.degree[c] += w;
    out.two_m += out.degree[c];
  }
  return out;
}

std::vector<std::string> node_names(const CollapsedGraph& g) {
  std::set<std::string> names = g.nodes;
  for (const auto& [pair, w] : g.edges) {
    names.insert(pair.first);
    names.insert(pair.second);
  }
  return {names.begin(), names.end()};
}

}  // namespace

Partition louvain_communities(const CollapsedGraph& g, std::uint64_t seed) {
  const auto names = node_names(g);
  const std::size_t n = names.size();
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);

  LevelGraph level = from_collapsed(g, names);
  Rng rng(seed);
  if (level.two_m > 0.0) {
    while (true) {
      auto [comm, moved] = local_moves(level, rng);
      if (!moved) break;
      const std::uint32_t k = *std::max_element(comm.begin(), comm.end()) + 1;
      for (auto& m : membership) m = comm[m];
      if (k == level.size()) break;
      level = aggregate(level, comm, k);
    }
  }

  std::map<std::uint32_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[membership[i]].push_back(names[i]);
  Partition out;
  out.reserve(groups.size());
  for (auto& [id, members] : groups) out.push_back(std::move(members));  // names sorted, so members are too
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

double modularity(const CollapsedGraph& g, const Partition& partition) {
  std::unordered_map<std::string, std::size_t> community;
  for (std::size_t c = 0; c < partition.size(); ++c)
    for (const auto& v : partition[c]) community[v] = c;
  double m = 0.0;
  std::vector<double> internal(partition.size(), 0.0), degree(partition.size(), 0.0);
  for (const auto& [pair, w] : g.edges) {
    m += w;
    auto ca = community.at(pair.first), cb = community.at(pair.second);
    degree[ca] += w;
    degree[cb] += w;
    if (ca == cb) internal[ca] += w;
  }
  if (m <= 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < partition.size(); ++c) q += internal[c] / m - (degree[c] / (2 * m)) * (degree[c] / (2 * m));
  return q;
}

}  // namespace findhccs
