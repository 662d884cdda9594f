#include "findhccs/extract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "findhccs/csv.hpp"

namespace findhccs {

ExtractionMethod extraction_method_from_string(std::string_view name) {
  if (name == "fsa_v") return ExtractionMethod::FsaV;
  if (name == "knn") return ExtractionMethod::Knn;
  if (name == "threshold") return ExtractionMethod::Threshold;
  throw ContractError(fmt::format("unknown extraction method '{}' (expected fsa_v, knn or threshold)", name));
}

std::string_view to_string(ExtractionMethod m) {
  switch (m) {
    case ExtractionMethod::FsaV: return "fsa_v";
    case ExtractionMethod::Knn: return "knn";
    case ExtractionMethod::Threshold: return "threshold";
  }
  return "?";
}

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ContractError(fmt::format("theta must satisfy θ∈(0,1] (got {})", theta));
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ContractError(fmt::format("threshold must lie in (0, 1] (got {})", threshold));
}

struct WeightedEdge {
  const AccountPair* pair;
  double weight;
};

// True when a is lighter than b: weight descending, then pair ascending wins.
struct Lighter {
  bool operator()(const WeightedEdge& a, const WeightedEdge& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;
    return *a.pair > *b.pair;
  }
};

std::size_t node_count(const CollapsedGraph& g) {
  std::set<std::string> names = g.nodes;
  for (const auto& [pair, w] : g.edges) {
    names.insert(pair.first);
    names.insert(pair.second);
  }
  return names.size();
}

// Connected components of an edge set, as edge sets (components without edges vanish).
std::vector<std::map<AccountPair, double>> components(const std::map<AccountPair, double>& edges) {
  std::unordered_map<std::string, std::string> parent;
  std::function<const std::string&(const std::string&)> find = [&](const std::string& x) -> const std::string& {
    auto it = parent.find(x);
    if (it->second == x) return it->second;
    const std::string& root = find(it->second);
    it->second = root;
    return it->second;
  };
  for (const auto& [pair, w] : edges) {
    parent.emplace(pair.first, pair.first);
    parent.emplace(pair.second, pair.second);
  }
  for (const auto& [pair, w] : edges) {
    std::string ra = find(pair.first), rb = find(pair.second);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<std::string, std::map<AccountPair, double>> grouped;
  for (const auto& [pair, w] : edges) grouped[find(pair.first)].emplace(pair, w);
  std::vector<std::map<AccountPair, double>> out;
  for (auto& [root, es] : grouped) out.push_back(std::move(es));
  return out;
}

}  // namespace

void ExtractionParams::validate() const {
  check_theta(theta);
  check_threshold(threshold);
  for (const auto& [criterion, m] : criterion_weights)
    if (!(m >= 0.0)) throw ContractError(fmt::format("criterion multiplier for '{}' must be >= 0", criterion));
}

double mean_weight(const std::map<AccountPair, double>& edges) {
  if (edges.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [pair, w] : edges) total += w;
  return total / static_cast<double>(edges.size());
}

std::vector<Hcc> make_hccs(std::vector<std::map<AccountPair, double>> edge_sets) {
  std::vector<Hcc> out;
  for (auto& edges : edge_sets) {
    if (edges.empty()) continue;
    Hcc h;
    std::set<std::string> members;
    for (const auto& [pair, w] : edges) {
      members.insert(pair.first);
      members.insert(pair.second);
    }
    h.members.assign(members.begin(), members.end());
    h.mew = mean_weight(edges);
    h.edges = std::move(edges);
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const Hcc& a, const Hcc& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members.front() < b.members.front();
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<Hcc> extract_fsa_v(const CollapsedGraph& g, double theta, std::uint64_t louvain_seed) {
  check_theta(theta);
  if (g.edges.empty()) return {};
  const double g_mean = mean_weight(g.edges);
  const Partition communities = louvain_communities(g, louvain_seed);

  std::unordered_map<std::string_view, std::size_t> community_of;
  for (std::size_t c = 0; c < communities.size(); ++c)
    for (const auto& v : communities[c]) community_of.emplace(v, c);

  // In-community adjacency.
  std::vector<std::vector<WeightedEdge>> community_edges(communities.size());
  std::unordered_map<std::string_view, std::vector<WeightedEdge>> incident;
  for (const auto& [pair, w] : g.edges) {
    auto ca = community_of.at(pair.first);
    if (ca != community_of.at(pair.second)) continue;
    community_edges[ca].push_back({&pair, w});
    incident[pair.first].push_back({&pair, w});
    incident[pair.second].push_back({&pair, w});
  }

  std::vector<std::map<AccountPair, double>> kept;
  for (std::size_t c = 0; c < communities.size(); ++c) {
    const auto& edges = community_edges[c];
    if (edges.empty()) continue;  // singleton or edgeless community
    const WeightedEdge heaviest = *std::max_element(edges.begin(), edges.end(), Lighter{});

    std::map<AccountPair, double> candidate;
    std::unordered_set<std::string_view> nodes;
    std::priority_queue<WeightedEdge, std::vector<WeightedEdge>, Lighter> frontier;
    double sum = 0.0;
    auto add_edge = [&](const WeightedEdge& e) {
      candidate.emplace(*e.pair, e.weight);
      sum += e.weight;
      for (const std::string* v : {&e.pair->first, &e.pair->second})
        if (nodes.insert(*v).second)
          for (const auto& adj : incident[*v])
            if (!candidate.count(*adj.pair)) frontier.push(adj);
    };
    add_edge(heaviest);

    while (true) {
      while (!frontier.empty() && candidate.count(*frontier.top().pair)) frontier.pop();
      if (frontier.empty()) break;  // no adjacent unused edge remains
      const WeightedEdge next = frontier.top();
      const double n = static_cast<double>(candidate.size());
      const double old_mean = sum / n;
      const double new_mean = (sum + next.weight) / (n + 1.0);
      if (new_mean < g_mean || new_mean < old_mean * theta) break;
      frontier.pop();
      add_edge(next);
    }
    if (sum / static_cast<double>(candidate.size()) > g_mean) kept.push_back(std::move(candidate));
  }
  return make_hccs(std::move(kept));
}

std::vector<Hcc> extract_fsa_v(const Lcn& lcn, double theta, std::uint64_t louvain_seed,
                               const CriterionWeights& multipliers) {
  return extract_fsa_v(collapse_edges(lcn, multipliers), theta, louvain_seed);
}

std::vector<Hcc> extract_knn(const CollapsedGraph& g) {
  const std::size_t n = node_count(g);
  if (n < 2 || g.edges.empty()) return {};
  const auto k = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));

  std::unordered_map<std::string_view, std::vector<WeightedEdge>> incident;
  for (const auto& [pair, w] : g.edges) {
    incident[pair.first].push_back({&pair, w});
    incident[pair.second].push_back({&pair, w});
  }
  std::map<AccountPair, double> retained;
  for (auto& [node, edges] : incident) {
    const std::size_t keep = std::min(k, edges.size());
    std::partial_sort(edges.begin(), edges.begin() + static_cast<long>(keep), edges.end(),
                      [](const WeightedEdge& a, const WeightedEdge& b) { return Lighter{}(b, a); });
    for (std::size_t i = 0; i < keep; ++i) retained.emplace(*edges[i].pair, edges[i].weight);
  }
  return make_hccs(components(retained));
}

std::vector<Hcc> extract_knn(const Lcn& lcn, const CriterionWeights& multipliers) {
  return extract_knn(collapse_edges(lcn, multipliers));
}

std::vector<Hcc> extract_threshold(const CollapsedGraph& g, double threshold) {
  check_threshold(threshold);
  if (g.edges.empty()) return {};
  double max_w = 0.0;
  for (const auto& [pair, w] : g.edges) max_w = std::max(max_w, w);
  std::map<AccountPair, double> retained;
  for (const auto& [pair, w] : g.edges)
    if (!(w / max_w < threshold)) retained.emplace(pair, w);
  return make_hccs(components(retained));
}

std::vector<Hcc> extract_threshold(const Lcn& lcn, double threshold, const CriterionWeights& multipliers) {
  return extract_threshold(collapse_edges(lcn, multipliers), threshold);
}

std::vector<Hcc> extract_hccs(const Lcn& lcn, const ExtractionParams& params) {
  params.validate();
  const CollapsedGraph g = collapse_edges(lcn, params.criterion_weights);
  switch (params.method) {
    case ExtractionMethod::FsaV: return extract_fsa_v(g, params.theta, params.louvain_seed);
    case ExtractionMethod::Knn: return extract_knn(g);
    case ExtractionMethod::Threshold: return extract_threshold(g, params.threshold);
  }
  return {};
}

void write_hccs_csv(std::ostream& out, const std::vector<Hcc>& hccs) {
  csv::write_row(out, {"hcc_id", "account_id"});
  for (const auto& h : hccs)
    for (const auto& m : h.members) csv::write_row(out, {std::to_string(h.id), m});
}

void write_hcc_edges_csv(std::ostream& out, const std::vector<Hcc>& hccs) {
  csv::write_row(out, {"hcc_id", "node_a", "node_b", "weight"});
  for (const auto& h : hccs)
    for (const auto& [pair, w] : h.edges)
      csv::write_row(out, {std::to_string(h.id), pair.first, pair.second, csv::format_number(w)});
}

std::vector<Hcc> read_hccs_csv(std::istream& members, std::istream* edges) {
  csv::Table table(members);
  auto c_id = table.column("hcc_id"), c_acc = table.column("account_id");
  std::map<int, Hcc> by_id;
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("HCC CSV row has wrong column count");
    int id = std::stoi(row[c_id]);
    auto& h = by_id[id];
    h.id = id;
    h.members.push_back(row[c_acc]);
  }
  if (edges) {
    csv::Table et(*edges);
    auto e_id = et.column("hcc_id"), e_a = et.column("node_a"), e_b = et.column("node_b"), e_w = et.column("weight");
    for (const auto& row : et.rows()) {
      if (row.size() != et.header().size()) throw IoError("HCC edge CSV row has wrong column count");
      auto it = by_id.find(std::stoi(row[e_id]));
      if (it == by_id.end()) throw IoError(fmt::format("HCC edge CSV references unknown hcc_id {}", row[e_id]));
      it->second.edges[make_pair_key(row[e_a], row[e_b])] = std::stod(row[e_w]);
    }
  }
  std::vector<Hcc> out;
  for (auto& [id, h] : by_id) {
    std::sort(h.members.begin(), h.members.end());
    h.members.erase(std::unique(h.members.begin(), h.members.end()), h.members.end());
    h.mew = mean_weight(h.edges);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace findhccs
