#include "findhccs/lcn.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "findhccs/csv.hpp"

namespace findhccs {

namespace {

using Contributions = std::map<AccountPair, std::map<std::string, std::vector<double>>>;

double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

Lcn finish(std::set<AccountId> nodes, Contributions& contributions) {
  Lcn out;
  out.nodes = std::move(nodes);
  for (auto& [pair, by_criterion] : contributions) {
    std::map<std::string, double> weights;
    for (auto& [criterion, values] : by_criterion) {
      double w = sorted_sum(values);
      if (w > 0.0) weights.emplace(criterion, w);
    }
    if (!weights.empty()) out.edges.emplace(pair, std::move(weights));
  }
  return out;
}

}  // namespace

Lcn build_lcn(const std::vector<EvidencePair>& pairs) {
  Lcn lcn;
  if (pairs.empty()) return lcn;
  lcn.window_index = pairs.front().window_index;
  for (const auto& p : pairs) {
    if (p.window_index != *lcn.window_index)
      throw ContractError(fmt::format("build_lcn received pairs from windows {} and {}", *lcn.window_index, p.window_index));
    if (p.account_a == p.account_b) throw ContractError(fmt::format("self-pair for account '{}'", p.account_a));
    if (p.weight <= 0) continue;
    lcn.nodes.insert(p.account_a);
    lcn.nodes.insert(p.account_b);
    lcn.edges[make_pair_key(p.account_a, p.account_b)][p.criterion] += static_cast<double>(p.weight);
  }
  return lcn;
}

std::map<WindowIndex, Lcn> build_window_lcns(const std::vector<EvidencePair>& pairs) {
  std::map<WindowIndex, std::vector<EvidencePair>> grouped;
  for (const auto& p : pairs) grouped[p.window_index].push_back(p);
  std::map<WindowIndex, Lcn> out;
  for (const auto& [w, group] : grouped) out.emplace(w, build_lcn(group));
  return out;
}

CollapsedGraph collapse_edges(const Lcn& lcn, const CriterionWeights& multipliers) {
  for (const auto& [criterion, m] : multipliers)
    if (!(m >= 0.0)) throw ContractError(fmt::format("criterion multiplier for '{}' must be >= 0", criterion));
  CollapsedGraph g;
  g.nodes = lcn.nodes;
  for (const auto& [pair, weights] : lcn.edges) {
    double total = 0.0;
    for (const auto& [criterion, w] : weights) {
      auto it = multipliers.find(criterion);
      total += (it == multipliers.end() ? 1.0 : it->second) * w;
    }
    if (total > 0.0) g.edges.emplace(pair, total);
  }
  return g;
}

Lcn aggregate_lcns(std::span<const Lcn> lcns) {
  if (lcns.size() == 1) {
    Lcn out = lcns.front();
    out.window_index.reset();
    return out;
  }
  std::set<AccountId> nodes;
  Contributions contributions;
  for (const auto& lcn : lcns) {
    nodes.insert(lcn.nodes.begin(), lcn.nodes.end());
    for (const auto& [pair, weights] : lcn.edges)
      for (const auto& [criterion, w] : weights) contributions[pair][criterion].push_back(w);
  }
  return finish(std::move(nodes), contributions);
}

double decayed_weight(std::span<const double> history, double alpha, int frame_windows) {
  if (frame_windows < 1) throw ContractError("sliding frame width T must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError(fmt::format("decay alpha must lie in (0, 1] (got {})", alpha));
  double total = 0.0;
  const std::size_t n = std::min<std::size_t>(history.size(), static_cast<std::size_t>(frame_windows));
  for (std::size_t x = 0; x < n; ++x) total += history[x] * std::pow(alpha, static_cast<double>(x));
  return total;
}

namespace {

void check_frame(int frame_windows, double alpha) {
  if (frame_windows < 1) throw ContractError("sliding frame width T must be >= 1");
  // alpha only matters for windows before the current one.
  if (frame_windows > 1 && !(alpha > 0.0 && alpha <= 1.0))
    throw ContractError(fmt::format("decay alpha must lie in (0, 1] when T > 1 (got {})", alpha));
}

void add_frame(const std::map<WindowIndex, Lcn>& windows, WindowIndex t, int frame_windows, double alpha,
               std::set<AccountId>& nodes, Contributions& contributions) {
  for (int x = 0; x < frame_windows; ++x) {
    auto it = windows.find(t - x);
    if (it == windows.end()) continue;
    const double factor = x == 0 ? 1.0 : std::pow(alpha, static_cast<double>(x));
    nodes.insert(it->second.nodes.begin(), it->second.nodes.end());
    for (const auto& [pair, weights] : it->second.edges)
      for (const auto& [criterion, w] : weights) contributions[pair][criterion].push_back(w * factor);
  }
}

}  // namespace

Lcn sliding_frame(const std::map<WindowIndex, Lcn>& windows, WindowIndex t, int frame_windows, double alpha) {
  check_frame(frame_windows, alpha);
  std::set<AccountId> nodes;
  Contributions contributions;
  add_frame(windows, t, frame_windows, alpha, nodes, contributions);
  Lcn out = finish(std::move(nodes), contributions);
  out.window_index = t;
  return out;
}

Lcn decayed_aggregate(const std::map<WindowIndex, Lcn>& windows, int frame_windows, double alpha) {
  check_frame(frame_windows, alpha);
  if (windows.empty()) return {};
  // Frames ending in windows with no data in reach are empty; skip them.
  std::set<WindowIndex> frame_ends;
  const WindowIndex last = windows.rbegin()->first;
  for (const auto& [w, lcn] : windows)
    for (WindowIndex t = w; t < w + frame_windows && t <= last; ++t) frame_ends.insert(t);

  std::set<AccountId> nodes;
  Contributions contributions;
  for (WindowIndex t : frame_ends) {
    // A frame's weight for (edge, criterion) is its own sorted sum; the
    // aggregate then sums the frames.
    std::set<AccountId> frame_nodes;
    Contributions frame;
    add_frame(windows, t, frame_windows, alpha, frame_nodes, frame);
    nodes.insert(frame_nodes.begin(), frame_nodes.end());
    for (auto& [pair, by_criterion] : frame)
      for (auto& [criterion, values] : by_criterion) contributions[pair][criterion].push_back(sorted_sum(values));
  }
  return finish(std::move(nodes), contributions);
}

LcnSummary summarize(const Lcn& lcn) {
  LcnSummary s;
  s.window_index = lcn.window_index.value_or(-1);
  s.nodes = lcn.nodes.size();
  s.edges = lcn.edges.size();
  for (const auto& [pair, weights] : lcn.edges)
    for (const auto& [criterion, w] : weights) s.total_weight += w;
  return s;
}

void write_lcn_csv(std::ostream& out, const Lcn& lcn) {
  csv::write_row(out, {"node_a", "node_b", "criterion", "weight"});
  for (const auto& [pair, weights] : lcn.edges)
    for (const auto& [criterion, w] : weights)
      csv::write_row(out, {pair.first, pair.second, criterion, csv::format_number(w)});
}

Lcn read_lcn_csv(std::istream& in) {
  csv::Table table(in);
  auto c_a = table.column("node_a"), c_b = table.column("node_b"), c_c = table.column("criterion"),
       c_w = table.column("weight");
  Lcn lcn;
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("LCN CSV row has wrong column count");
    double w = std::stod(row[c_w]);
    if (row[c_a] == row[c_b]) throw IoError(fmt::format("LCN CSV contains a self-loop on '{}'", row[c_a]));
    if (w <= 0.0) continue;
    lcn.nodes.insert(row[c_a]);
    lcn.nodes.insert(row[c_b]);
    lcn.edges[make_pair_key(row[c_a], row[c_b])][row[c_c]] += w;
  }
  return lcn;
}

void write_collapsed_csv(std::ostream& out, const CollapsedGraph& g) {
  csv::write_row(out, {"node_a", "node_b", "weight"});
  for (const auto& [pair, w] : g.edges) csv::write_row(out, {pair.first, pair.second, csv::format_number(w)});
}

}  // namespace findhccs
