#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "findhccs/evidence.hpp"
#include "findhccs/types.hpp"

namespace findhccs {

/// Latent coordination network: undirected, one multi-edge per account pair
/// carrying a weight per criterion. Zero-weight entries are never stored.
struct Lcn {
  std::set<AccountId> nodes;
  std::map<AccountPair, std::map<std::string, double>> edges;
  std::optional<WindowIndex> window_index;

  bool operator==(const Lcn&) const = default;
};

/// Undirected single-weight graph; weights strictly positive.
struct CollapsedGraph {
  std::set<std::string> nodes;
  std::map<AccountPair, double> edges;

  bool operator==(const CollapsedGraph&) const = default;
};

using CriterionWeights = std::map<std::string, double>;

/// One window's LCN. All pairs must share a window index.
Lcn build_lcn(const std::vector<EvidencePair>& pairs);

/// Groups evidence by window and builds one LCN per window, keyed by index.
std::map<WindowIndex, Lcn> build_window_lcns(const std::vector<EvidencePair>& pairs);

/// w(e) = sum over criteria of multiplier * w^c(e); missing multipliers are 1.
CollapsedGraph collapse_edges(const Lcn& lcn, const CriterionWeights& multipliers = {});

/// Union of nodes, per-criterion weights summed. Each weight is the sum of its
/// contributions in ascending order, so the result is independent of input order.
Lcn aggregate_lcns(std::span<const Lcn> lcns);

/// sum_{x=0}^{T-1} history[x] * alpha^x, history[0] being the current window.
/// Entries past the end of history count as zero.
double decayed_weight(std::span<const double> history, double alpha, int frame_windows);

/// LCN of the sliding frame ending at window t: union of windows t-T+1..t with
/// each window's weights scaled by alpha^(t - window).
Lcn sliding_frame(const std::map<WindowIndex, Lcn>& windows, WindowIndex t, int frame_windows, double alpha);

/// Aggregate over every window t of the collection span of sliding_frame(t).
/// With frame_windows == 1 this equals aggregate_lcns of the windows exactly.
Lcn decayed_aggregate(const std::map<WindowIndex, Lcn>& windows, int frame_windows, double alpha);

struct LcnSummary {
  WindowIndex window_index = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double total_weight = 0.0;
};

LcnSummary summarize(const Lcn& lcn);

void write_lcn_csv(std::ostream& out, const Lcn& lcn);
Lcn read_lcn_csv(std::istream& in);
void write_collapsed_csv(std::ostream& out, const CollapsedGraph& g);

}  // namespace findhccs
