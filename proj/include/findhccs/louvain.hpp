#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "findhccs/lcn.hpp"

namespace findhccs {

using Partition = std::vector<std::vector<std::string>>;

/// Weighted-modularity Louvain (local moves, then community aggregation,
/// repeated until no move improves modularity). Node visiting order is a
/// permutation drawn from `seed`, so results replay exactly. Communities are
/// returned with sorted members, ordered by their smallest member; isolated
/// nodes come back as singletons.
Partition louvain_communities(const CollapsedGraph& g, std::uint64_t seed);

/// Newman-Girvan modularity of a partition of g (resolution 1).
double modularity(const CollapsedGraph& g, const Partition& partition);

}  // namespace findhccs
