#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "findhccs/lcn.hpp"
#include "findhccs/louvain.hpp"

namespace findhccs {

/// A highly coordinating community.
struct Hcc {
  int id = 0;
  std::vector<AccountId> members;          // sorted, >= 2
  std::map<AccountPair, double> edges;     // collapsed weights
  double mew = 0.0;                        // mean edge weight

  bool operator==(const Hcc&) const = default;
};

enum class ExtractionMethod { FsaV, Knn, Threshold };

ExtractionMethod extraction_method_from_string(std::string_view name);
std::string_view to_string(ExtractionMethod m);

struct ExtractionParams {
  ExtractionMethod method = ExtractionMethod::FsaV;
  double theta = 0.3;
  double threshold = 0.1;
  std::uint64_t louvain_seed = 0;
  CriterionWeights criterion_weights;  // per-criterion multipliers, default 1

  void validate() const;
};

double mean_weight(const std::map<AccountPair, double>& edges);

/// FSA_V: Louvain partition, then per community grow a candidate from its
/// heaviest edge, adding the heaviest adjacent edge until the candidate mean
/// would drop below the graph mean or below theta times its current mean.
/// Candidates whose mean exceeds the graph mean are kept.
/// Heaviest means weight descending, then endpoint pair ascending.
std::vector<Hcc> extract_fsa_v(const CollapsedGraph& g, double theta, std::uint64_t louvain_seed = 0);
std::vector<Hcc> extract_fsa_v(const Lcn& lcn, double theta, std::uint64_t louvain_seed = 0,
                               const CriterionWeights& multipliers = {});

/// Keeps an edge if it is among the k = ceil(ln |V|) heaviest edges of either
/// endpoint; HCCs are the connected components with at least two nodes.
std::vector<Hcc> extract_knn(const CollapsedGraph& g);
std::vector<Hcc> extract_knn(const Lcn& lcn, const CriterionWeights& multipliers = {});

/// Drops edges whose weight divided by the maximum weight is below threshold;
/// HCCs are the remaining connected components with at least two nodes.
std::vector<Hcc> extract_threshold(const CollapsedGraph& g, double threshold);
std::vector<Hcc> extract_threshold(const Lcn& lcn, double threshold, const CriterionWeights& multipliers = {});

std::vector<Hcc> extract_hccs(const Lcn& lcn, const ExtractionParams& params);

/// Builds HCCs from edge lists: members are the edge endpoints, ids are
/// assigned after sorting by size (descending) then smallest member.
std::vector<Hcc> make_hccs(std::vector<std::map<AccountPair, double>> edge_sets);

void write_hccs_csv(std::ostream& out, const std::vector<Hcc>& hccs);
void write_hcc_edges_csv(std::ostream& out, const std::vector<Hcc>& hccs);
/// Reads hcc_id,account_id membership plus optional hcc_id,node_a,node_b,weight edges.
std::vector<Hcc> read_hccs_csv(std::istream& members, std::istream* edges = nullptr);

}  // namespace findhccs
