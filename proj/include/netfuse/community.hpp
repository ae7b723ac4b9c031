#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netfuse/core_model.hpp"

namespace netfuse {

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

// Undirected, positively weighted, no self-loops; edges stored with i < j.
class WeightedGraph {
 public:
  WeightedGraph(NodeRoster roster, std::vector<Edge> edges);

  const NodeRoster& roster() const noexcept { return roster_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return roster_.size(); }
  const std::vector<double>& degrees() const noexcept { return degree_; }
  // 2m: twice the total edge weight.
  double total_weight() const noexcept { return two_m_; }

 private:
  NodeRoster roster_;
  std::vector<Edge> edges_;
  std::vector<double> degree_;
  double two_m_ = 0.0;
};

// Dense community ids 0..c-1 numbered by first appearance in node order.
struct Partition {
  std::vector<int> assignment;
  double modularity = 0.0;

  int communities() const;
};

struct LouvainOptions {
  double resolution = 1.0;
  double tolerance = 1e-12;  // minimum modularity gain for a move
};

struct LouvainTrace {
  std::vector<double> level_modularity;
};

// Edges (i,j,s_ij) for i < j with s_ij > drop_below.
WeightedGraph graph_from_similarity(const SimilarityMatrix& s, double drop_below = 0.0);

// Weighted Newman modularity; 0 for an edgeless graph.
double modularity(const WeightedGraph& g, const std::vector<int>& assignment, double resolution = 1.0);

// Relabels to dense ids in order of first appearance.
std::vector<int> canonical_labels(const std::vector<int>& assignment);

// Two-phase Louvain with a seeded node-order shuffle per level.
Partition louvain(const WeightedGraph& g, std::uint64_t seed, const LouvainOptions& opts = {},
                  LouvainTrace* trace = nullptr);

// Highest-modularity partition over `runs` seeds derived from `seed` (ties: earliest run).
Partition louvain_best_of(const WeightedGraph& g, std::uint64_t seed, int runs, const LouvainOptions& opts = {});

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

std::string format_partition_csv(const NodeRoster& roster, const std::vector<int>& assignment);
struct LabeledPartition {
  NodeRoster roster;
  std::vector<int> assignment;
};
LabeledPartition parse_partition_csv(std::string_view text, const std::string& source = "<memory>");

}  // namespace netfuse
