#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netfuse/community.hpp"
#include "netfuse/core_model.hpp"

namespace netfuse {

// Exposure: runs in which both nodes were present. Total: all runs pooled.
enum class Denominator { Exposure, Total };
std::string_view to_string(Denominator d);
Denominator parse_denominator(std::string_view s);

class CooccurrenceGraph {
 public:
  CooccurrenceGraph(NodeRoster roster, std::vector<std::uint32_t> counts, std::vector<std::uint32_t> exposure,
                    std::uint32_t total_runs, Denominator denominator);

  const NodeRoster& roster() const noexcept { return roster_; }
  std::size_t size() const noexcept { return roster_.size(); }
  std::uint32_t count(std::size_t i, std::size_t j) const { return counts_[index(i, j)]; }
  std::uint32_t exposure(std::size_t i, std::size_t j) const { return exposure_[index(i, j)]; }
  std::uint32_t total_runs() const noexcept { return total_runs_; }
  Denominator denominator() const noexcept { return denominator_; }
  // count / denominator; 0 when the pair was never exposed.
  double weight(std::size_t i, std::size_t j) const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return i < j ? i * size() + j : j * size() + i; }

  NodeRoster roster_;
  std::vector<std::uint32_t> counts_;    // upper triangle used
  std::vector<std::uint32_t> exposure_;  // upper triangle used
  std::uint32_t total_runs_;
  Denominator denominator_;
};

struct EnsembleOptions {
  Denominator denominator = Denominator::Exposure;
  int jobs = 1;
  LouvainOptions louvain;
};

// Seed of run r on matrix m.
std::uint64_t ensemble_seed(std::uint64_t master_seed, std::size_t matrix, std::size_t run);
std::uint64_t final_seed(std::uint64_t master_seed);

CooccurrenceGraph run_ensemble(const std::vector<SimilarityMatrix>& matrices, int runs_per_matrix,
                               std::uint64_t master_seed, const EnsembleOptions& opts = {});

// Pairs with weight >= tau become edges weighted by their co-occurrence frequency.
WeightedGraph threshold_graph(const CooccurrenceGraph& c, double tau = 0.8);

struct ConsensusResult {
  NodeRoster members;  // non-isolates, roster order
  Partition partition;
  std::vector<std::string> isolates;
  double threshold = 0.8;
  int runs_per_matrix = 0;
};

// Isolates (degree 0) are set aside; one seeded Louvain run on the rest.
ConsensusResult final_partition(const WeightedGraph& g, std::uint64_t seed, const LouvainOptions& opts = {});

ConsensusResult consensus(const std::vector<SimilarityMatrix>& matrices, int runs_per_matrix, double tau,
                          std::uint64_t master_seed, const EnsembleOptions& opts = {});

std::string format_cooccurrence_csv(const CooccurrenceGraph& c);

}  // namespace netfuse
