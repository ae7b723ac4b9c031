#include "netfuse/consensus.hpp"

#include <algorithm>
#include <set>

#include "netfuse/matrix_io.hpp"
#include "netfuse/parallel.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

std::string_view to_string(Denominator d) { return d == Denominator::Exposure ? "exposure" : "total"; }

Denominator parse_denominator(std::string_view s) {
  if (s == "exposure") return Denominator::Exposure;
  if (s == "total") return Denominator::Total;
  throw Error(ErrorCode::InvalidArgument, "unknown denominator '" + std::string(s) + "'");
}

CooccurrenceGraph::CooccurrenceGraph(NodeRoster roster, std::vector<std::uint32_t> counts,
                                     std::vector<std::uint32_t> exposure, std::uint32_t total_runs,
                                     Denominator denominator)
    : roster_(std::move(roster)),
      counts_(std::move(counts)),
      exposure_(std::move(exposure)),
      total_runs_(total_runs),
      denominator_(denominator) {
  const std::size_t n = roster_.size();
  if (counts_.size() != n * n || exposure_.size() != n * n)
    throw Error(ErrorCode::InvalidArgument, "co-occurrence tables do not match the roster");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto k = i * n + j;
      if (counts_[k] > exposure_[k] || exposure_[k] > total_runs_)
        throw Error(ErrorCode::RangeError, "co-occurrence bookkeeping broken at (" + roster_.id(i) + "," +
                                               roster_.id(j) + ")");
    }
}

double CooccurrenceGraph::weight(std::size_t i, std::size_t j) const {
  const std::uint32_t den = denominator_ == Denominator::Exposure ? exposure(i, j) : total_runs_;
  if (den == 0) return 0.0;
  return static_cast<double>(count(i, j)) / static_cast<double>(den);
}

std::uint64_t ensemble_seed(std::uint64_t master_seed, std::size_t matrix, std::size_t run) {
  return derive_seed(master_seed, matrix, run);
}

std::uint64_t final_seed(std::uint64_t master_seed) { return derive_seed(master_seed, ~std::uint64_t{0}, 0); }

CooccurrenceGraph run_ensemble(const std::vector<SimilarityMatrix>& matrices, int runs_per_matrix,
                               std::uint64_t master_seed, const EnsembleOptions& opts) {
  if (runs_per_matrix < 1) throw Error(ErrorCode::InvalidArgument, "runs_per_matrix must be >= 1");
  if (matrices.empty()) throw Error(ErrorCode::EmptyInput, "no matrices for the ensemble");

  std::set<std::string> all;
  for (const auto& m : matrices) all.insert(m.roster().ids().begin(), m.roster().ids().end());
  NodeRoster roster(std::vector<std::string>(all.begin(), all.end()));
  const std::size_t n = roster.size();

  std::vector<std::vector<std::size_t>> to_global(matrices.size());
  std::vector<WeightedGraph> graphs;
  graphs.reserve(matrices.size());
  std::vector<std::uint32_t> exposure(n * n, 0);
  const auto runs = static_cast<std::uint32_t>(runs_per_matrix);
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    for (const auto& id : matrices[m].roster().ids()) to_global[m].push_back(roster.index_of(id));
    const auto& g = to_global[m];
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) exposure[std::min(g[a], g[b]) * n + std::max(g[a], g[b])] += runs;
    graphs.push_back(graph_from_similarity(matrices[m]));
  }

  const std::size_t tasks = matrices.size() * static_cast<std::size_t>(runs_per_matrix);
  const std::size_t workers = worker_count(tasks, opts.jobs);
  std::vector<std::vector<std::uint32_t>> partial(workers, std::vector<std::uint32_t>(n * n, 0));
  parallel_for(tasks, opts.jobs, [&](std::size_t task, std::size_t worker) {
    const std::size_t m = task / static_cast<std::size_t>(runs_per_matrix);
    const std::size_t r = task % static_cast<std::size_t>(runs_per_matrix);
    const Partition p = louvain(graphs[m], ensemble_seed(master_seed, m, r), opts.louvain);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(p.communities()));
    for (std::size_t i = 0; i < p.assignment.size(); ++i)
      members[static_cast<std::size_t>(p.assignment[i])].push_back(to_global[m][i]);
    auto& counts = partial[worker];
    for (auto& group : members) {
      std::sort(group.begin(), group.end());
      for (std::size_t a = 0; a < group.size(); ++a)
        for (std::size_t b = a + 1; b < group.size(); ++b) ++counts[group[a] * n + group[b]];
    }
  });

  // integer sums commute, so the merge is independent of how tasks were scheduled
  std::vector<std::uint32_t> counts(n * n, 0);
  for (const auto& part : partial)
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += part[k];

  return CooccurrenceGraph(std::move(roster), std::move(counts), std::move(exposure),
                           runs * static_cast<std::uint32_t>(matrices.size()), opts.denominator);
}

WeightedGraph threshold_graph(const CooccurrenceGraph& c, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0,1]");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double w = c.weight(i, j);
      if (w >= tau && w > 0.0) edges.push_back({i, j, w});
    }
  return WeightedGraph(c.roster(), std::move(edges));
}

ConsensusResult final_partition(const WeightedGraph& g, std::uint64_t seed, const LouvainOptions& opts) {
  ConsensusResult out;
  std::vector<std::size_t> keep;
  std::vector<std::size_t> sub_index(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.degrees()[i] > 0.0) {
      sub_index[i] = keep.size();
      keep.push_back(i);
    } else {
      out.isolates.push_back(g.roster().id(i));
    }
  }
  std::vector<std::string> ids;
  for (auto i : keep) ids.push_back(g.roster().id(i));
  out.members = NodeRoster(std::move(ids));
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const auto& e : g.edges()) edges.push_back({sub_index[e.i], sub_index[e.j], e.weight});
  out.partition = louvain(WeightedGraph(out.members, std::move(edges)), seed, opts);
  return out;
}

ConsensusResult consensus(const std::vector<SimilarityMatrix>& matrices, int runs_per_matrix, double tau,
                          std::uint64_t master_seed, const EnsembleOptions& opts) {
  const CooccurrenceGraph c = run_ensemble(matrices, runs_per_matrix, master_seed, opts);
  ConsensusResult r = final_partition(threshold_graph(c, tau), final_seed(master_seed), opts.louvain);
  r.threshold = tau;
  r.runs_per_matrix = runs_per_matrix;
  return r;
}

std::string format_cooccurrence_csv(const CooccurrenceGraph& c) {
  std::string out = "node_a,node_b,count,exposure,weight\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (c.count(i, j) == 0) continue;
      out += c.roster().id(i) + "," + c.roster().id(j) + "," + std::to_string(c.count(i, j)) + "," +
             std::to_string(c.exposure(i, j)) + "," + format_double(c.weight(i, j)) + "\n";
    }
  return out;
}

}  // namespace netfuse
