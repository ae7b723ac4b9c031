#include "netfuse/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "netfuse/matrix_io.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

WeightedGraph::WeightedGraph(NodeRoster roster, std::vector<Edge> edges)
    : roster_(std::move(roster)), edges_(std::move(edges)), degree_(roster_.size(), 0.0) {
  for (const auto& e : edges_) {
    if (e.i >= e.j || e.j >= roster_.size())
      throw Error(ErrorCode::InvalidArgument,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") must satisfy i < j < n");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::RangeError,
                  "edge (" + roster_.id(e.i) + "," + roster_.id(e.j) + ") needs a positive finite weight");
    degree_[e.i] += e.weight;
    degree_[e.j] += e.weight;
    two_m_ += 2.0 * e.weight;
  }
}

int Partition::communities() const {
  return assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
}

WeightedGraph graph_from_similarity(const SimilarityMatrix& s, double drop_below) {
  std::vector<Edge> edges;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (s(i, j) > drop_below && s(i, j) > 0.0) edges.push_back({i, j, s(i, j)});
  return WeightedGraph(s.roster(), std::move(edges));
}

double modularity(const WeightedGraph& g, const std::vector<int>& assignment, double resolution) {
  if (assignment.size() != g.size())
    throw Error(ErrorCode::InvalidArgument, "assignment covers " + std::to_string(assignment.size()) + " of " +
                                                std::to_string(g.size()) + " nodes");
  const double two_m = g.total_weight();
  if (two_m == 0.0) return 0.0;
  std::map<int, double> inside;
  std::map<int, double> total;
  for (const auto& e : g.edges())
    if (assignment[e.i] == assignment[e.j]) inside[assignment[e.i]] += 2.0 * e.weight;
  for (std::size_t i = 0; i < g.size(); ++i) total[assignment[i]] += g.degrees()[i];
  double q = 0.0;
  for (const auto& [c, tot] : total) {
    auto it = inside.find(c);
    const double in = it == inside.end() ? 0.0 : it->second;
    q += in / two_m - resolution * (tot / two_m) * (tot / two_m);
  }
  return q;
}

std::vector<int> canonical_labels(const std::vector<int>& assignment) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto [it, fresh] = remap.emplace(assignment[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

namespace {

// Symmetric adjacency in CSR form; self-loops kept apart so that
// degree = sum of neighbour weights + loop.
struct Csr {
  std::vector<std::size_t> offset;
  std::vector<std::size_t> neighbour;
  std::vector<double> weight;
  std::vector<double> loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return loop.size(); }
};

Csr to_csr(const WeightedGraph& g) {
  const std::size_t n = g.size();
  Csr c;
  c.offset.assign(n + 1, 0);
  for (const auto& e : g.edges()) {
    ++c.offset[e.i + 1];
    ++c.offset[e.j + 1];
  }
  std::partial_sum(c.offset.begin(), c.offset.end(), c.offset.begin());
  c.neighbour.resize(c.offset.back());
  c.weight.resize(c.offset.back());
  std::vector<std::size_t> fill(c.offset.begin(), c.offset.end() - 1);
  for (const auto& e : g.edges()) {
    c.neighbour[fill[e.i]] = e.j;
    c.weight[fill[e.i]++] = e.weight;
    c.neighbour[fill[e.j]] = e.i;
    c.weight[fill[e.j]++] = e.weight;
  }
  c.loop.assign(n, 0.0);
  c.degree = g.degrees();
  c.two_m = g.total_weight();
  return c;
}

double csr_modularity(const Csr& g, const std::vector<std::size_t>& comm, double resolution) {
  const std::size_t n = g.size();
  std::vector<double> in(n, 0.0);
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    tot[comm[i]] += g.degree[i];
    in[comm[i]] += g.loop[i];
    for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e)
      if (comm[g.neighbour[e]] == comm[i]) in[comm[i]] += g.weight[e];
  }
  double q = 0.0;
  for (std::size_t c = 0; c < n; ++c)
    if (tot[c] > 0.0) q += in[c] / g.two_m - resolution * (tot[c] / g.two_m) * (tot[c] / g.two_m);
  return q;
}

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const Csr& g, std::vector<std::size_t>& comm, PortableRng& rng, const LouvainOptions& opts) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  touched.reserve(n);
  const double m = g.two_m / 2.0;
  const double scale = opts.resolution / g.two_m;
  bool any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i : order) {
      const std::size_t old = comm[i];
      const double k = g.degree[i];
      for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e) {
        const std::size_t c = comm[g.neighbour[e]];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += g.weight[e];
      }
      tot[old] -= k;
      const double stay = link[old] - tot[old] * k * scale;
      std::size_t best = old;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (std::size_t c : touched) {
        if (c == old) continue;
        const double gain = link[c] - tot[c] * k * scale;
        if (gain > best_gain || (gain == best_gain && c < best)) {
          best_gain = gain;
          best = c;
        }
      }
      // gains are in weight units; dividing by m converts to modularity
      if (best != old && (best_gain - stay) / m > opts.tolerance) {
        comm[i] = best;
        moved = true;
        any = true;
      } else {
        best = old;
      }
      tot[best] += k;
      for (std::size_t c : touched) link[c] = 0.0;
      touched.clear();
    }
  }
  return any;
}

// Renumbers comm densely (first appearance) and returns the community count.
std::size_t renumber(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> remap(comm.size(), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (auto& c : comm) {
    if (remap[c] == static_cast<std::size_t>(-1)) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

Csr aggregate(const Csr& g, const std::vector<std::size_t>& comm, std::size_t count) {
  std::vector<std::map<std::size_t, double>> rows(count);
  Csr out;
  out.loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.two_m = g.two_m;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t ci = comm[i];
    out.loop[ci] += g.loop[i];
    out.degree[ci] += g.degree[i];
    for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e) {
      const std::size_t cj = comm[g.neighbour[e]];
      if (cj == ci)
        out.loop[ci] += g.weight[e];
      else
        rows[ci][cj] += g.weight[e];
    }
  }
  out.offset.assign(count + 1, 0);
  for (std::size_t c = 0; c < count; ++c) out.offset[c + 1] = out.offset[c] + rows[c].size();
  out.neighbour.reserve(out.offset.back());
  out.weight.reserve(out.offset.back());
  for (std::size_t c = 0; c < count; ++c)
    for (const auto& [d, w] : rows[c]) {
      out.neighbour.push_back(d);
      out.weight.push_back(w);
    }
  return out;
}

}  // namespace

Partition louvain(const WeightedGraph& g, std::uint64_t seed, const LouvainOptions& opts, LouvainTrace* trace) {
  const std::size_t n = g.size();
  Partition result;
  result.assignment.resize(n);
  std::iota(result.assignment.begin(), result.assignment.end(), 0);
  if (g.total_weight() == 0.0 || n == 0) {
    result.modularity = 0.0;
    if (trace) trace->level_modularity.assign(1, 0.0);
    return result;
  }

  PortableRng rng(seed);
  Csr level = to_csr(g);
  std::vector<std::size_t> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0);
  if (trace) {
    trace->level_modularity.clear();
    trace->level_modularity.push_back(csr_modularity(level, node_comm, opts.resolution));
  }

  while (true) {
    std::vector<std::size_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = move_nodes(level, comm, rng, opts);
    if (!moved) break;
    const std::size_t count = renumber(comm);
    for (auto& c : node_comm) c = comm[c];
    if (trace) trace->level_modularity.push_back(csr_modularity(level, comm, opts.resolution));
    if (count == level.size()) break;
    level = aggregate(level, comm, count);
  }

  for (std::size_t i = 0; i < n; ++i) result.assignment[i] = static_cast<int>(node_comm[i]);
  result.assignment = canonical_labels(result.assignment);
  result.modularity = modularity(g, result.assignment, opts.resolution);
  return result;
}

Partition louvain_best_of(const WeightedGraph& g, std::uint64_t seed, int runs, const LouvainOptions& opts) {
  if (runs < 1) throw Error(ErrorCode::InvalidArgument, "best-of needs at least one run");
  Partition best = louvain(g, seed, opts);
  for (int r = 1; r < runs; ++r) {
    Partition p = louvain(g, derive_seed(seed, 0, static_cast<std::uint64_t>(r)), opts);
    if (p.modularity > best.modularity) best = std::move(p);
  }
  return best;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "partitions differ in size");
  const auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra;
  std::map<int, double> rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [k, v] : joint) index += comb2(v);
  double sa = 0.0;
  double sb = 0.0;
  for (const auto& [k, v] : ra) sa += comb2(v);
  for (const auto& [k, v] : rb) sb += comb2(v);
  const double total = comb2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sa * sb / total : 0.0;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;  // both trivial (all-singletons or single block)
  return (index - expected) / (max_index - expected);
}

std::string format_partition_csv(const NodeRoster& roster, const std::vector<int>& assignment) {
  std::string out = "node_id,community\n";
  for (std::size_t i = 0; i < roster.size(); ++i) out += roster.id(i) + "," + std::to_string(assignment.at(i)) + "\n";
  return out;
}

LabeledPartition parse_partition_csv(std::string_view text, const std::string& source) {
  std::vector<std::string> ids;
  std::vector<int> assignment;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    std::string_view line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    start = pos == std::string_view::npos ? text.size() : pos + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || (lineno == 1 && line == "node_id,community")) continue;
    auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(lineno) + ": expected node_id,community");
    ids.emplace_back(line.substr(0, comma));
    const double c = parse_double(line.substr(comma + 1), source + ":" + std::to_string(lineno));
    if (c < 0 || c != std::floor(c))
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(lineno) + ": community must be a nonnegative integer");
    assignment.push_back(static_cast<int>(c));
  }
  return {NodeRoster(std::move(ids)), std::move(assignment)};
}

}  // namespace netfuse
