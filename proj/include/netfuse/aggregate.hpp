#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "netfuse/community.hpp"
#include "netfuse/core_model.hpp"

namespace netfuse {

struct GroupMatrix {
  std::vector<int> groups;                         // community ids, ascending
  std::vector<std::vector<std::string>> members;   // per group, roster order
  Dense values;                                    // mean inter-/intra-group similarity
  std::vector<bool> singleton;                     // within-value is the convention 1
};

// values[g,h] = mean of s[i,j] over i in g, j in h (i != j when g == h).
// The matrix is restricted to the partition's nodes first.
GroupMatrix shrink(const SimilarityMatrix& s, const NodeRoster& nodes, const std::vector<int>& assignment);

struct GroupEdge {
  std::size_t a;  // index into GroupMatrix::groups, a < b
  std::size_t b;
  double weight;
};

// The ceil(fraction * E) heaviest off-diagonal pairs, ties by (a, b).
std::vector<GroupEdge> top_edges(const GroupMatrix& g, double fraction = 0.10);

enum class GraphFormat { GraphML, Gexf, Csv };
std::string_view to_string(GraphFormat f);
GraphFormat parse_graph_format(std::string_view s);

struct ExportNode {
  std::string id;
  std::string label;
  int community = -1;
  bool isolate = false;
  double size = 1.0;
  double within = 0.0;
};

struct ExportEdge {
  std::string source;
  std::string target;
  double weight;
};

std::string format_graph(const std::vector<ExportNode>& nodes, const std::vector<ExportEdge>& edges, GraphFormat format);
void export_graph(const std::filesystem::path& path, const std::vector<ExportNode>& nodes,
                  const std::vector<ExportEdge>& edges, GraphFormat format);

// Group-level nodes and the retained edges, ready for export.
void group_graph(const GroupMatrix& g, const std::vector<GroupEdge>& edges, std::vector<ExportNode>& nodes_out,
                 std::vector<ExportEdge>& edges_out);

}  // namespace netfuse
