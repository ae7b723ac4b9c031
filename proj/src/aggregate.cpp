#include "netfuse/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "netfuse/matrix_io.hpp"

namespace netfuse {

GroupMatrix shrink(const SimilarityMatrix& s, const NodeRoster& nodes, const std::vector<int>& assignment) {
  if (assignment.size() != nodes.size())
    throw Error(ErrorCode::InvalidArgument, "partition assignment does not match its roster");
  const SimilarityMatrix sub = s.restrict_to(nodes);

  std::map<int, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < nodes.size(); ++i) by_group[assignment[i]].push_back(i);

  GroupMatrix out;
  std::vector<std::vector<std::size_t>> idx;
  for (auto& [g, m] : by_group) {
    out.groups.push_back(g);
    std::vector<std::string> names;
    for (auto i : m) names.push_back(nodes.id(i));
    out.members.push_back(std::move(names));
    idx.push_back(std::move(m));
  }
  const std::size_t k = out.groups.size();
  out.values = Dense::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  out.singleton.assign(k, false);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double sum = 0.0;
      std::size_t count = 0;
      for (auto i : idx[a])
        for (auto j : idx[b]) {
          if (a == b && i == j) continue;
          sum += sub(i, j);
          ++count;
        }
      double v = 1.0;
      if (count > 0)
        v = sum / static_cast<double>(count);
      else
        out.singleton[a] = true;
      out.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      out.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  }
  return out;
}

std::vector<GroupEdge> top_edges(const GroupMatrix& g, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0,1]");
  std::vector<GroupEdge> all;
  const std::size_t k = g.groups.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      all.push_back({a, b, g.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))});
  // the small slack keeps products such as 0.1 * 30 from rounding up past an integer
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(all.size()) - 1e-9));
  std::stable_sort(all.begin(), all.end(), [](const GroupEdge& x, const GroupEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  all.resize(std::min(keep, all.size()));
  return all;
}

std::string_view to_string(GraphFormat f) {
  switch (f) {
    case GraphFormat::GraphML: return "graphml";
    case GraphFormat::Gexf: return "gexf";
    case GraphFormat::Csv: return "csv";
  }
  return "unknown";
}

GraphFormat parse_graph_format(std::string_view s) {
  if (s == "graphml") return GraphFormat::GraphML;
  if (s == "gexf") return GraphFormat::Gexf;
  if (s == "csv") return GraphFormat::Csv;
  throw Error(ErrorCode::InvalidArgument, "unknown graph format '" + std::string(s) + "'");
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string graphml(const std::vector<ExportNode>& nodes, const std::vector<ExportEdge>& edges) {
  std::string o = R"(<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="label" for="node" attr.name="label" attr.type="string"/>
  <key id="community" for="node" attr.name="community" attr.type="int"/>
  <key id="isolate" for="node" attr.name="isolate" attr.type="boolean"/>
  <key id="size" for="node" attr.name="size" attr.type="double"/>
  <key id="within" for="node" attr.name="within" attr.type="double"/>
  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>
  <graph id="G" edgedefault="undirected">
)";
  for (const auto& n : nodes) {
    o += "    <node id=\"" + xml_escape(n.id) + "\">";
    o += "<data key=\"label\">" + xml_escape(n.label) + "</data>";
    o += "<data key=\"community\">" + std::to_string(n.community) + "</data>";
    o += std::string("<data key=\"isolate\">") + (n.isolate ? "true" : "false") + "</data>";
    o += "<data key=\"size\">" + format_double(n.size) + "</data>";
    o += "<data key=\"within\">" + format_double(n.within) + "</data>";
    o += "</node>\n";
  }
  std::size_t e = 0;
  for (const auto& ed : edges) {
    o += "    <edge id=\"e" + std::to_string(e++) + "\" source=\"" + xml_escape(ed.source) + "\" target=\"" +
         xml_escape(ed.target) + "\"><data key=\"weight\">" + format_double(ed.weight) + "</data></edge>\n";
  }
  o += "  </graph>\n</graphml>\n";
  return o;
}

std::string gexf(const std::vector<ExportNode>& nodes, const std::vector<ExportEdge>& edges) {
  std::string o = R"(<?xml version="1.0" encoding="UTF-8"?>
<gexf xmlns="http://gexf.net/1.3" version="1.3">
  <graph mode="static" defaultedgetype="undirected">
    <attributes class="node">
      <attribute id="0" title="community" type="integer"/>
      <attribute id="1" title="isolate" type="boolean"/>
      <attribute id="2" title="size" type="double"/>
      <attribute id="3" title="within" type="double"/>
    </attributes>
    <nodes>
)";
  for (const auto& n : nodes) {
    o += "      <node id=\"" + xml_escape(n.id) + "\" label=\"" + xml_escape(n.label) + "\"><attvalues>";
    o += "<attvalue for=\"0\" value=\"" + std::to_string(n.community) + "\"/>";
    o += std::string("<attvalue for=\"1\" value=\"") + (n.isolate ? "true" : "false") + "\"/>";
    o += "<attvalue for=\"2\" value=\"" + format_double(n.size) + "\"/>";
    o += "<attvalue for=\"3\" value=\"" + format_double(n.within) + "\"/>";
    o += "</attvalues></node>\n";
  }
  o += "    </nodes>\n    <edges>\n";
  std::size_t e = 0;
  for (const auto& ed : edges)
    o += "      <edge id=\"" + std::to_string(e++) + "\" source=\"" + xml_escape(ed.source) + "\" target=\"" +
         xml_escape(ed.target) + "\" weight=\"" + format_double(ed.weight) + "\"/>\n";
  o += "    </edges>\n  </graph>\n</gexf>\n";
  return o;
}

std::string csv(const std::vector<ExportEdge>& edges) {
  std::string o = "source,target,weight\n";
  for (const auto& e : edges) o += e.source + "," + e.target + "," + format_double(e.weight) + "\n";
  return o;
}

}  // namespace

std::string format_graph(const std::vector<ExportNode>& nodes, const std::vector<ExportEdge>& edges,
                         GraphFormat format) {
  switch (format) {
    case GraphFormat::GraphML: return graphml(nodes, edges);
    case GraphFormat::Gexf: return gexf(nodes, edges);
    case GraphFormat::Csv: return csv(edges);
  }
  return {};
}

void export_graph(const std::filesystem::path& path, const std::vector<ExportNode>& nodes,
                  const std::vector<ExportEdge>& edges, GraphFormat format) {
  try {
    write_file(path, format_graph(nodes, edges, format));
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::IoError, e.what());
  }
}

void group_graph(const GroupMatrix& g, const std::vector<GroupEdge>& edges, std::vector<ExportNode>& nodes_out,
                 std::vector<ExportEdge>& edges_out) {
  nodes_out.clear();
  edges_out.clear();
  for (std::size_t a = 0; a < g.groups.size(); ++a) {
    ExportNode n;
    n.id = "g" + std::to_string(g.groups[a]);
    n.label = n.id;
    n.community = g.groups[a];
    n.size = static_cast<double>(g.members[a].size());
    n.within = g.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
    nodes_out.push_back(std::move(n));
  }
  for (const auto& e : edges) edges_out.push_back({nodes_out[e.a].id, nodes_out[e.b].id, e.weight});
}

}  // namespace netfuse
