#include "ccmsel/graph_io.hpp"

#include <fstream>

#include "ccmsel/errors.hpp"

namespace ccmsel {

ordered_json graph_to_json(const Graph& g) {
  ordered_json nodes = ordered_json::array();
  for (std::int32_t v = 0; v < g.node_count(); ++v) {
    ordered_json node;
    node["id"] = g.ids()[v];
    node["type"] = std::string(to_string(g.types()[v]));
    nodes.push_back(std::move(node));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
  ordered_json out;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges")) {
    throw SchemaError("graph JSON must be an object with 'nodes' and 'edges'");
  }
  const auto& nodes = j.at("nodes");
  const auto& edges = j.at("edges");
  if (!nodes.is_array() || !edges.is_array()) {
    throw SchemaError("graph JSON 'nodes' and 'edges' must be arrays");
  }
  std::vector<std::string> ids;
  std::vector<NodeType> types;
  ids.reserve(nodes.size());
  types.reserve(nodes.size());
  for (const auto& node : nodes) {
    if (node.is_string()) {
      ids.push_back(node.get<std::string>());
      types.push_back(NodeType::Untyped);
      continue;
    }
    if (!node.is_object() || !node.contains("id")) {
      throw SchemaError("every node needs an 'id'");
    }
    const auto& id = node.at("id");
    ids.push_back(id.is_string() ? id.get<std::string>() : id.dump());
    types.push_back(node.contains("type")
                        ? node_type_from_string(node.at("type").get<std::string>())
                        : NodeType::Untyped);
  }
  std::vector<Graph::Edge> edge_list;
  edge_list.reserve(edges.size());
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw SchemaError("every edge must be a pair of integer node indices");
    }
    edge_list.emplace_back(e[0].get<std::int32_t>(), e[1].get<std::int32_t>());
  }
  return Graph(std::move(ids), std::move(types), std::move(edge_list));
}

std::string serialize_graph(const Graph& g) { return graph_to_json(g).dump() + "\n"; }

Graph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open graph file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return graph_from_json(j);
}

ordered_json statistic_to_json(const StatisticValue& v) {
  ordered_json out;
  out["kind"] = std::string(to_string(v.kind()));
  switch (v.kind()) {
    case StatisticKind::EdgeCount:
      out["edge_count"] = v.edge_count();
      break;
    case StatisticKind::DegreeDistribution: {
      auto d = v.degree_distribution();
      while (!d.empty() && d.back() == 0) d.pop_back();
      out["degree_distribution"] = d;
      break;
    }
    case StatisticKind::TypeMixing: {
      const auto& m = v.type_mixing();
      out["type_mixing"] = {{"pp", m.pp}, {"ps", m.ps}, {"ss", m.ss}};
      break;
    }
    case StatisticKind::DegreeMixing: {
      ordered_json cells = ordered_json::array();
      for (const auto& [cell, count] : v.degree_mixing()) {
        cells.push_back({cell.first, cell.second, count});
      }
      out["degree_mixing"] = std::move(cells);
      break;
    }
  }
  return out;
}

}  // namespace ccmsel
