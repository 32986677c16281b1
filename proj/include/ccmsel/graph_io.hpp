#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ccmsel/graph.hpp"

namespace ccmsel {

using ordered_json = nlohmann::ordered_json;

/// Canonical form: {"nodes": [{"id", "type"}], "edges": [[i, j], ...]} with
/// 0-based indices, i < j, edges sorted.
ordered_json graph_to_json(const Graph& g);

/// Accepts the canonical form; a missing node "type" means untyped. Any extra
/// top-level keys (e.g. an embedded manifest) are ignored.
Graph graph_from_json(const nlohmann::json& j);

/// Compact canonical text plus a trailing LF. Byte-stable for golden tests.
std::string serialize_graph(const Graph& g);

Graph read_graph(const std::filesystem::path& path);

ordered_json statistic_to_json(const StatisticValue& v);

}  // namespace ccmsel
