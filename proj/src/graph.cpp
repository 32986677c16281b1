#include "ccmsel/graph.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ccmsel/errors.hpp"

namespace ccmsel {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(NodeType t) {
  switch (t) {
    case NodeType::Primary: return "primary";
    case NodeType::Specialty: return "specialty";
    case NodeType::Untyped: return "untyped";
  }
  return "untyped";
}

NodeType node_type_from_string(std::string_view s) {
  const auto l = lower(s);
  if (l == "primary") return NodeType::Primary;
  if (l == "specialty") return NodeType::Specialty;
  if (l == "untyped" || l.empty()) return NodeType::Untyped;
  throw DomainError("unknown node type '" + std::string(s) + "'");
}

std::string_view to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::EdgeCount: return "edges";
    case StatisticKind::DegreeDistribution: return "degdist";
    case StatisticKind::TypeMixing: return "typemix";
    case StatisticKind::DegreeMixing: return "degmix";
  }
  return "edges";
}

StatisticKind statistic_kind_from_string(std::string_view s) {
  const auto l = lower(s);
  if (l == "edges") return StatisticKind::EdgeCount;
  if (l == "degdist") return StatisticKind::DegreeDistribution;
  if (l == "typemix") return StatisticKind::TypeMixing;
  if (l == "degmix") return StatisticKind::DegreeMixing;
  throw DomainError("unknown statistic '" + std::string(s) +
                    "' (expected edges, degdist, typemix or degmix)");
}

Graph::Graph(std::vector<std::string> ids, std::vector<NodeType> types,
             std::vector<Edge> edges)
    : ids_(std::move(ids)), types_(std::move(types)), edges_(std::move(edges)) {
  const auto n = static_cast<std::int64_t>(ids_.size());
  if (n < 1) throw DomainError("graph must have at least one node");
  if (types_.size() != ids_.size()) {
    throw DomainError("node id and node type sequences differ in length");
  }
  for (auto& [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw DomainError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                        ") references a node outside [0," + std::to_string(n) + ")");
    }
    if (i == j) throw DomainError("self-loop at node " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw DomainError("duplicate edge (" + std::to_string(dup->first) + "," +
                      std::to_string(dup->second) + ")");
  }

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [i, j] : edges_) {
    ++offsets_[i + 1];
    ++offsets_[j + 1];
  }
  for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) offsets_[v + 1] += offsets_[v];
  adj_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [i, j] : edges_) {
    adj_[fill[i]++] = j;
    adj_[fill[j]++] = i;
  }
  // Rows come out sorted: for row v, every (i, v) with i < v precedes every
  // (v, j) in the sorted edge list.
}

Graph Graph::with_nodes(std::int32_t n, std::vector<Edge> edges) {
  return with_types(std::vector<NodeType>(static_cast<std::size_t>(std::max(n, 0)),
                                          NodeType::Untyped),
                    std::move(edges));
}

Graph Graph::with_types(std::vector<NodeType> types, std::vector<Edge> edges) {
  std::vector<std::string> ids;
  ids.reserve(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) ids.push_back(std::to_string(i));
  return Graph(std::move(ids), std::move(types), std::move(edges));
}

std::vector<std::int32_t> Graph::degrees() const {
  std::vector<std::int32_t> d(ids_.size());
  for (std::int32_t v = 0; v < node_count(); ++v) d[v] = degree(v);
  return d;
}

bool Graph::adjacent(std::int32_t u, std::int32_t v) const {
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::int32_t Graph::count_type(NodeType t) const {
  return static_cast<std::int32_t>(std::count(types_.begin(), types_.end(), t));
}

bool Graph::fully_typed() const { return count_type(NodeType::Untyped) == 0; }

Graph Graph::permuted(std::span<const std::int32_t> perm) const {
  const auto n = ids_.size();
  if (perm.size() != n) throw DomainError("permutation length does not match node count");
  std::vector<std::string> ids(n);
  std::vector<NodeType> types(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[perm[i]] = ids_[i];
    types[perm[i]] = types_[i];
  }
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& [i, j] : edges_) edges.emplace_back(perm[i], perm[j]);
  return Graph(std::move(ids), std::move(types), std::move(edges));
}

DegreeDistribution degree_distribution(const Graph& g) {
  std::int32_t max_deg = 0;
  for (std::int32_t v = 0; v < g.node_count(); ++v) max_deg = std::max(max_deg, g.degree(v));
  DegreeDistribution dist(static_cast<std::size_t>(max_deg) + 1, 0);
  for (std::int32_t v = 0; v < g.node_count(); ++v) ++dist[g.degree(v)];
  return dist;
}

DegreeMixingMatrix degree_mixing(const Graph& g) {
  DegreeMixingMatrix dmm;
  for (const auto& [i, j] : g.edges()) {
    std::int64_t a = g.degree(i);
    std::int64_t b = g.degree(j);
    if (a > b) std::swap(a, b);
    ++dmm[{a, b}];
  }
  return dmm;
}

TypeMixingMatrix type_mixing(const Graph& g) {
  if (!g.fully_typed()) {
    throw TypedAttributeMissing(
        "type mixing requires every node to be typed; " +
        std::to_string(g.count_type(NodeType::Untyped)) + " node(s) are untyped");
  }
  TypeMixingMatrix mm;
  const auto& types = g.types();
  for (const auto& [i, j] : g.edges()) {
    const bool pi = types[i] == NodeType::Primary;
    const bool pj = types[j] == NodeType::Primary;
    if (pi && pj) {
      ++mm.pp;
    } else if (pi || pj) {
      ++mm.ps;
    } else {
      ++mm.ss;
    }
  }
  return mm;
}

StatisticValue compute_statistic(const Graph& g, StatisticKind kind) {
  switch (kind) {
    case StatisticKind::EdgeCount: return StatisticValue(g.edge_count());
    case StatisticKind::DegreeDistribution: return StatisticValue(degree_distribution(g));
    case StatisticKind::TypeMixing: return StatisticValue(type_mixing(g));
    case StatisticKind::DegreeMixing: return StatisticValue(degree_mixing(g));
  }
  throw DomainError("unknown statistic kind");
}

std::int64_t total_edges(const DegreeMixingMatrix& dmm) {
  std::int64_t total = 0;
  for (const auto& [cell, count] : dmm) total += count;
  return total;
}

std::string StatisticValue::key() const {
  std::ostringstream os;
  os << to_string(kind()) << ':';
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          os << v;
        } else if constexpr (std::is_same_v<T, DegreeDistribution>) {
          // trailing zeros carry no information
          auto end = v.size();
          while (end > 0 && v[end - 1] == 0) --end;
          for (std::size_t k = 0; k < end; ++k) os << (k ? "," : "") << v[k];
        } else if constexpr (std::is_same_v<T, TypeMixingMatrix>) {
          os << v.pp << ',' << v.ps << ',' << v.ss;
        } else {
          bool first = true;
          for (const auto& [cell, count] : v) {
            if (count == 0) continue;
            os << (first ? "" : ";") << cell.first << '-' << cell.second << '=' << count;
            first = false;
          }
        }
      },
      value_);
  return os.str();
}

}  // namespace ccmsel
