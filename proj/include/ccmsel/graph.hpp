#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ccmsel {

enum class NodeType : std::uint8_t { Primary, Specialty, Untyped };

std::string_view to_string(NodeType t);
/// Accepts "primary", "specialty", "untyped" (case-insensitive).
NodeType node_type_from_string(std::string_view s);

/// Undirected simple labeled graph. Immutable after construction; the edge
/// list is canonical (i < j, sorted lexicographically).
class Graph {
 public:
  using Edge = std::pair<std::int32_t, std::int32_t>;

  /// Throws DomainError on self-loops, duplicate edges, out-of-range
  /// indices, n == 0, or mismatched id/type lengths.
  Graph(std::vector<std::string> ids, std::vector<NodeType> types,
        std::vector<Edge> edges);

  /// Nodes named "0".."n-1", all untyped.
  static Graph with_nodes(std::int32_t n, std::vector<Edge> edges);
  /// Nodes named "0".."n-1" with the given types.
  static Graph with_types(std::vector<NodeType> types, std::vector<Edge> edges);

  std::int32_t node_count() const noexcept {
    return static_cast<std::int32_t>(ids_.size());
  }
  std::int64_t edge_count() const noexcept {
    return static_cast<std::int64_t>(edges_.size());
  }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<NodeType>& types() const noexcept { return types_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const std::int32_t> neighbors(std::int32_t v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::int32_t degree(std::int32_t v) const {
    return static_cast<std::int32_t>(offsets_[v + 1] - offsets_[v]);
  }
  std::vector<std::int32_t> degrees() const;
  bool adjacent(std::int32_t u, std::int32_t v) const;

  std::int32_t count_type(NodeType t) const;
  bool fully_typed() const;

  /// Same graph with node i moved to position perm[i].
  Graph permuted(std::span<const std::int32_t> perm) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<NodeType> types_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> adj_;
};

enum class StatisticKind { EdgeCount, DegreeDistribution, TypeMixing, DegreeMixing };

std::string_view to_string(StatisticKind k);
/// Accepts the CLI names {edges, degdist, typemix, degmix}.
StatisticKind statistic_kind_from_string(std::string_view s);

/// D[k] = number of vertices of degree k, dense up to the max degree.
using DegreeDistribution = std::vector<std::int64_t>;

/// Edge counts between primary (p) and specialty (s) providers.
struct TypeMixingMatrix {
  std::int64_t pp = 0;
  std::int64_t ps = 0;
  std::int64_t ss = 0;
  friend bool operator==(const TypeMixingMatrix&, const TypeMixingMatrix&) = default;
  friend auto operator<=>(const TypeMixingMatrix&, const TypeMixingMatrix&) = default;
};

/// DMM[(k, l)] with k <= l: number of edges joining a degree-k and a degree-l
/// vertex, each edge counted once. Zero cells are absent.
using DegreeMixingMatrix = std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>;

class StatisticValue {
 public:
  using Value = std::variant<std::int64_t, DegreeDistribution, TypeMixingMatrix,
                             DegreeMixingMatrix>;

  explicit StatisticValue(std::int64_t edges) : value_(edges) {}
  explicit StatisticValue(DegreeDistribution d) : value_(std::move(d)) {}
  explicit StatisticValue(TypeMixingMatrix m) : value_(m) {}
  explicit StatisticValue(DegreeMixingMatrix m) : value_(std::move(m)) {}

  StatisticKind kind() const noexcept {
    return static_cast<StatisticKind>(value_.index());
  }

  std::int64_t edge_count() const { return std::get<std::int64_t>(value_); }
  const DegreeDistribution& degree_distribution() const {
    return std::get<DegreeDistribution>(value_);
  }
  const TypeMixingMatrix& type_mixing() const {
    return std::get<TypeMixingMatrix>(value_);
  }
  const DegreeMixingMatrix& degree_mixing() const {
    return std::get<DegreeMixingMatrix>(value_);
  }

  const Value& value() const noexcept { return value_; }

  /// Compact, injective text form; used as a map key by class tables.
  std::string key() const;

  friend bool operator==(const StatisticValue&, const StatisticValue&) = default;
  friend auto operator<=>(const StatisticValue& a, const StatisticValue& b) {
    return a.value_ <=> b.value_;
  }

 private:
  Value value_;
};

/// Exact statistic of g. TypeMixing throws TypedAttributeMissing when any
/// node is untyped.
StatisticValue compute_statistic(const Graph& g, StatisticKind kind);

DegreeDistribution degree_distribution(const Graph& g);
DegreeMixingMatrix degree_mixing(const Graph& g);
TypeMixingMatrix type_mixing(const Graph& g);

/// Total edges recorded in a degree-mixing matrix.
std::int64_t total_edges(const DegreeMixingMatrix& dmm);

}  // namespace ccmsel
