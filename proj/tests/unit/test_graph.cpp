#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ccmsel/errors.hpp"
#include "ccmsel/graph.hpp"

using namespace ccmsel;

namespace {
Graph path3() { return Graph::with_nodes(3, {{0, 1}, {1, 2}}); }
}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("construction rejects invalid edges") {
    CHECK_THROWS_AS(Graph::with_nodes(3, {{1, 1}}), DomainError);
    CHECK_THROWS_AS(Graph::with_nodes(3, {{0, 1}, {1, 0}}), DomainError);
    CHECK_THROWS_AS(Graph::with_nodes(3, {{0, 3}}), DomainError);
    CHECK_THROWS_AS(Graph::with_nodes(0, {}), DomainError);
  }

  TEST_CASE("edges are canonical and adjacency symmetric") {
    const auto g = Graph::with_nodes(4, {{2, 0}, {1, 0}, {3, 2}});
    const std::vector<Graph::Edge> want{{0, 1}, {0, 2}, {2, 3}};
    CHECK(g.edges() == want);
    CHECK(g.adjacent(0, 2));
    CHECK(g.adjacent(2, 0));
    CHECK_FALSE(g.adjacent(1, 3));
    CHECK(g.degree(0) == 2);
  }

  TEST_CASE("triangle edge count") {
    const auto g = Graph::with_nodes(3, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(compute_statistic(g, StatisticKind::EdgeCount).edge_count() == 3);
  }

  TEST_CASE("path degree distribution") {
    const auto d = compute_statistic(path3(), StatisticKind::DegreeDistribution);
    const DegreeDistribution want{0, 2, 1};
    CHECK(d.degree_distribution() == want);
  }

  TEST_CASE("path degree mixing") {
    const auto m = compute_statistic(path3(), StatisticKind::DegreeMixing).degree_mixing();
    CHECK(m.size() == 1);
    CHECK(m.at({1, 2}) == 2);
  }

  TEST_CASE("type mixing needs typed nodes") {
    CHECK_THROWS_AS(compute_statistic(path3(), StatisticKind::TypeMixing),
                    TypedAttributeMissing);
    const auto g = Graph::with_types(
        {NodeType::Primary, NodeType::Primary, NodeType::Specialty, NodeType::Specialty},
        {{0, 1}, {0, 2}, {2, 3}, {1, 3}});
    const auto m = compute_statistic(g, StatisticKind::TypeMixing).type_mixing();
    CHECK(m == TypeMixingMatrix{1, 2, 1});
  }

  TEST_CASE("name parsing") {
    CHECK(statistic_kind_from_string("degmix") == StatisticKind::DegreeMixing);
    CHECK(node_type_from_string("PRIMARY") == NodeType::Primary);
    CHECK_THROWS(statistic_kind_from_string("bogus"));
  }

  TEST_CASE("permuted relabels nodes") {
    const auto g = path3();
    const std::vector<std::int32_t> perm{2, 0, 1};
    const auto h = g.permuted(perm);
    CHECK(h.degree(0) == 2);
    CHECK(h.ids()[2] == "0");
  }
}
