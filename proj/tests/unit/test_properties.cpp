#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccmsel/evidence.hpp"
#include "ccmsel/graph.hpp"
#include "ccmsel/random.hpp"
#include "ccmsel/simulate.hpp"

using namespace ccmsel;

namespace {
Graph random_graph(Rng& rng, std::int32_t n, double p, bool typed) {
  std::vector<Graph::Edge> e;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j)
      if (bernoulli(rng, p)) e.emplace_back(i, j);
  if (!typed) return Graph::with_nodes(n, std::move(e));
  std::vector<NodeType> t(n);
  for (auto& x : t) x = bernoulli(rng, 0.4) ? NodeType::Primary : NodeType::Specialty;
  return Graph::with_types(std::move(t), std::move(e));
}
}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("statistic invariants over random graphs") {
    for (std::uint64_t s = 0; s < 300; ++s) {
      auto rng = make_stream(21, s);
      const auto n = static_cast<std::int32_t>(1 + uniform_index(rng, 40));
      const auto g = random_graph(rng, n, uniform01(rng), true);
      const auto d = degree_distribution(g);
      std::int64_t count = 0, mass = 0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        count += d[k];
        mass += static_cast<std::int64_t>(k) * d[k];
        CHECK(d[k] >= 0);
      }
      CHECK(count == n);
      CHECK(mass == 2 * g.edge_count());
      const auto t = type_mixing(g);
      CHECK(t.pp + t.ps + t.ss == g.edge_count());
      const auto m = degree_mixing(g);
      CHECK(total_edges(m) == g.edge_count());
      std::vector<std::int64_t> ends(d.size(), 0);
      for (const auto& [kl, c] : m) {
        CHECK(c > 0);
        ends[kl.first] += c;
        ends[kl.second] += c;
      }
      for (std::size_t k = 0; k < d.size(); ++k)
        CHECK(ends[k] == static_cast<std::int64_t>(k) * d[k]);
      CHECK(static_cast<double>(g.edge_count()) <= n * (n - 1) / 2.0);
    }
  }

  TEST_CASE("statistics are invariant under relabeling") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto rng = make_stream(22, s);
      const auto n = static_cast<std::int32_t>(2 + uniform_index(rng, 30));
      const auto g = random_graph(rng, n, 0.2, true);
      std::vector<std::int32_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::int32_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[uniform_index(rng, static_cast<std::uint64_t>(i) + 1)]);
      const auto h = g.permuted(perm);
      for (auto k : {StatisticKind::EdgeCount, StatisticKind::DegreeDistribution,
                     StatisticKind::TypeMixing, StatisticKind::DegreeMixing})
        CHECK(compute_statistic(g, k) == compute_statistic(h, k));
    }
  }

  TEST_CASE("posterior probabilities: shift invariance and monotonicity") {
    for (std::uint64_t s = 0; s < 200; ++s) {
      auto rng = make_stream(23, s);
      const std::size_t k = 2 + uniform_index(rng, 4);
      std::vector<double> le(k), pr(k);
      const double base = -70000.0 * uniform01(rng);
      for (auto& x : le) x = base + 8.0 * uniform01(rng);
      double tot = 0;
      for (auto& x : pr) tot += (x = 0.1 + uniform01(rng));
      for (auto& x : pr) x /= tot;
      const auto p = posterior_probabilities(le, pr);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      auto shifted = le;
      const double c = 1e4 * (uniform01(rng) - 0.5);
      for (auto& x : shifted) x += c;
      const auto q = posterior_probabilities(shifted, pr);
      for (std::size_t i = 0; i < k; ++i) CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-9));
      auto up = le;
      up[0] += 0.5;
      CHECK(posterior_probabilities(up, pr)[0] > p[0]);
    }
  }

  TEST_CASE("m2 with a uniform prior is m1") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto rng = make_stream(24, s);
      const auto g = random_graph(rng, static_cast<std::int32_t>(1 + uniform_index(rng, 100)),
                                  uniform01(rng), false);
      CHECK(std::abs(evidence_m2(g, {1, 1}).log_evidence.log() -
                     evidence_m1(g).log_evidence.log()) <= 1e-12);
    }
  }

  TEST_CASE("simulated graphs satisfy graph invariants") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      SimConfig c;
      c.n = 80;
      c.seed = s;
      c.mechanism = s % 2 ? Mechanism{DegreeMixingMechanism{0.2, Eigen::Vector3d(-1, 0.02, 0.02)}}
                          : Mechanism{ExponentialDegreeMechanism{0.1}};
      const auto g = sample_network(c);
      for (auto [i, j] : g.edges()) {
        CHECK(i < j);
        CHECK(g.adjacent(j, i));
      }
      auto e = g.edges();
      CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
    }
  }
}
