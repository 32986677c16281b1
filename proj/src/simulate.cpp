#include "ccmsel/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ccmsel/errors.hpp"
#include "ccmsel/graphical.hpp"

namespace ccmsel {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

void check_lambda(double lambda, std::int32_t n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be positive and finite");
  }
  if (1.0 / lambda >= n - 1) {
    throw DomainError("lambda = " + std::to_string(lambda) + " gives mean degree " +
                      std::to_string(1.0 / lambda) + ", not realizable on " + std::to_string(n) +
                      " nodes");
  }
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

// Edge list with O(1) membership, for swap moves.
struct EdgeSet {
  std::vector<Graph::Edge> edges;
  std::unordered_set<std::uint64_t> keys;

  explicit EdgeSet(std::vector<Graph::Edge> e) : edges(std::move(e)) {
    keys.reserve(edges.size() * 2);
    for (auto [a, b] : edges) keys.insert(edge_key(a, b));
  }

  bool has(std::int32_t a, std::int32_t b) const { return keys.count(edge_key(a, b)) > 0; }

  // Proposes replacing edges i=(a,b), j=(c,d) by (a,d),(c,b). Returns false
  // if the result would not be simple.
  bool propose(Rng& rng, std::size_t& i, std::size_t& j, Graph::Edge& e1, Graph::Edge& e2) const {
    if (edges.size() < 2) return false;
    i = uniform_index(rng, edges.size());
    j = uniform_index(rng, edges.size());
    if (i == j) return false;
    auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (bernoulli(rng, 0.5)) std::swap(c, d);
    if (a == d || c == b || a == c || b == d) return false;
    if (has(a, d) || has(c, b)) return false;
    e1 = {a, d};
    e2 = {c, b};
    return true;
  }

  void apply(std::size_t i, std::size_t j, Graph::Edge e1, Graph::Edge e2) {
    keys.erase(edge_key(edges[i].first, edges[i].second));
    keys.erase(edge_key(edges[j].first, edges[j].second));
    edges[i] = e1;
    edges[j] = e2;
    keys.insert(edge_key(e1.first, e1.second));
    keys.insert(edge_key(e2.first, e2.second));
  }
};

std::vector<Graph::Edge> exponential_degree_edges(Rng& rng, std::int32_t n, double lambda,
                                                  SimDiagnostics* diag,
                                                  std::vector<std::int64_t>* degrees_out) {
  auto degrees = draw_exponential_degrees(rng, n, lambda);
  std::int64_t sum = 0;
  for (auto d : degrees) sum += d;
  const auto removed = repair_graphical(degrees);
  bool fallback = false;
  auto edges = realize_degrees(rng, degrees, &fallback);
  if (diag) {
    diag->target_degree_sum = sum;
    diag->repaired_mass = removed;
    diag->used_fallback = fallback;
  }
  if (degrees_out) *degrees_out = std::move(degrees);
  return edges;
}

}  // namespace

void SimConfig::validate() const {
  if (n < 2) throw DomainError("simulation needs n >= 2");
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErMechanism>) {
          check_probability(m.p, "p");
        } else if constexpr (std::is_same_v<M, ExponentialDegreeMechanism>) {
          check_lambda(m.lambda, n);
        } else if constexpr (std::is_same_v<M, BlockMixingMechanism>) {
          if (m.n_primary < 0 || m.n_primary > n) throw DomainError("n_primary must lie in [0, n]");
          check_probability(m.p_pp, "p_pp");
          check_probability(m.p_ps, "p_ps");
          check_probability(m.p_ss, "p_ss");
        } else {
          check_lambda(m.lambda, n);
          if (!m.beta.allFinite()) throw DomainError("beta must be finite");
        }
      },
      mechanism);
}

std::vector<std::int64_t> draw_exponential_degrees(Rng& rng, std::int32_t n, double lambda) {
  std::vector<std::int64_t> d(static_cast<std::size_t>(n));
  for (auto& x : d) {
    const double v = std::ceil(exponential(rng, lambda)) - 1.0;
    x = static_cast<std::int64_t>(std::min<double>(std::max(v, 0.0), n - 1));
  }
  return d;
}

std::int64_t repair_graphical(std::vector<std::int64_t>& degrees) {
  std::int64_t removed = 0;
  std::int64_t sum = 0;
  for (auto d : degrees) sum += d;
  if (sum % 2 != 0) {
    --*std::max_element(degrees.begin(), degrees.end());
    ++removed;
  }
  while (!is_graphical(degrees)) {
    auto first = std::max_element(degrees.begin(), degrees.end());
    --*first;
    auto second = degrees.begin();
    for (auto it = degrees.begin(); it != degrees.end(); ++it) {
      if (it != first && (second == first || *it > *second)) second = it;
    }
    --*second;
    removed += 2;
  }
  return removed;
}

std::vector<Graph::Edge> realize_degrees(Rng& rng, const std::vector<std::int64_t>& degrees,
                                         bool* fallback) {
  constexpr int kRestarts = 20;
  constexpr int kRedraws = 200;
  if (fallback) *fallback = false;
  std::vector<std::int32_t> stubs0;
  for (std::size_t v = 0; v < degrees.size(); ++v) {
    for (std::int64_t k = 0; k < degrees[v]; ++k) stubs0.push_back(static_cast<std::int32_t>(v));
  }
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    auto stubs = stubs0;
    std::vector<Graph::Edge> edges;
    std::unordered_set<std::uint64_t> keys;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      stuck = true;
      for (int r = 0; r < kRedraws; ++r) {
        const auto i = uniform_index(rng, stubs.size());
        auto j = uniform_index(rng, stubs.size() - 1);
        if (j >= i) ++j;
        const auto a = stubs[i], b = stubs[j];
        if (a == b || keys.count(edge_key(a, b))) continue;
        keys.insert(edge_key(a, b));
        edges.emplace_back(std::min(a, b), std::max(a, b));
        // remove the higher index first so the lower stays valid
        for (auto idx : {std::max(i, j), std::min(i, j)}) {
          stubs[idx] = stubs.back();
          stubs.pop_back();
        }
        stuck = false;
        break;
      }
    }
    if (!stuck) return edges;
  }
  if (fallback) *fallback = true;
  EdgeSet set(havel_hakimi(degrees));
  const auto attempts = 10 * static_cast<std::int64_t>(set.edges.size());
  for (std::int64_t t = 0; t < attempts; ++t) {
    std::size_t i, j;
    Graph::Edge e1, e2;
    if (set.propose(rng, i, j, e1, e2)) set.apply(i, j, e1, e2);
  }
  return set.edges;
}

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  auto rng = make_stream(seed, replica);
  return rng();
}

Graph sample_network(const SimConfig& config, SimDiagnostics* diag) {
  config.validate();
  const std::int32_t n = config.n;
  auto rng = make_stream(config.seed, 0);
  return std::visit(
      [&](const auto& m) -> Graph {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErMechanism>) {
          std::vector<Graph::Edge> edges;
          for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j = i + 1; j < n; ++j)
              if (bernoulli(rng, m.p)) edges.emplace_back(i, j);
          return Graph::with_nodes(n, std::move(edges));
        } else if constexpr (std::is_same_v<M, ExponentialDegreeMechanism>) {
          return Graph::with_nodes(n, exponential_degree_edges(rng, n, m.lambda, diag, nullptr));
        } else if constexpr (std::is_same_v<M, BlockMixingMechanism>) {
          std::vector<NodeType> types(static_cast<std::size_t>(n), NodeType::Specialty);
          for (std::int32_t i = 0; i < m.n_primary; ++i) types[static_cast<std::size_t>(i)] = NodeType::Primary;
          std::vector<Graph::Edge> edges;
          for (std::int32_t i = 0; i < n; ++i) {
            for (std::int32_t j = i + 1; j < n; ++j) {
              const bool pi = i < m.n_primary, pj = j < m.n_primary;
              const double p = pi && pj ? m.p_pp : (pi || pj ? m.p_ps : m.p_ss);
              if (bernoulli(rng, p)) edges.emplace_back(i, j);
            }
          }
          return Graph::with_types(std::move(types), std::move(edges));
        } else {
          std::vector<std::int64_t> deg;
          EdgeSet set(exponential_degree_edges(rng, n, m.lambda, diag, &deg));
          auto log_w = [&](Graph::Edge e) {
            const double a = static_cast<double>(deg[static_cast<std::size_t>(e.first)]);
            const double b = static_cast<double>(deg[static_cast<std::size_t>(e.second)]);
            return log_sigmoid(m.beta[0] + m.beta[1] * std::min(a, b) + m.beta[2] * std::max(a, b));
          };
          const auto attempts = 10 * static_cast<std::int64_t>(set.edges.size());
          std::int64_t accepted = 0;
          for (std::int64_t t = 0; t < attempts; ++t) {
            std::size_t i, j;
            Graph::Edge e1, e2;
            if (!set.propose(rng, i, j, e1, e2)) continue;
            const double delta = log_w(e1) + log_w(e2) - log_w(set.edges[i]) - log_w(set.edges[j]);
            if (delta >= 0 || std::log(uniform01(rng)) < delta) {
              set.apply(i, j, e1, e2);
              ++accepted;
            }
          }
          if (diag) {
            diag->swaps_attempted = attempts;
            diag->swaps_accepted = accepted;
          }
          return Graph::with_nodes(n, std::move(set.edges));
        }
      },
      config.mechanism);
}

}  // namespace ccmsel
