#include "ccmsel/enumeration.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <string>
#include <thread>
#include <unordered_map>

#include "ccmsel/errors.hpp"
#include "ccmsel/graphical.hpp"
#include "sis.hpp"

namespace ccmsel {

std::string_view to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::Exact: return "exact";
    case VolumeMethod::ImportanceSampling: return "importance_sampling";
    case VolumeMethod::Oracle: return "oracle";
  }
  return "exact";
}

namespace {

VolumeEstimate exact(double log_count, VolumeMethod method = VolumeMethod::Exact) {
  return {LogValue::from_log(log_count), 0.0, method, 0};
}

VolumeEstimate from_count(std::uint64_t count, double log_extra) {
  if (count == 0) return {LogValue::zero(), 0.0, VolumeMethod::Oracle, 0};
  return exact(std::log(static_cast<double>(count)) + log_extra, VolumeMethod::Oracle);
}

/// Draws `opts.samples` log weights; sample i always uses stream i, so the
/// result is independent of the worker count.
template <typename MakeSampler>
std::vector<double> draw_log_weights(const SamplingOptions& opts, MakeSampler&& make) {
  if (opts.samples < 1) throw DomainError("sample count must be positive");
  const auto total = static_cast<std::size_t>(opts.samples);
  std::vector<double> weights(total);
  const auto jobs = static_cast<std::size_t>(
      std::clamp<std::int64_t>(opts.jobs, 1, static_cast<std::int64_t>(total)));
  auto work = [&](std::size_t worker) {
    auto sampler = make();
    for (std::size_t i = worker; i < total; i += jobs) {
      auto rng = make_stream(opts.seed, i);
      weights[i] = sampler.sample_log_weight(rng);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return weights;
}

VolumeEstimate summarize(std::span<const double> weights, double log_extra) {
  const auto s = detail::summarize_log_weights(weights);
  VolumeEstimate est;
  est.log_count = LogValue::from_log(s.log_mean == -std::numeric_limits<double>::infinity()
                                         ? s.log_mean
                                         : s.log_mean + log_extra);
  est.std_error_log = s.relative_se;
  est.method = VolumeMethod::ImportanceSampling;
  est.samples = static_cast<std::int64_t>(weights.size());
  return est;
}

void check_degree_sequence(std::span<const std::int64_t> d) {
  const auto n = static_cast<std::int64_t>(d.size());
  if (n < 1) throw DomainError("degree sequence is empty");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0 || d[i] > n - 1) {
      throw DomainError("degree " + std::to_string(d[i]) + " at vertex " + std::to_string(i) +
                        " is outside [0, n-1]");
    }
  }
  if (auto bad = erdos_gallai_violation(d)) {
    if (*bad == 0) throw DomainError("degree sequence has an odd sum");
    throw DomainError("degree sequence is not graphical: Erdős–Gallai inequality fails at k=" +
                      std::to_string(*bad));
  }
}

std::vector<std::int64_t> representative_sequence(const DegreeDistribution& dist) {
  std::vector<std::int64_t> seq;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    seq.insert(seq.end(), static_cast<std::size_t>(dist[k]), static_cast<std::int64_t>(k));
  }
  return seq;
}

/// Backtracking over the neighbour sets of vertices in index order. `leaf`
/// is called with the edge stack of every realization.
template <typename Prune, typename Leaf>
std::uint64_t backtrack(std::vector<std::int64_t>& residual, std::size_t i,
                        std::vector<std::pair<std::int32_t, std::int32_t>>& stack, Prune& prune,
                        Leaf& leaf) {
  const auto n = residual.size();
  while (i < n && residual[i] == 0) ++i;
  if (i == n) return leaf(stack) ? 1 : 0;
  std::vector<std::size_t> cand;
  for (auto j = i + 1; j < n; ++j) {
    if (residual[j] > 0) cand.push_back(j);
  }
  const auto need = static_cast<std::size_t>(residual[i]);
  if (cand.size() < need) return 0;

  std::uint64_t count = 0;
  const auto saved = residual[i];
  residual[i] = 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> choose = [&](std::size_t from) {
    if (chosen.size() == need) {
      if (prune(stack)) count += backtrack(residual, i + 1, stack, prune, leaf);
      return;
    }
    for (auto c = from; c + (need - chosen.size()) <= cand.size(); ++c) {
      const auto j = cand[c];
      chosen.push_back(j);
      --residual[j];
      stack.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
      choose(c + 1);
      stack.pop_back();
      ++residual[j];
      chosen.pop_back();
    }
  };
  choose(0);
  residual[i] = saved;
  return count;
}

}  // namespace

VolumeEstimate log_volume_edges(std::int64_t n, std::int64_t m) {
  if (n < 1) throw DomainError("node count must be positive");
  const std::int64_t pairs = n * (n - 1) / 2;
  if (m < 0 || m > pairs) {
    throw DomainError("edge count " + std::to_string(m) + " outside [0, " +
                      std::to_string(pairs) + "]");
  }
  return exact(log_binomial(static_cast<double>(pairs), static_cast<double>(m)));
}

VolumeEstimate log_volume_type_mixing(std::int64_t n_primary, std::int64_t n_specialty,
                                      const TypeMixingMatrix& mixing) {
  if (n_primary < 0 || n_specialty < 0 || n_primary + n_specialty < 1) {
    throw DomainError("type counts must be nonnegative with at least one node");
  }
  const std::array<std::pair<std::int64_t, std::int64_t>, 3> blocks{{
      {n_primary * (n_primary - 1) / 2, mixing.pp},
      {n_primary * n_specialty, mixing.ps},
      {n_specialty * (n_specialty - 1) / 2, mixing.ss},
  }};
  constexpr std::array<const char*, 3> names{"pp", "ps", "ss"};
  double total = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto [capacity, count] = blocks[b];
    if (count < 0 || count > capacity) {
      throw DomainError(std::string("block ") + names[b] + " has " + std::to_string(count) +
                        " edges but capacity " + std::to_string(capacity));
    }
    total += log_binomial(static_cast<double>(capacity), static_cast<double>(count));
  }
  return exact(total);
}

VolumeEstimate log_volume_degree_sequence(std::span<const std::int64_t> degrees,
                                          const SamplingOptions& opts) {
  check_degree_sequence(degrees);
  if (static_cast<std::int64_t>(degrees.size()) <= opts.oracle_limit) {
    return from_count(count_degree_sequence_exact(degrees), 0.0);
  }
  if (std::all_of(degrees.begin(), degrees.end(), [](auto d) { return d == 0; })) {
    return exact(0.0);
  }
  const auto weights =
      draw_log_weights(opts, [&] { return detail::DegreeSequenceSampler(degrees); });
  return summarize(weights, 0.0);
}

VolumeEstimate log_volume_degree_distribution(const DegreeDistribution& dist,
                                              const SamplingOptions& opts) {
  std::int64_t n = 0;
  for (auto c : dist) {
    if (c < 0) throw DomainError("degree distribution has a negative entry");
    n += c;
  }
  if (n < 1) throw DomainError("degree distribution describes an empty node set");
  const auto seq = representative_sequence(dist);
  const double log_arrangements = log_multinomial(dist);
  auto est = log_volume_degree_sequence(seq, opts);
  est.log_count *= LogValue::from_log(log_arrangements);
  return est;
}

DegreeDistribution degree_distribution_from_mixing(const DegreeMixingMatrix& dmm,
                                                   std::int64_t n) {
  if (n < 1) throw DomainError("node count must be positive");
  std::vector<std::int64_t> endpoints;
  for (const auto& [cell, count] : dmm) {
    const auto [k, l] = cell;
    if (k < 1 || l < k) {
      throw DomainError("degree-mixing cell (" + std::to_string(k) + "," + std::to_string(l) +
                        ") must satisfy 1 <= k <= l");
    }
    if (count < 0) throw DomainError("degree-mixing matrix has a negative entry");
    if (static_cast<std::int64_t>(endpoints.size()) <= l) {
      endpoints.resize(static_cast<std::size_t>(l) + 1, 0);
    }
    endpoints[k] += count;
    endpoints[l] += count;
  }
  DegreeDistribution dist(std::max<std::size_t>(endpoints.size(), 1), 0);
  std::int64_t assigned = 0;
  for (std::size_t k = 1; k < endpoints.size(); ++k) {
    if (endpoints[k] % static_cast<std::int64_t>(k) != 0) {
      throw DomainError("degree-mixing matrix is inconsistent: " + std::to_string(endpoints[k]) +
                        " endpoints of degree " + std::to_string(k) +
                        " is not a multiple of " + std::to_string(k));
    }
    dist[k] = endpoints[k] / static_cast<std::int64_t>(k);
    assigned += dist[k];
  }
  if (assigned > n) {
    throw DomainError("degree-mixing matrix needs " + std::to_string(assigned) +
                      " non-isolated vertices but n=" + std::to_string(n));
  }
  dist[0] = n - assigned;
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k] > 0 && static_cast<std::int64_t>(k) > n - 1) {
      throw DomainError("degree " + std::to_string(k) + " impossible on " + std::to_string(n) +
                        " nodes");
    }
  }
  for (const auto& [cell, count] : dmm) {
    const auto [k, l] = cell;
    const std::int64_t cap = k == l ? dist[k] * (dist[k] - 1) / 2 : dist[k] * dist[l];
    if (count > cap) {
      throw DomainError("degree-mixing cell (" + std::to_string(k) + "," + std::to_string(l) +
                        ") exceeds its capacity " + std::to_string(cap));
    }
  }
  return dist;
}

VolumeEstimate log_volume_degree_mixing(const DegreeMixingMatrix& dmm, std::int64_t n,
                                        const SamplingOptions& opts) {
  const auto dist = degree_distribution_from_mixing(dmm, n);
  const auto seq = representative_sequence(dist);
  if (auto bad = erdos_gallai_violation(seq)) {
    throw DomainError("degree-mixing matrix implies a non-graphical degree sequence (k=" +
                      std::to_string(*bad) + ")");
  }
  const double log_arrangements = log_multinomial(dist);
  if (n <= opts.oracle_limit) {
    return from_count(count_degree_mixing_exact(seq, dmm), log_arrangements);
  }
  if (total_edges(dmm) == 0) return exact(log_arrangements);
  const auto weights =
      draw_log_weights(opts, [&] { return detail::DegreeMixingSampler(dist, dmm); });
  return summarize(weights, log_arrangements);
}

VolumeEstimate log_volume(const Graph& g, StatisticKind kind, const SamplingOptions& opts) {
  switch (kind) {
    case StatisticKind::EdgeCount:
      return log_volume_edges(g.node_count(), g.edge_count());
    case StatisticKind::DegreeDistribution:
      return log_volume_degree_distribution(degree_distribution(g), opts);
    case StatisticKind::TypeMixing:
      return log_volume_type_mixing(g.count_type(NodeType::Primary),
                                    g.count_type(NodeType::Specialty), type_mixing(g));
    case StatisticKind::DegreeMixing:
      return log_volume_degree_mixing(degree_mixing(g), g.node_count(), opts);
  }
  throw DomainError("unknown statistic kind");
}

std::uint64_t count_degree_sequence_exact(std::span<const std::int64_t> degrees) {
  if (!is_graphical(degrees)) return 0;
  std::vector<std::int64_t> residual(degrees.begin(), degrees.end());
  std::vector<std::pair<std::int32_t, std::int32_t>> stack;
  auto prune = [](const auto&) { return true; };
  auto leaf = [](const auto&) { return true; };
  return backtrack(residual, 0, stack, prune, leaf);
}

std::uint64_t count_degree_mixing_exact(std::span<const std::int64_t> degrees,
                                        const DegreeMixingMatrix& dmm) {
  if (!is_graphical(degrees)) return 0;
  std::vector<std::int64_t> residual(degrees.begin(), degrees.end());
  std::vector<std::pair<std::int32_t, std::int32_t>> stack;
  auto cell_of = [&](const std::pair<std::int32_t, std::int32_t>& e) {
    auto a = degrees[e.first];
    auto b = degrees[e.second];
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  // Reject a partial edge set as soon as any cell overshoots its target.
  auto prune = [&](const auto& edges) {
    DegreeMixingMatrix partial;
    for (const auto& e : edges) {
      const auto cell = cell_of(e);
      auto it = dmm.find(cell);
      if (it == dmm.end() || ++partial[cell] > it->second) return false;
    }
    return true;
  };
  auto leaf = [&](const auto& edges) {
    DegreeMixingMatrix got;
    for (const auto& e : edges) ++got[cell_of(e)];
    DegreeMixingMatrix want;
    for (const auto& [cell, count] : dmm) {
      if (count != 0) want.emplace(cell, count);
    }
    return got == want;
  };
  return backtrack(residual, 0, stack, prune, leaf);
}

std::map<StatisticValue, std::uint64_t> enumerate_classes(std::int32_t n, StatisticKind kind,
                                                          std::span<const NodeType> types) {
  if (n < 1) throw DomainError("node count must be positive");
  if (n > kMaxEnumerationNodes) {
    throw RefusalError("exhaustive enumeration refused for n=" + std::to_string(n) +
                       " (limit " + std::to_string(kMaxEnumerationNodes) + ")");
  }
  std::vector<NodeType> node_types(types.begin(), types.end());
  if (kind == StatisticKind::TypeMixing) {
    if (node_types.size() != static_cast<std::size_t>(n) ||
        std::count(node_types.begin(), node_types.end(), NodeType::Untyped) > 0) {
      throw TypedAttributeMissing("type-mixing enumeration needs a type for every node");
    }
  }

  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  const auto n_pairs = pairs.size();
  const std::uint64_t n_graphs = std::uint64_t{1} << n_pairs;

  // Gray-code walk: consecutive graphs differ in one edge.
  std::array<std::int32_t, kMaxEnumerationNodes> deg{};
  std::unordered_map<std::string, std::uint64_t> table;
  std::string key;
  std::uint64_t mask = 0;
  for (std::uint64_t step = 0; step < n_graphs; ++step) {
    if (step > 0) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(step));
      mask ^= std::uint64_t{1} << bit;
      const int delta = (mask >> bit) & 1 ? 1 : -1;
      deg[pairs[bit].first] += delta;
      deg[pairs[bit].second] += delta;
    }
    key.clear();
    switch (kind) {
      case StatisticKind::EdgeCount:
        key.push_back(static_cast<char>(std::popcount(mask)));
        break;
      case StatisticKind::DegreeDistribution: {
        std::array<char, kMaxEnumerationNodes> hist{};
        for (std::int32_t v = 0; v < n; ++v) ++hist[deg[v]];
        key.assign(hist.begin(), hist.begin() + n);
        break;
      }
      case StatisticKind::TypeMixing: {
        std::array<char, 3> mm{};
        for (std::size_t b = 0; b < n_pairs; ++b) {
          if (!((mask >> b) & 1)) continue;
          const bool pa = node_types[pairs[b].first] == NodeType::Primary;
          const bool pb = node_types[pairs[b].second] == NodeType::Primary;
          ++mm[pa && pb ? 0 : (pa || pb ? 1 : 2)];
        }
        key.assign(mm.begin(), mm.end());
        break;
      }
      case StatisticKind::DegreeMixing: {
        std::array<char, kMaxEnumerationNodes * kMaxEnumerationNodes> cells{};
        for (std::size_t b = 0; b < n_pairs; ++b) {
          if (!((mask >> b) & 1)) continue;
          auto a = deg[pairs[b].first];
          auto c = deg[pairs[b].second];
          if (a > c) std::swap(a, c);
          ++cells[a * kMaxEnumerationNodes + c];
        }
        key.assign(cells.begin(), cells.end());
        break;
      }
    }
    ++table[key];
  }

  std::map<StatisticValue, std::uint64_t> out;
  for (const auto& [k, count] : table) {
    switch (kind) {
      case StatisticKind::EdgeCount:
        out.emplace(StatisticValue(static_cast<std::int64_t>(k[0])), count);
        break;
      case StatisticKind::DegreeDistribution: {
        DegreeDistribution d(k.begin(), k.end());
        while (d.size() > 1 && d.back() == 0) d.pop_back();
        out.emplace(StatisticValue(std::move(d)), count);
        break;
      }
      case StatisticKind::TypeMixing:
        out.emplace(StatisticValue(TypeMixingMatrix{k[0], k[1], k[2]}), count);
        break;
      case StatisticKind::DegreeMixing: {
        DegreeMixingMatrix dmm;
        for (std::int64_t a = 0; a < kMaxEnumerationNodes; ++a) {
          for (std::int64_t c = a; c < kMaxEnumerationNodes; ++c) {
            if (auto v = k[static_cast<std::size_t>(a * kMaxEnumerationNodes + c)]; v != 0) {
              dmm[{a, c}] = v;
            }
          }
        }
        out.emplace(StatisticValue(std::move(dmm)), count);
        break;
      }
    }
  }
  return out;
}

std::uint64_t oracle_enumerate(std::int32_t n, StatisticKind kind, const StatisticValue& x,
                               std::span<const NodeType> types) {
  if (x.kind() != kind) throw DomainError("statistic value does not match the requested kind");
  const auto table = enumerate_classes(n, kind, types);
  const auto want = x.key();
  for (const auto& [value, count] : table) {
    if (value.key() == want) return count;
  }
  return 0;
}

}  // namespace ccmsel
