#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>

#include "ccmsel/graph.hpp"
#include "ccmsel/log_value.hpp"

namespace ccmsel {

enum class VolumeMethod { Exact, ImportanceSampling, Oracle };

std::string_view to_string(VolumeMethod m);

/// Estimate of log |c_phi(x)|, the number of labeled graphs on n nodes whose
/// statistic equals x.
struct VolumeEstimate {
  LogValue log_count;
  /// Standard error of log_count (delta method: relative SE of the count).
  /// Zero for Exact and Oracle results.
  double std_error_log = 0.0;
  VolumeMethod method = VolumeMethod::Exact;
  std::int64_t samples = 0;
};

struct SamplingOptions {
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  /// Classes on at most this many nodes are counted exactly by backtracking.
  std::int32_t oracle_limit = 8;
  std::int32_t jobs = 1;
};

/// log C(n(n-1)/2, m).
VolumeEstimate log_volume_edges(std::int64_t n, std::int64_t m);

/// Product of per-block binomials over the pp, ps and ss blocks.
VolumeEstimate log_volume_type_mixing(std::int64_t n_primary, std::int64_t n_specialty,
                                      const TypeMixingMatrix& mixing);

/// Number of labeled simple graphs whose vertex i has degree d[i].
/// Throws DomainError naming the violated Erdős–Gallai index when d is not
/// graphical.
VolumeEstimate log_volume_degree_sequence(std::span<const std::int64_t> degrees,
                                          const SamplingOptions& opts = {});

/// Number of labeled graphs with degree distribution D:
/// multinomial(n; D) times the count for any one representative sequence.
VolumeEstimate log_volume_degree_distribution(const DegreeDistribution& dist,
                                              const SamplingOptions& opts = {});

/// Number of labeled graphs on n nodes with degree-mixing matrix dmm.
VolumeEstimate log_volume_degree_mixing(const DegreeMixingMatrix& dmm, std::int64_t n,
                                        const SamplingOptions& opts = {});

/// Dispatches on kind using the statistic of g.
VolumeEstimate log_volume(const Graph& g, StatisticKind kind, const SamplingOptions& opts = {});

/// Recovers the degree distribution implied by a degree-mixing matrix on n
/// nodes: each degree-k endpoint is counted once, so endpoints(k) = k * D[k].
/// Throws DomainError if the matrix is inconsistent.
DegreeDistribution degree_distribution_from_mixing(const DegreeMixingMatrix& dmm,
                                                   std::int64_t n);

/// Exact count of graphs realizing a labeled degree sequence, by backtracking.
std::uint64_t count_degree_sequence_exact(std::span<const std::int64_t> degrees);

/// Exact count of graphs whose labeled degree sequence is `degrees` and whose
/// degree-mixing matrix equals dmm.
std::uint64_t count_degree_mixing_exact(std::span<const std::int64_t> degrees,
                                        const DegreeMixingMatrix& dmm);

inline constexpr std::int32_t kMaxEnumerationNodes = 8;

/// Full class-size table {x -> |c_phi(x)|} over all 2^{n(n-1)/2} graphs on n
/// nodes. TypeMixing uses node i's type types[i]. Refuses n > 8.
std::map<StatisticValue, std::uint64_t> enumerate_classes(std::int32_t n, StatisticKind kind,
                                                          std::span<const NodeType> types = {});

/// |c_phi(x)| by exhaustive enumeration.
std::uint64_t oracle_enumerate(std::int32_t n, StatisticKind kind, const StatisticValue& x,
                               std::span<const NodeType> types = {});

}  // namespace ccmsel
