#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ccmsel/graph.hpp"
#include "ccmsel/random.hpp"

namespace ccmsel {

struct ErMechanism {
  double p = 0.0;
};

/// Degrees ceil(Exp(lambda)) - 1, truncated at n - 1.
struct ExponentialDegreeMechanism {
  double lambda = 1.0;
};

/// Nodes 0..n_primary-1 are primary, the rest specialty.
struct BlockMixingMechanism {
  std::int32_t n_primary = 0;
  double p_pp = 0.0, p_ps = 0.0, p_ss = 0.0;
};

/// ExponentialDegree graph rewired by Metropolis double-edge swaps toward
/// edge weights sigmoid(b0 + b1 k + b2 l), k <= l the endpoint degrees.
struct DegreeMixingMechanism {
  double lambda = 1.0;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
};

using Mechanism = std::variant<ErMechanism, ExponentialDegreeMechanism, BlockMixingMechanism,
                               DegreeMixingMechanism>;

struct SimConfig {
  std::int32_t n = 2;
  Mechanism mechanism;
  std::uint64_t seed = 0;

  /// Throws DomainError for invalid or unrealizable settings.
  void validate() const;
};

struct SimDiagnostics {
  std::int64_t target_degree_sum = 0;  // before repair
  std::int64_t repaired_mass = 0;      // degree units removed by repair
  bool used_fallback = false;          // configuration model gave up
  std::int64_t swaps_attempted = 0;
  std::int64_t swaps_accepted = 0;
};

/// Deterministic given config.seed.
Graph sample_network(const SimConfig& config, SimDiagnostics* diag = nullptr);

/// Target degrees before repair.
std::vector<std::int64_t> draw_exponential_degrees(Rng& rng, std::int32_t n, double lambda);

/// Makes a degree sequence graphical in place: an odd sum loses one unit at
/// the largest entry, then the two largest entries drop by one until the
/// sequence is graphical. Returns the number of degree units removed.
std::int64_t repair_graphical(std::vector<std::int64_t>& degrees);

/// Random simple graph with the given graphical degrees: configuration-model
/// stub pairing that redraws conflicting pairs, restarting a bounded number
/// of times; falls back to Havel–Hakimi followed by random degree-preserving
/// swaps. Sets *fallback when the fallback was used.
std::vector<Graph::Edge> realize_degrees(Rng& rng, const std::vector<std::int64_t>& degrees,
                                         bool* fallback = nullptr);

/// Seed of replica r of a batch run with master seed `seed`.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

}  // namespace ccmsel
