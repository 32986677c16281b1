#pragma once

// Brute-force references for the test suite. Nothing here is linked into
// the library or the CLI.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccmsel/evidence.hpp"
#include "ccmsel/graph.hpp"
#include "ccmsel/log_value.hpp"

namespace ccmsel::oracle {

struct OracleReport {
  std::string quantity;
  LogValue value;
  double error_bound = 0.0;  // absolute, on the log scale
  std::int64_t cost = 0;     // graphs enumerated or integrand evaluations
};

/// One congruence class found by enumeration: its size and the first graph
/// (in bitmask order) that lands in it.
struct ClassEntry {
  std::uint64_t count = 0;
  Graph representative = Graph::with_nodes(1, {});
};

/// Every class of `kind` over all graphs on n <= 8 nodes. Node i has type
/// types[i] when given (required for TypeMixing).
std::map<StatisticValue, ClassEntry> enumerate(std::int32_t n, StatisticKind kind,
                                               std::span<const NodeType> types = {});

/// |c_phi(phi(g))| by enumeration; n <= 8.
OracleReport volume(const Graph& g, StatisticKind kind);

/// Evidence of m1..m4 for n <= 6: volume by enumeration, the parameter
/// integral by composite Simpson on 10^6 intervals, error bound from the
/// Richardson comparison with half the intervals.
OracleReport evidence(const Graph& g, const ModelSpec& spec, bool normalized_degree_pmf = false,
                      bool degree_multinomial = true, std::int64_t intervals = 1'000'000);

/// Importance-sampling estimate of the m5 parameter integral with a
/// multivariate Student-t proposal (4 degrees of freedom) centered at
/// `center` with scale matrix `scale`. The error bound is the standard error
/// of the log estimate.
OracleReport m5_integral(const Graph& g, const MvnPrior& prior, const Eigen::Vector3d& center,
                         const Eigen::Matrix3d& scale, std::int64_t samples, std::uint64_t seed);

}  // namespace ccmsel::oracle
