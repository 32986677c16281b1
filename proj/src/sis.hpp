#pragma once

// Sequential importance samplers used by the volume estimators.
//
// Each sampler builds one graph from an empty state, choosing a hub vertex
// (smallest positive residual degree, lowest index on ties) and attaching it
// edge by edge. A partner is eligible only if the residual problem stays
// realizable; it is drawn with probability proportional to its residual
// degree. The returned log weight is -log(c(Y) P(Y)) where P(Y) is the
// probability of the ordered construction and c(Y) the product of hub
// degree factorials, i.e. the number of orderings yielding the same graph.
// Its expectation on the linear scale is the number of graphs.

#include <cstdint>
#include <span>
#include <vector>

#include "ccmsel/graph.hpp"
#include "ccmsel/random.hpp"

namespace ccmsel::detail {

using EdgeList = std::vector<std::pair<std::int32_t, std::int32_t>>;

class DegreeSequenceSampler {
 public:
  /// degrees must be graphical.
  explicit DegreeSequenceSampler(std::span<const std::int64_t> degrees,
                                 bool linear_scan = false);

  /// One construction; optionally records its edges.
  double sample_log_weight(Rng& rng, EdgeList* edges = nullptr);

  /// Test hook: checks every distinct candidate degree instead of binary
  /// searching on the (monotone) eligibility threshold.
  bool linear_scan() const noexcept { return linear_scan_; }

 private:
  bool feasible_after(std::int64_t partner_degree, std::int64_t hub_remaining) const;

  std::vector<std::int64_t> degrees_;
  std::int64_t max_degree_ = 0;
  bool linear_scan_;

  // per-sample state
  std::vector<std::int64_t> residual_;
  std::vector<std::int64_t> hist_;       // residual degrees, non-hub vertices
  std::vector<std::int64_t> blocked_;    // residual degrees, current hub's neighbours
  std::vector<char> is_neighbor_;
  mutable std::vector<std::int64_t> scratch_;
  mutable std::vector<std::int64_t> allowed_;
};

/// Same scheme for bipartite graphs with fixed row and column degrees. Hubs
/// are always rows.
class BipartiteSampler {
 public:
  /// (rows, cols) must be bigraphical.
  BipartiteSampler(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols,
                   bool linear_scan = false);

  /// Edges are recorded as (row index, column index).
  double sample_log_weight(Rng& rng, EdgeList* edges = nullptr);

 private:
  bool feasible_after(std::int64_t partner_degree, std::int64_t hub_remaining) const;

  std::vector<std::int64_t> rows_, cols_;
  std::int64_t max_row_ = 0, max_col_ = 0;
  bool linear_scan_;

  std::vector<std::int64_t> row_residual_, col_residual_;
  std::vector<std::int64_t> row_hist_, col_hist_, blocked_;
  std::vector<char> is_neighbor_;
  mutable std::vector<std::int64_t> scratch_;
  mutable std::vector<std::int64_t> allowed_;
};

/// Estimator for the number of graphs with a labeled degree sequence and a
/// given degree-mixing matrix. One sample draws a stub allocation (how many
/// of each vertex's edges go to each degree class) vertex by vertex from
/// hypergeometrics truncated to counts that keep every block realizable,
/// then runs one SIS construction per block: a simple graph inside each
/// class and a bipartite graph between each pair of classes.
class DegreeMixingSampler {
 public:
  DegreeMixingSampler(const DegreeDistribution& dist, const DegreeMixingMatrix& dmm);

  /// -inf when the drawn allocation admits no graph.
  double sample_log_weight(Rng& rng);

 private:
  struct DegreeClass {
    std::int64_t degree;
    std::int64_t size;
    std::vector<std::int64_t> targets;  // stub count toward each class
  };
  std::vector<DegreeClass> classes_;
};

/// Summary of a batch of log importance weights.
struct WeightSummary {
  double log_mean;
  double relative_se;
};

WeightSummary summarize_log_weights(std::span<const double> log_weights);

}  // namespace ccmsel::detail
