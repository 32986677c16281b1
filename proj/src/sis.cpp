#include "sis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccmsel/graphical.hpp"
#include "ccmsel/log_value.hpp"

namespace ccmsel::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Moves the `need` largest entries of `allowed` (degrees >= 1) down by one in
/// `hist`. Returns false if fewer than `need` entries are available.
bool take_largest(std::span<const std::int64_t> allowed, std::span<std::int64_t> hist,
                  std::int64_t need) {
  for (auto y = static_cast<std::int64_t>(allowed.size()) - 1; y >= 1 && need > 0; --y) {
    const std::int64_t take = std::min(allowed[y], need);
    if (take <= 0) continue;
    hist[y] -= take;
    hist[y - 1] += take;
    need -= take;
  }
  return need == 0;
}

/// Eligible partner degrees: every x in `present` for which feasible(x). The
/// eligible set is upward closed in x (decrementing a larger residual degree
/// is a Robin Hood transfer relative to decrementing a smaller one), so the
/// default path binary searches for the threshold.
template <typename Feasible>
std::vector<char> eligible_degrees(std::span<const std::int64_t> allowed, bool linear_scan,
                                   Feasible&& feasible) {
  std::vector<std::int64_t> present;
  for (std::size_t x = 1; x < allowed.size(); ++x) {
    if (allowed[x] > 0) present.push_back(static_cast<std::int64_t>(x));
  }
  std::vector<char> ok(allowed.size(), 0);
  if (linear_scan) {
    for (auto x : present) ok[x] = feasible(x) ? 1 : 0;
    return ok;
  }
  std::size_t lo = 0, hi = present.size();  // first feasible index in [lo, hi]
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(present[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  for (std::size_t i = lo; i < present.size(); ++i) ok[present[i]] = 1;
  return ok;
}

}  // namespace

DegreeSequenceSampler::DegreeSequenceSampler(std::span<const std::int64_t> degrees,
                                             bool linear_scan)
    : degrees_(degrees.begin(), degrees.end()), linear_scan_(linear_scan) {
  for (auto d : degrees_) max_degree_ = std::max(max_degree_, d);
}

bool DegreeSequenceSampler::feasible_after(std::int64_t partner_degree,
                                           std::int64_t hub_remaining) const {
  scratch_.assign(hist_.begin(), hist_.end());
  --scratch_[partner_degree];
  ++scratch_[partner_degree - 1];
  --allowed_[partner_degree];
  const bool enough = take_largest(allowed_, scratch_, hub_remaining);
  ++allowed_[partner_degree];
  return enough && is_graphical_histogram(scratch_);
}

double DegreeSequenceSampler::sample_log_weight(Rng& rng, EdgeList* edges) {
  const auto n = degrees_.size();
  residual_ = degrees_;
  hist_.assign(static_cast<std::size_t>(max_degree_) + 1, 0);
  for (auto d : residual_) ++hist_[d];
  blocked_.assign(hist_.size(), 0);
  allowed_.assign(hist_.size(), 0);
  is_neighbor_.assign(n, 0);
  std::vector<std::size_t> neighbors;

  double log_weight = 0.0;
  while (true) {
    std::size_t hub = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (residual_[v] > 0 && (hub == n || residual_[v] < residual_[hub])) hub = v;
    }
    if (hub == n) break;

    log_weight -= std::lgamma(static_cast<double>(residual_[hub]) + 1.0);
    --hist_[residual_[hub]];
    neighbors.clear();

    while (residual_[hub] > 0) {
      for (std::size_t x = 0; x < hist_.size(); ++x) allowed_[x] = hist_[x] - blocked_[x];
      allowed_[0] = 0;
      const std::int64_t remaining = residual_[hub] - 1;
      const auto ok = eligible_degrees(allowed_, linear_scan_, [&](std::int64_t x) {
        return feasible_after(x, remaining);
      });

      double total = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        if (v != hub && !is_neighbor_[v] && residual_[v] > 0 && ok[residual_[v]]) {
          total += static_cast<double>(residual_[v]);
        }
      }
      if (total <= 0.0) {
        throw std::logic_error("degree-sequence sampler reached a dead end");
      }
      double u = uniform01(rng) * total;
      std::size_t pick = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (v != hub && !is_neighbor_[v] && residual_[v] > 0 && ok[residual_[v]]) {
          pick = v;
          u -= static_cast<double>(residual_[v]);
          if (u < 0.0) break;
        }
      }
      log_weight -= std::log(static_cast<double>(residual_[pick]) / total);

      --hist_[residual_[pick]];
      --residual_[pick];
      ++hist_[residual_[pick]];
      ++blocked_[residual_[pick]];
      is_neighbor_[pick] = 1;
      neighbors.push_back(pick);
      --residual_[hub];
      if (edges) {
        const auto a = static_cast<std::int32_t>(std::min(hub, pick));
        const auto b = static_cast<std::int32_t>(std::max(hub, pick));
        edges->emplace_back(a, b);
      }
    }
    ++hist_[0];
    for (auto v : neighbors) {
      --blocked_[residual_[v]];
      is_neighbor_[v] = 0;
    }
  }
  return log_weight;
}

BipartiteSampler::BipartiteSampler(std::span<const std::int64_t> rows,
                                   std::span<const std::int64_t> cols, bool linear_scan)
    : rows_(rows.begin(), rows.end()), cols_(cols.begin(), cols.end()), linear_scan_(linear_scan) {
  for (auto d : rows_) max_row_ = std::max(max_row_, d);
  for (auto d : cols_) max_col_ = std::max(max_col_, d);
}

bool BipartiteSampler::feasible_after(std::int64_t partner_degree,
                                      std::int64_t hub_remaining) const {
  scratch_.assign(col_hist_.begin(), col_hist_.end());
  --scratch_[partner_degree];
  ++scratch_[partner_degree - 1];
  --allowed_[partner_degree];
  const bool enough = take_largest(allowed_, scratch_, hub_remaining);
  ++allowed_[partner_degree];
  return enough && is_bigraphical_histogram(row_hist_, scratch_);
}

double BipartiteSampler::sample_log_weight(Rng& rng, EdgeList* edges) {
  const auto n_rows = rows_.size();
  const auto n_cols = cols_.size();
  row_residual_ = rows_;
  col_residual_ = cols_;
  row_hist_.assign(static_cast<std::size_t>(max_row_) + 1, 0);
  col_hist_.assign(static_cast<std::size_t>(max_col_) + 1, 0);
  for (auto d : row_residual_) ++row_hist_[d];
  for (auto d : col_residual_) ++col_hist_[d];
  blocked_.assign(col_hist_.size(), 0);
  allowed_.assign(col_hist_.size(), 0);
  is_neighbor_.assign(n_cols, 0);
  std::vector<std::size_t> neighbors;

  double log_weight = 0.0;
  while (true) {
    std::size_t hub = n_rows;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (row_residual_[r] > 0 && (hub == n_rows || row_residual_[r] < row_residual_[hub])) {
        hub = r;
      }
    }
    if (hub == n_rows) break;

    log_weight -= std::lgamma(static_cast<double>(row_residual_[hub]) + 1.0);
    --row_hist_[row_residual_[hub]];
    neighbors.clear();

    while (row_residual_[hub] > 0) {
      for (std::size_t x = 0; x < col_hist_.size(); ++x) allowed_[x] = col_hist_[x] - blocked_[x];
      allowed_[0] = 0;
      const std::int64_t remaining = row_residual_[hub] - 1;
      const auto ok = eligible_degrees(allowed_, linear_scan_, [&](std::int64_t x) {
        return feasible_after(x, remaining);
      });

      double total = 0.0;
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (!is_neighbor_[c] && col_residual_[c] > 0 && ok[col_residual_[c]]) {
          total += static_cast<double>(col_residual_[c]);
        }
      }
      if (total <= 0.0) throw std::logic_error("bipartite sampler reached a dead end");
      double u = uniform01(rng) * total;
      std::size_t pick = n_cols;
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (!is_neighbor_[c] && col_residual_[c] > 0 && ok[col_residual_[c]]) {
          pick = c;
          u -= static_cast<double>(col_residual_[c]);
          if (u < 0.0) break;
        }
      }
      log_weight -= std::log(static_cast<double>(col_residual_[pick]) / total);

      --col_hist_[col_residual_[pick]];
      --col_residual_[pick];
      ++col_hist_[col_residual_[pick]];
      ++blocked_[col_residual_[pick]];
      is_neighbor_[pick] = 1;
      neighbors.push_back(pick);
      --row_residual_[hub];
      if (edges) {
        edges->emplace_back(static_cast<std::int32_t>(hub), static_cast<std::int32_t>(pick));
      }
    }
    ++row_hist_[0];
    for (auto c : neighbors) {
      --blocked_[col_residual_[c]];
      is_neighbor_[c] = 0;
    }
  }
  return log_weight;
}

DegreeMixingSampler::DegreeMixingSampler(const DegreeDistribution& dist,
                                         const DegreeMixingMatrix& dmm) {
  std::vector<std::int64_t> index_of(dist.size(), -1);
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k] > 0) {
      index_of[k] = static_cast<std::int64_t>(classes_.size());
      classes_.push_back({static_cast<std::int64_t>(k), dist[k], {}});
    }
  }
  for (auto& c : classes_) c.targets.assign(classes_.size(), 0);
  for (const auto& [cell, count] : dmm) {
    const auto a = index_of.at(static_cast<std::size_t>(cell.first));
    const auto b = index_of.at(static_cast<std::size_t>(cell.second));
    if (a == b) {
      classes_[a].targets[a] += 2 * count;
    } else {
      classes_[a].targets[b] += count;
      classes_[b].targets[a] += count;
    }
  }
}

double DegreeMixingSampler::sample_log_weight(Rng& rng) {
  const auto n_classes = classes_.size();
  // alloc[a][v * n_classes + b]: stubs of vertex v in class a aimed at class b
  std::vector<std::vector<std::int64_t>> alloc(n_classes);
  double log_proposal = 0.0;
  std::vector<std::int64_t> remaining, cap;
  std::vector<double> logp;
  std::vector<std::int64_t> values, row_hist, col_hist;
  // Whether block (a, b) can still be realized when vertex v of class a sends
  // x stubs to b and the later vertices share `rest`. Spreading `rest` evenly
  // is the most favorable completion since realizability is closed under
  // majorization; the same holds for the unknown side of a block whose
  // other class has not been allocated yet.
  auto block_completable = [&](std::size_t a, std::int64_t v, std::size_t b, std::int64_t x,
                               std::int64_t rest, std::int64_t later, std::int64_t row_cap) {
    const auto& table = alloc[a];
    row_hist.assign(static_cast<std::size_t>(row_cap) + 2, 0);
    for (std::int64_t u = 0; u < v; ++u) ++row_hist[table[u * n_classes + b]];
    ++row_hist[x];
    if (later > 0) {
      const std::int64_t q = rest / later, extra = rest % later;
      if (q + (extra > 0) > row_cap) return false;
      row_hist[q] += later - extra;
      row_hist[q + 1] += extra;
    } else if (rest != 0) {
      return false;
    }
    if (b == a) return is_graphical_histogram(row_hist);
    const auto& other = classes_[b];
    if (b < a) {
      col_hist.assign(static_cast<std::size_t>(classes_[a].size) + 1, 0);
      const auto& ot = alloc[b];
      for (std::int64_t w = 0; w < other.size; ++w) ++col_hist[ot[w * n_classes + a]];
    } else {
      const std::int64_t total = classes_[a].targets[b];
      const std::int64_t q = total / other.size, extra = total % other.size;
      col_hist.assign(static_cast<std::size_t>(q) + 2, 0);
      col_hist[q] += other.size - extra;
      col_hist[q + 1] += extra;
    }
    return is_bigraphical_histogram(row_hist, col_hist);
  };
  for (std::size_t a = 0; a < n_classes; ++a) {
    const auto& cls = classes_[a];
    auto& table = alloc[a];
    table.assign(static_cast<std::size_t>(cls.size) * n_classes, 0);
    remaining = cls.targets;
    cap.resize(n_classes);
    for (std::size_t b = 0; b < n_classes; ++b) {
      cap[b] = std::min(cls.degree, b == a ? cls.size - 1 : classes_[b].size);
    }
    // Each vertex splits its stubs over classes in order. The count toward
    // class b is hypergeometric given what is left, truncated to the values
    // that keep the rest of the allocation within block capacities.
    for (std::int64_t v = 0; v < cls.size; ++v) {
      auto* row = table.data() + v * static_cast<std::int64_t>(n_classes);
      const std::int64_t later = cls.size - v - 1;  // vertices after v
      std::int64_t stubs = cls.degree;
      std::int64_t pool = 0;
      for (auto r : remaining) pool += r;
      // The later vertices can absorb what is left iff no class needs more
      // than later * cap stubs (a max-flow cut argument), so v's count toward
      // b lies in [floor_b, ceil_b] and the sums of these bound the rest.
      std::vector<std::int64_t> floor_tail(n_classes + 1, 0), ceil_tail(n_classes + 1, 0);
      for (std::size_t b = n_classes; b-- > 0;) {
        floor_tail[b] = floor_tail[b + 1] + std::max<std::int64_t>(0, remaining[b] - later * cap[b]);
        ceil_tail[b] = ceil_tail[b + 1] + std::min(cap[b], remaining[b]);
      }
      for (std::size_t b = 0; b < n_classes && stubs > 0; ++b) {
        const std::int64_t r = remaining[b];
        if (r == 0) continue;
        std::int64_t lo = std::max<std::int64_t>({0, stubs - (pool - r), r - later * cap[b],
                                                  stubs - ceil_tail[b + 1]});
        std::int64_t hi = std::min({stubs, r, cap[b], stubs - floor_tail[b + 1]});
        if (lo > hi) return kNegInf;
        logp.clear();
        values.clear();
        for (std::int64_t t = lo; t <= hi; ++t) {
          if (!block_completable(a, v, b, t, r - t, later, cap[b])) continue;
          values.push_back(t);
          logp.push_back(log_binomial(double(r), double(t)) +
                         log_binomial(double(pool - r), double(stubs - t)));
        }
        if (values.empty()) return kNegInf;
        std::size_t pick = 0;
        if (values.size() > 1) {
          const double norm = log_sum_exp(logp);
          double u = uniform01(rng);
          pick = logp.size() - 1;
          for (std::size_t i = 0; i < logp.size(); ++i) {
            const double pr = std::exp(logp[i] - norm);
            if (u < pr) {
              pick = i;
              break;
            }
            u -= pr;
          }
          log_proposal += logp[pick] - norm;
        }
        const std::int64_t x = values[pick];
        row[b] = x;
        remaining[b] -= x;
        stubs -= x;
        pool -= r;
      }
      if (stubs != 0) return kNegInf;
    }
  }

  double log_weight = -log_proposal;
  std::vector<std::int64_t> seq, cols;
  for (std::size_t a = 0; a < n_classes; ++a) {
    const auto& cls = classes_[a];
    if (cls.targets[a] > 0) {
      seq.resize(static_cast<std::size_t>(cls.size));
      for (std::int64_t v = 0; v < cls.size; ++v) {
        seq[v] = alloc[a][v * static_cast<std::int64_t>(n_classes) + static_cast<std::int64_t>(a)];
      }
      if (!is_graphical(seq)) return kNegInf;
      DegreeSequenceSampler block(seq);
      log_weight += block.sample_log_weight(rng);
    }
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      if (cls.targets[b] == 0) continue;
      const auto& other = classes_[b];
      seq.resize(static_cast<std::size_t>(cls.size));
      cols.resize(static_cast<std::size_t>(other.size));
      for (std::int64_t v = 0; v < cls.size; ++v) {
        seq[v] = alloc[a][v * static_cast<std::int64_t>(n_classes) + static_cast<std::int64_t>(b)];
      }
      for (std::int64_t w = 0; w < other.size; ++w) {
        cols[w] = alloc[b][w * static_cast<std::int64_t>(n_classes) + static_cast<std::int64_t>(a)];
      }
      if (!is_bigraphical(seq, cols)) return kNegInf;
      BipartiteSampler block(seq, cols);
      log_weight += block.sample_log_weight(rng);
    }
  }
  return log_weight;
}

WeightSummary summarize_log_weights(std::span<const double> log_weights) {
  double hi = kNegInf;
  for (double w : log_weights) hi = std::max(hi, w);
  if (hi == kNegInf) return {kNegInf, std::numeric_limits<double>::infinity()};
  const auto count = static_cast<double>(log_weights.size());
  double mean = 0.0;
  for (double w : log_weights) mean += std::exp(w - hi);
  mean /= count;
  double var = 0.0;
  for (double w : log_weights) {
    const double d = std::exp(w - hi) - mean;
    var += d * d;
  }
  double rel_se = std::numeric_limits<double>::infinity();
  if (log_weights.size() > 1) {
    var /= (count - 1.0);
    rel_se = std::sqrt(var / count) / mean;
  }
  return {hi + std::log(mean), rel_se};
}

}  // namespace ccmsel::detail
