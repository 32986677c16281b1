#include "oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ccmsel/errors.hpp"
#include "ccmsel/random.hpp"

namespace ccmsel::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Pairs {
  std::vector<std::pair<int, int>> list;
  explicit Pairs(int n) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) list.emplace_back(i, j);
  }
};

std::vector<std::int64_t> degrees_of(std::uint64_t mask, const Pairs& pairs, int n) {
  std::vector<std::int64_t> deg(n, 0);
  for (std::size_t e = 0; e < pairs.list.size(); ++e) {
    if (mask >> e & 1) {
      ++deg[pairs.list[e].first];
      ++deg[pairs.list[e].second];
    }
  }
  return deg;
}

StatisticValue statistic_of(std::uint64_t mask, const Pairs& pairs, int n, StatisticKind kind,
                            std::span<const NodeType> types) {
  switch (kind) {
    case StatisticKind::EdgeCount:
      return StatisticValue(static_cast<std::int64_t>(std::popcount(mask)));
    case StatisticKind::DegreeDistribution: {
      const auto deg = degrees_of(mask, pairs, n);
      DegreeDistribution d(*std::max_element(deg.begin(), deg.end()) + 1, 0);
      for (auto k : deg) ++d[k];
      return StatisticValue(std::move(d));
    }
    case StatisticKind::TypeMixing: {
      TypeMixingMatrix m;
      for (std::size_t e = 0; e < pairs.list.size(); ++e) {
        if (!(mask >> e & 1)) continue;
        const bool a = types[pairs.list[e].first] == NodeType::Primary;
        const bool b = types[pairs.list[e].second] == NodeType::Primary;
        if (a && b) ++m.pp;
        else if (a || b) ++m.ps;
        else ++m.ss;
      }
      return StatisticValue(m);
    }
    case StatisticKind::DegreeMixing: {
      const auto deg = degrees_of(mask, pairs, n);
      DegreeMixingMatrix m;
      for (std::size_t e = 0; e < pairs.list.size(); ++e) {
        if (!(mask >> e & 1)) continue;
        auto k = deg[pairs.list[e].first], l = deg[pairs.list[e].second];
        if (k > l) std::swap(k, l);
        ++m[{k, l}];
      }
      return StatisticValue(std::move(m));
    }
  }
  throw std::logic_error("unknown statistic kind");
}

Graph graph_of(std::uint64_t mask, const Pairs& pairs, int n, std::span<const NodeType> types) {
  std::vector<Graph::Edge> edges;
  for (std::size_t e = 0; e < pairs.list.size(); ++e) {
    if (mask >> e & 1) edges.emplace_back(pairs.list[e].first, pairs.list[e].second);
  }
  if (types.empty()) return Graph::with_nodes(n, std::move(edges));
  return Graph::with_types({types.begin(), types.end()}, std::move(edges));
}

std::uint64_t mask_of(const Graph& g, const Pairs& pairs) {
  std::uint64_t mask = 0;
  for (std::size_t e = 0; e < pairs.list.size(); ++e) {
    if (g.adjacent(pairs.list[e].first, pairs.list[e].second)) mask |= std::uint64_t{1} << e;
  }
  return mask;
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Composite Simpson of exp(log_f) over [a, b] with `intervals` (even) panels,
// accumulated relative to the largest sample.
double log_simpson(const std::function<double(double)>& log_f, double a, double b,
                   std::int64_t intervals) {
  const double h = (b - a) / static_cast<double>(intervals);
  std::vector<double> lf(static_cast<std::size_t>(intervals) + 1);
  double peak = kNegInf;
  for (std::int64_t i = 0; i <= intervals; ++i) {
    const double x = i == intervals ? b : a + h * static_cast<double>(i);
    const double v = log_f(x);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("oracle integrand is not finite at " + std::to_string(x));
    }
    lf[static_cast<std::size_t>(i)] = v;
    peak = std::max(peak, v);
  }
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::int64_t i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::exp(lf[static_cast<std::size_t>(i)] - peak);
  }
  return peak + std::log(sum * h / 3.0);
}

struct Integral {
  double value = 0.0;
  double bound = 0.0;
  std::int64_t cost = 0;
};

Integral richardson(const std::function<double(double)>& log_f, double a, double b,
                    std::int64_t intervals) {
  if (intervals % 4 != 0) intervals += 4 - intervals % 4;
  const double fine = log_simpson(log_f, a, b, intervals);
  const double coarse = log_simpson(log_f, a, b, intervals / 2);
  // Simpson's error shrinks 16-fold per halving of h.
  const double bound = fine == kNegInf ? 0.0 : std::abs(fine - coarse) / 15.0 + 1e-12;
  return {fine, bound, intervals + 1 + intervals / 2 + 1};
}

Integral beta_binomial_integral(std::int64_t trials, std::int64_t successes, BetaPrior prior,
                                std::int64_t intervals) {
  if (trials == 0) return {0.0, 0.0, 0};
  const double log_c = std::lgamma(trials + 1.0) - std::lgamma(successes + 1.0) -
                       std::lgamma(double(trials - successes) + 1.0);
  const double log_b = std::lgamma(prior.alpha) + std::lgamma(prior.beta) -
                       std::lgamma(prior.alpha + prior.beta);
  const double a = double(successes) + prior.alpha - 1.0;
  const double b = double(trials - successes) + prior.beta - 1.0;
  auto f = [&](double p) { return log_c + xlogy(a, p) + xlogy(b, 1.0 - p) - log_b; };
  return richardson(f, 0.0, 1.0, intervals);
}

}  // namespace

std::map<StatisticValue, ClassEntry> enumerate(std::int32_t n, StatisticKind kind,
                                               std::span<const NodeType> types) {
  if (n < 1 || n > 8) throw RefusalError("oracle enumeration needs 1 <= n <= 8");
  if (kind == StatisticKind::TypeMixing && static_cast<std::int32_t>(types.size()) != n) {
    throw TypedAttributeMissing("oracle type mixing needs one type per node");
  }
  const Pairs pairs(n);
  const std::uint64_t total = std::uint64_t{1} << pairs.list.size();
  std::map<StatisticValue, ClassEntry> table;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    auto x = statistic_of(mask, pairs, n, kind, types);
    auto it = table.find(x);
    if (it == table.end()) {
      it = table.emplace(std::move(x), ClassEntry{0, graph_of(mask, pairs, n, types)}).first;
    }
    ++it->second.count;
  }
  return table;
}

OracleReport volume(const Graph& g, StatisticKind kind) {
  const auto n = g.node_count();
  if (n > 8) throw RefusalError("oracle enumeration needs n <= 8");
  const Pairs pairs(n);
  const auto& types = g.types();
  const auto target = statistic_of(mask_of(g, pairs), pairs, n, kind, types);
  const std::uint64_t total = std::uint64_t{1} << pairs.list.size();
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (statistic_of(mask, pairs, n, kind, types) == target) ++count;
  }
  return {"volume", LogValue::from_linear(static_cast<double>(count)), 0.0,
          static_cast<std::int64_t>(total)};
}

OracleReport evidence(const Graph& g, const ModelSpec& spec, bool normalized_degree_pmf,
                      bool degree_multinomial, std::int64_t intervals) {
  const auto n = g.node_count();
  if (n > 6) throw RefusalError("oracle evidence needs n <= 6");
  const std::int64_t pairs = std::int64_t{n} * (n - 1) / 2;
  const std::int64_t e = g.edge_count();
  Integral in;
  StatisticKind kind = StatisticKind::EdgeCount;
  switch (spec.id) {
    case ModelId::M1:
      in = beta_binomial_integral(pairs, e, {1.0, 1.0}, intervals);
      break;
    case ModelId::M2:
      in = beta_binomial_integral(pairs, e, spec.beta_prior, intervals);
      break;
    case ModelId::M3: {
      kind = StatisticKind::DegreeDistribution;
      const auto deg = g.degrees();
      std::vector<std::int64_t> hist(n, 0);
      for (auto d : deg) ++hist[d];
      double log_multi = std::lgamma(n + 1.0);
      for (auto c : hist) log_multi -= std::lgamma(c + 1.0);
      if (!degree_multinomial) log_multi = 0.0;
      const auto [mu, sigma] = spec.lambda_prior;
      auto f = [&](double lambda) {
        if (lambda <= 0.0) return kNegInf;
        double ll = log_multi;
        for (auto d : deg) {
          ll += normalized_degree_pmf ? std::log(-std::expm1(-lambda)) - lambda * double(d)
                                      : std::log(lambda) - lambda * double(d);
        }
        const double z = (lambda - mu) / sigma;
        return ll - 0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
      };
      const double lo = std::max(0.0, mu - 40.0 * sigma);
      const double hi = mu + 40.0 * sigma;
      if (hi <= 0.0) throw DomainError("oracle m3 prior has no mass on lambda > 0");
      in = richardson(f, lo, hi, intervals);
      break;
    }
    case ModelId::M4: {
      kind = StatisticKind::TypeMixing;
      if (!g.fully_typed()) throw TypedAttributeMissing("oracle m4 needs typed nodes");
      const std::int64_t np = g.count_type(NodeType::Primary);
      const std::int64_t ns = n - np;
      std::int64_t epp = 0, eps = 0, ess = 0;
      for (auto [i, j] : g.edges()) {
        const bool a = g.types()[i] == NodeType::Primary;
        const bool b = g.types()[j] == NodeType::Primary;
        if (a && b) ++epp;
        else if (a || b) ++eps;
        else ++ess;
      }
      const std::int64_t cap[3] = {np * (np - 1) / 2, np * ns, ns * (ns - 1) / 2};
      const std::int64_t cnt[3] = {epp, eps, ess};
      for (int b = 0; b < 3; ++b) {
        const auto part = beta_binomial_integral(cap[b], cnt[b], spec.block_priors[b], intervals);
        in.value += part.value;
        in.bound += part.bound;
        in.cost += part.cost;
      }
      break;
    }
    case ModelId::M5:
      throw RefusalError("oracle evidence covers m1..m4; use m5_integral");
  }
  const auto vol = volume(g, kind);
  return {"log_evidence", LogValue::from_log(in.value - vol.value.log()), in.bound,
          in.cost + vol.cost};
}

OracleReport m5_integral(const Graph& g, const MvnPrior& prior, const Eigen::Vector3d& center,
                         const Eigen::Matrix3d& scale, std::int64_t samples, std::uint64_t seed) {
  // cells (k, l), k <= l, over degrees present; (k, k) needs two such vertices
  const auto deg = g.degrees();
  std::map<std::int64_t, std::int64_t> dist;
  for (auto d : deg) ++dist[d];
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> observed;
  for (auto [i, j] : g.edges()) {
    auto k = deg[i], l = deg[j];
    if (k > l) std::swap(k, l);
    ++observed[{k, l}];
  }
  struct Cell {
    double k, l, count;
  };
  std::vector<Cell> cells;
  double log_coef = std::lgamma(double(g.edge_count()) + 1.0);
  for (auto [k, nk] : dist) {
    if (k == 0) continue;
    for (auto [l, nl] : dist) {
      if (l < k || (l == k && nk < 2)) continue;
      auto it = observed.find({k, l});
      const double c = it == observed.end() ? 0.0 : double(it->second);
      cells.push_back({double(k), double(l), c});
      log_coef -= std::lgamma(c + 1.0);
    }
  }
  auto log_target = [&](const Eigen::Vector3d& b) {
    std::vector<double> lw(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double eta = b[0] + b[1] * cells[c].k + b[2] * cells[c].l;
      lw[c] = eta >= 0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
    }
    const double norm = log_sum_exp(lw);
    double ll = log_coef;
    for (std::size_t c = 0; c < cells.size(); ++c) ll += cells[c].count * (lw[c] - norm);
    const Eigen::LLT<Eigen::Matrix3d> chol(prior.cov);
    const Eigen::Vector3d r = chol.matrixL().solve(b - prior.mean);
    const double log_det = 2.0 * chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return ll - 0.5 * r.squaredNorm() - 0.5 * log_det - 1.5 * std::log(2.0 * std::numbers::pi);
  };

  constexpr double nu = 4.0, dim = 3.0;
  const Eigen::LLT<Eigen::Matrix3d> sc(scale);
  const Eigen::Matrix3d lower = sc.matrixL();
  const double log_det_s = 2.0 * lower.diagonal().array().log().sum();
  const double log_norm_t = std::lgamma((nu + dim) / 2) - std::lgamma(nu / 2) -
                            dim / 2 * std::log(nu * std::numbers::pi) - 0.5 * log_det_s;
  std::vector<double> lw(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
    Eigen::Vector3d z;
    for (int d = 0; d < 3; ++d) z[d] = standard_normal(rng);
    double chi2 = 0.0;
    for (int d = 0; d < 4; ++d) {
      const double u = standard_normal(rng);
      chi2 += u * u;
    }
    const Eigen::Vector3d x = center + lower * z / std::sqrt(chi2 / nu);
    const Eigen::Vector3d r = lower.triangularView<Eigen::Lower>().solve(x - center);
    const double log_q = log_norm_t - (nu + dim) / 2 * std::log1p(r.squaredNorm() / nu);
    lw[static_cast<std::size_t>(i)] = log_target(x) - log_q;
  }
  const double peak = *std::max_element(lw.begin(), lw.end());
  double s1 = 0.0, s2 = 0.0;
  for (double w : lw) {
    const double v = std::exp(w - peak);
    s1 += v;
    s2 += v * v;
  }
  const double m = s1 / double(samples);
  const double var = (s2 / double(samples) - m * m) * double(samples) / double(samples - 1);
  const double se = std::sqrt(std::max(var, 0.0) / double(samples)) / m;
  return {"m5_log_integral", LogValue::from_log(peak + std::log(m)), se, samples};
}

}  // namespace ccmsel::oracle
