#include "ccmsel/prior_fit.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <numeric>
#include <thread>

#include "ccmsel/errors.hpp"

namespace ccmsel {

namespace {

double pairs(double n) { return n * (n - 1.0) / 2.0; }

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <class F>
void parallel_for(std::size_t count, int jobs, F&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

BetaPrior fit_beta_moments(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("Beta fit needs at least two states");
  for (double v : values) {
    if (!(v > 0.0 && v < 1.0)) {
      throw DomainError("Beta fit: every density must lie strictly inside (0, 1), got " +
                        std::to_string(v));
    }
  }
  const double m = mean_of(values);
  const double v = sample_variance(values);
  if (!(v > 0.0)) {
    throw DegeneratePriorError(
        "Beta fit: sample variance is zero; supply a variance floor or more varied states");
  }
  const double common = m * (1.0 - m) / v - 1.0;
  if (!(common > 0.0)) {
    throw DomainError("Beta fit: sample variance exceeds m(1-m), no Beta has these moments");
  }
  return {m * common, (1.0 - m) * common};
}

double edge_density(const Graph& g) {
  const double cap = pairs(g.node_count());
  return cap > 0 ? static_cast<double>(g.edge_count()) / cap : 0.0;
}

BetaPrior fit_beta_density(std::span<const Graph> states) {
  std::vector<double> d;
  for (const auto& g : states) d.push_back(edge_density(g));
  return fit_beta_moments(d);
}

LambdaFit fit_lambda_normal(std::span<const Graph> states) {
  LambdaFit fit;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& g = states[i];
    if (g.edge_count() == 0) {
      fit.skipped.push_back(i);
      continue;
    }
    const double mean_degree = 2.0 * static_cast<double>(g.edge_count()) / g.node_count();
    fit.rates.push_back(1.0 / mean_degree);
  }
  if (fit.rates.size() < 2) throw DomainError("lambda fit needs at least two states with edges");
  fit.prior.mu = mean_of(fit.rates);
  fit.prior.sigma = std::max(1e-6, std::sqrt(sample_variance(fit.rates)));
  return fit;
}

bool fit_degree_logistic(const Graph& g, std::int64_t max_degree, Eigen::Vector3d& beta) {
  const auto dist = degree_distribution(g);
  const auto dmm = degree_mixing(g);
  std::vector<LogisticCell> cells;
  const auto top = std::min<std::int64_t>(max_degree, static_cast<std::int64_t>(dist.size()) - 1);
  for (std::int64_t k = 1; k <= top; ++k) {
    const double dk = static_cast<double>(dist[static_cast<std::size_t>(k)]);
    if (dk == 0) continue;
    for (std::int64_t l = k; l <= top; ++l) {
      const double dl = static_cast<double>(dist[static_cast<std::size_t>(l)]);
      if (dl == 0) continue;
      const double n = k == l ? pairs(dk) : dk * dl;
      if (n == 0) continue;
      auto it = dmm.find({k, l});
      const double y = it == dmm.end() ? 0.0 : static_cast<double>(it->second);
      cells.push_back({double(k), double(l), y, n});
    }
  }
  return fit_binomial_logistic(cells, beta);
}

bool fit_binomial_logistic(std::span<const LogisticCell> input, Eigen::Vector3d& beta) {
  struct Cell {
    Eigen::Vector3d x;
    double y, n;
  };
  std::vector<Cell> cells;
  double total_y = 0, total_n = 0;
  for (const auto& c : input) {
    cells.push_back({Eigen::Vector3d(1.0, c.k, c.l), c.successes, c.trials});
    total_y += c.successes;
    total_n += c.trials;
  }
  if (cells.size() < 3 || total_y == 0 || total_y == total_n) return false;

  auto loglik = [&](const Eigen::Vector3d& b) {
    double v = 0;
    for (const auto& c : cells) {
      const double eta = b.dot(c.x);
      v += c.y * log_sigmoid(eta) + (c.n - c.y) * log_sigmoid(-eta);
    }
    return v;
  };
  Eigen::Vector3d b(std::log(total_y / (total_n - total_y)), 0.0, 0.0);
  double value = loglik(b);
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
    Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
    for (const auto& c : cells) {
      const double s = sigmoid(b.dot(c.x));
      grad += (c.y - c.n * s) * c.x;
      info += c.n * s * (1.0 - s) * c.x * c.x.transpose();
    }
    Eigen::LDLT<Eigen::Matrix3d> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const Eigen::Vector3d step = ldlt.solve(grad);
    const double decrement = grad.dot(step);
    if (!std::isfinite(decrement)) return false;
    if (decrement < 1e-10) {
      beta = b;
      return b.allFinite();
    }
    double t = 1.0;
    Eigen::Vector3d next;
    double nv = -INFINITY;
    for (int h = 0; h < 50; ++h, t *= 0.5) {
      next = b + t * step;
      nv = loglik(next);
      if (nv >= value) break;
    }
    if (!(nv >= value)) return false;
    b = next;
    value = nv;
  }
  return false;
}

MvnFit fit_mvn_degree_logistic(std::span<const Graph> states, std::int64_t max_degree, int jobs) {
  std::vector<Eigen::Vector3d> coef(states.size());
  std::vector<char> ok(states.size());
  parallel_for(states.size(), jobs, [&](std::size_t i) {
    ok[i] = fit_degree_logistic(states[i], max_degree, coef[i]);
  });
  MvnFit fit;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (ok[i]) fit.coefficients.push_back(coef[i]);
    else fit.skipped.push_back(i);
  }
  const std::size_t m = fit.coefficients.size();
  if (m < 2) throw DomainError("degree-logistic prior fit needs at least two converged states");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& c : fit.coefficients) mean += c;
  mean /= static_cast<double>(m);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& c : fit.coefficients) cov += (c - mean) * (c - mean).transpose();
  cov /= static_cast<double>(m - 1);
  cov += kCovarianceRidge * Eigen::Matrix3d::Identity();
  fit.prior = {mean, cov};
  return fit;
}

PriorFitReport fit_prior(const std::map<std::string, Graph>& states,
                         const std::string& target_state, ModelId model,
                         std::int64_t max_degree, int jobs) {
  PriorFitReport rep;
  rep.target_state = target_state;
  rep.fitted.id = model;
  std::vector<std::string> names;
  std::vector<Graph> graphs;
  for (const auto& [name, g] : states) {
    if (name == target_state) continue;
    names.push_back(name);
    graphs.push_back(g);
  }
  if (!states.count(target_state)) {
    rep.warnings.push_back("target state '" + target_state + "' not among the input graphs");
  }
  auto warn_skipped = [&](const std::vector<std::size_t>& skipped, const char* why) {
    for (auto i : skipped) rep.warnings.push_back("state " + names[i] + " excluded: " + why);
  };

  switch (model) {
    case ModelId::M1:
      break;
    case ModelId::M2: {
      std::vector<double> d;
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        d.push_back(edge_density(graphs[i]));
        rep.per_state_summaries[names[i]]["density"] = d.back();
      }
      rep.fitted.beta_prior = fit_beta_moments(d);
      break;
    }
    case ModelId::M3: {
      const auto fit = fit_lambda_normal(graphs);
      warn_skipped(fit.skipped, "no edges");
      std::size_t r = 0;
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (std::find(fit.skipped.begin(), fit.skipped.end(), i) != fit.skipped.end()) continue;
        rep.per_state_summaries[names[i]]["rate"] = fit.rates[r++];
      }
      rep.fitted.lambda_prior = fit.prior;
      break;
    }
    case ModelId::M4: {
      static const char* block_names[3] = {"pp", "ps", "ss"};
      std::array<std::vector<double>, 3> dens;
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto& g = graphs[i];
        const auto mm = type_mixing(g);
        const double np = g.count_type(NodeType::Primary), ns = g.count_type(NodeType::Specialty);
        const std::array<double, 3> cap{pairs(np), np * ns, pairs(ns)};
        const std::array<double, 3> cnt{double(mm.pp), double(mm.ps), double(mm.ss)};
        for (std::size_t b = 0; b < 3; ++b) {
          if (cap[b] == 0) continue;
          dens[b].push_back(cnt[b] / cap[b]);
          rep.per_state_summaries[names[i]][std::string("density_") + block_names[b]] = dens[b].back();
        }
      }
      for (std::size_t b = 0; b < 3; ++b) rep.fitted.block_priors[b] = fit_beta_moments(dens[b]);
      break;
    }
    case ModelId::M5: {
      const auto fit = fit_mvn_degree_logistic(graphs, max_degree, jobs);
      warn_skipped(fit.skipped, "logistic fit did not converge");
      std::size_t r = 0;
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (std::find(fit.skipped.begin(), fit.skipped.end(), i) != fit.skipped.end()) continue;
        const auto& c = fit.coefficients[r++];
        auto& s = rep.per_state_summaries[names[i]];
        s["b0"] = c[0];
        s["b1"] = c[1];
        s["b2"] = c[2];
      }
      rep.fitted.mvn_prior = fit.prior;
      break;
    }
  }
  rep.fitted.validate();
  return rep;
}

}  // namespace ccmsel
