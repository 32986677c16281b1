#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ccmsel/evidence.hpp"
#include "ccmsel/graph.hpp"

namespace ccmsel {

/// Method-of-moments Beta fit to densities in (0, 1), sample variance with
/// n - 1. Throws DegeneratePriorError when the variance is zero and
/// DomainError for fewer than two values or a variance too large for any
/// Beta.
BetaPrior fit_beta_moments(std::span<const double> values);

/// Edge density E / C(n, 2).
double edge_density(const Graph& g);

BetaPrior fit_beta_density(std::span<const Graph> states);

struct LambdaFit {
  NormalPrior prior;
  std::vector<double> rates;        // per usable state, in input order
  std::vector<std::size_t> skipped; // indices of states with no edges
};

/// Per-state rate 1 / mean degree; mu and sigma are the sample mean and
/// standard deviation (floored at 1e-6). States without edges are skipped.
/// Throws DomainError with fewer than two usable states.
LambdaFit fit_lambda_normal(std::span<const Graph> states);

struct LogisticCell {
  double k = 0, l = 0;
  double successes = 0, trials = 0;
};

/// Maximum-likelihood binomial logistic regression of successes / trials on
/// (1, k, l) by Newton's method. Returns false without convergence.
bool fit_binomial_logistic(std::span<const LogisticCell> cells, Eigen::Vector3d& beta);

/// Binomial logistic fit of DMM[k, l] successes out of possible-pairs(k, l)
/// trials on predictors (1, k, l), over cells k <= l <= max_degree. Returns
/// false if the fit does not converge.
bool fit_degree_logistic(const Graph& g, std::int64_t max_degree, Eigen::Vector3d& beta);

struct MvnFit {
  MvnPrior prior;
  std::vector<Eigen::Vector3d> coefficients;  // per usable state
  std::vector<std::size_t> skipped;
};

inline constexpr double kCovarianceRidge = 1e-8;

MvnFit fit_mvn_degree_logistic(std::span<const Graph> states, std::int64_t max_degree = 300,
                               int jobs = 1);

struct PriorFitReport {
  std::string target_state;
  ModelSpec fitted;
  /// state -> named summary scalars used by the fit.
  std::map<std::string, std::map<std::string, double>> per_state_summaries;
  std::vector<std::string> warnings;
};

/// Fits the prior of `model` on every state except `target_state`.
/// m1 has no hyperparameters; m4 fits one Beta per type block.
PriorFitReport fit_prior(const std::map<std::string, Graph>& states,
                         const std::string& target_state, ModelId model,
                         std::int64_t max_degree = 300, int jobs = 1);

}  // namespace ccmsel
