#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccmsel/enumeration.hpp"
#include "ccmsel/graph.hpp"
#include "ccmsel/log_value.hpp"
#include "ccmsel/quadrature.hpp"

namespace ccmsel {

/// m1: Erdős–Rényi, uniform prior on p.    m2: Erdős–Rényi, Beta prior.
/// m3: exponential degrees, Normal prior.  m4: type-mixing blocks, Beta priors.
/// m5: logistic degree mixing, multivariate Normal prior.
enum class ModelId { M1, M2, M3, M4, M5 };

std::string_view to_string(ModelId m);
/// "m1".."m5", case-insensitive.
ModelId model_id_from_string(std::string_view s);

struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;
};

struct NormalPrior {
  double mu = 0.0;
  double sigma = 1.0;
};

struct MvnPrior {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

/// Block order for m4 priors and counts.
enum Block : std::size_t { kPP = 0, kPS = 1, kSS = 2 };

struct ModelSpec {
  ModelId id = ModelId::M1;
  BetaPrior beta_prior;                  // m2
  std::array<BetaPrior, 3> block_priors; // m4: pp, ps, ss
  NormalPrior lambda_prior;              // m3
  MvnPrior mvn_prior;                    // m5
  double prior_model_prob = 1.0;

  /// Throws DomainError if the hyperparameters used by `id` are invalid.
  void validate() const;
};

enum class EvidenceMethod { ClosedForm, Quadrature, Laplace, MonteCarlo };
std::string_view to_string(EvidenceMethod m);

/// log_evidence = log_integral - log_volume, exactly as stored.
struct EvidenceResult {
  ModelId model = ModelId::M1;
  LogValue log_evidence;
  LogValue log_volume;
  LogValue log_integral;
  EvidenceMethod method = EvidenceMethod::ClosedForm;
  VolumeEstimate volume;
  std::map<std::string, double> diagnostics;
};

struct EvidenceOptions {
  SamplingOptions sampling;
  QuadratureOptions quadrature;
  /// m3: replace the exponential density lambda*exp(-lambda*k) by the
  /// geometric pmf (1 - exp(-lambda)) * exp(-lambda*k).
  bool normalized_degree_pmf = false;
  /// m3: include log(n! / prod_k D[k]!), the number of degree sequences
  /// with distribution D, so the integrand is a pmf over degree
  /// distributions as for the other models. Off gives the bare product.
  bool degree_multinomial = true;
  /// m5: importance-sampling cross-check of the Laplace integral when > 0.
  std::int64_t mc_samples = 0;
  std::uint64_t mc_seed = 0;
};

/// log of the beta-binomial marginal  C(N,E) B(E+a, N-E+b) / B(a, b).
double log_beta_binomial(std::int64_t trials, std::int64_t successes, BetaPrior prior);

EvidenceResult evidence_m1(const Graph& g);
EvidenceResult evidence_m2(const Graph& g, BetaPrior prior);
EvidenceResult evidence_m3(const Graph& g, NormalPrior prior, const EvidenceOptions& opts = {});
EvidenceResult evidence_m4(const Graph& g, const std::array<BetaPrior, 3>& priors);
EvidenceResult evidence_m5(const Graph& g, const MvnPrior& prior, const EvidenceOptions& opts = {});

EvidenceResult evidence(const Graph& g, const ModelSpec& spec, const EvidenceOptions& opts = {});

/// m3 log likelihood of lambda given n vertices whose degrees sum to
/// degree_sum: sum_k D[k] * log f(k; lambda).
double log_degree_likelihood(double lambda, std::int64_t n, std::int64_t degree_sum,
                             bool normalized);

/// m3 integral of exp(log_degree_likelihood) * Normal(lambda; mu, sigma) over
/// lambda > 0.
LogQuadratureResult m3_log_integral(std::int64_t n, std::int64_t degree_sum, NormalPrior prior,
                                    bool normalized, const QuadratureOptions& opts = {});

/// Multinomial-logistic model over degree-mixing cells used by m5. Cell
/// (k, l) has weight sigmoid(b0 + b1 k + b2 l); probabilities are weights
/// normalized over every cell realizable under the observed degree
/// distribution.
class DegreeMixingLogistic {
 public:
  DegreeMixingLogistic(const DegreeDistribution& dist, const DegreeMixingMatrix& dmm);

  struct Cell {
    double k, l;
    std::int64_t count;
  };
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::int64_t edges() const noexcept { return edges_; }

  /// Multinomial log likelihood, including log(E! / prod count!).
  double log_likelihood(const Eigen::Vector3d& beta) const;
  /// Log likelihood with gradient and Hessian.
  double log_likelihood(const Eigen::Vector3d& beta, Eigen::Vector3d& grad,
                        Eigen::Matrix3d& hess) const;

 private:
  std::vector<Cell> cells_;
  std::int64_t edges_ = 0;
  double log_coefficient_ = 0.0;
};

double log_mvn_density(const Eigen::Vector3d& x, const MvnPrior& prior);

struct LaplaceResult {
  Eigen::Vector3d mode;
  Eigen::Matrix3d neg_hessian;
  double log_posterior_at_mode = 0.0;  // log likelihood + log prior
  double log_integral = 0.0;
  std::int64_t iterations = 0;
};

/// Damped Newton ascent on log likelihood + log prior, then the Laplace
/// approximation of the integral. Throws OptimizationError on divergence and
/// DegeneratePosteriorError if the Hessian at the mode is not negative
/// definite.
LaplaceResult laplace_m5(const DegreeMixingLogistic& model, const MvnPrior& prior);

/// Posterior model probabilities from log evidences and prior model
/// probabilities (which must sum to 1). Invariant under a common shift of
/// the log evidences.
std::vector<double> posterior_probabilities(std::span<const double> log_evidences,
                                            std::span<const double> prior_probs);

std::vector<double> posterior_probabilities(
    std::span<const std::pair<ModelSpec, EvidenceResult>> results);

}  // namespace ccmsel
