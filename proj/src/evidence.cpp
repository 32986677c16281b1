#include "ccmsel/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "ccmsel/errors.hpp"
#include "ccmsel/random.hpp"
#include "sis.hpp"

namespace ccmsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

std::int64_t pair_count(std::int64_t n) { return n * (n - 1) / 2; }

void check_beta(BetaPrior p, const char* what) {
  if (!(p.alpha > 0) || !(p.beta > 0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    std::ostringstream os;
    os << what << ": Beta hyperparameters must be positive and finite (alpha=" << p.alpha
       << ", beta=" << p.beta << ")";
    throw DomainError(os.str());
  }
}

void check_mvn(const MvnPrior& p) {
  if (!p.mean.allFinite() || !p.cov.allFinite()) throw DomainError("m5 prior has non-finite entries");
  if (!p.cov.isApprox(p.cov.transpose(), 1e-12)) throw DomainError("m5 prior covariance is not symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(p.cov);
  if (llt.info() != Eigen::Success) throw DomainError("m5 prior covariance is not positive definite");
}

EvidenceResult finish(ModelId id, EvidenceMethod method, double log_integral,
                      const VolumeEstimate& vol) {
  EvidenceResult r;
  r.model = id;
  r.method = method;
  r.log_integral = LogValue::from_log(log_integral);
  r.log_volume = vol.log_count;
  r.log_evidence = r.log_integral / r.log_volume;
  r.volume = vol;
  r.diagnostics["volume_std_error_log"] = vol.std_error_log;
  r.diagnostics["volume_samples"] = static_cast<double>(vol.samples);
  return r;
}

// log sigmoid(x), stable for large |x|
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(ModelId m) {
  switch (m) {
    case ModelId::M1: return "m1";
    case ModelId::M2: return "m2";
    case ModelId::M3: return "m3";
    case ModelId::M4: return "m4";
    case ModelId::M5: return "m5";
  }
  return "?";
}

ModelId model_id_from_string(std::string_view s) {
  std::string t(s);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "m1") return ModelId::M1;
  if (t == "m2") return ModelId::M2;
  if (t == "m3") return ModelId::M3;
  if (t == "m4") return ModelId::M4;
  if (t == "m5") return ModelId::M5;
  throw DomainError("unknown model '" + std::string(s) + "' (expected m1..m5)");
}

std::string_view to_string(EvidenceMethod m) {
  switch (m) {
    case EvidenceMethod::ClosedForm: return "closed_form";
    case EvidenceMethod::Quadrature: return "quadrature";
    case EvidenceMethod::Laplace: return "laplace";
    case EvidenceMethod::MonteCarlo: return "monte_carlo";
  }
  return "?";
}

void ModelSpec::validate() const {
  if (!(prior_model_prob > 0.0) || prior_model_prob > 1.0) {
    throw DomainError("prior model probability must be in (0, 1]");
  }
  switch (id) {
    case ModelId::M1: break;
    case ModelId::M2: check_beta(beta_prior, "m2"); break;
    case ModelId::M3:
      if (!(lambda_prior.sigma > 0) || !std::isfinite(lambda_prior.sigma) ||
          !std::isfinite(lambda_prior.mu)) {
        throw DomainError("m3: sigma must be positive and mu finite");
      }
      break;
    case ModelId::M4:
      for (const auto& p : block_priors) check_beta(p, "m4");
      break;
    case ModelId::M5: check_mvn(mvn_prior); break;
  }
}

double log_beta_binomial(std::int64_t trials, std::int64_t successes, BetaPrior prior) {
  const double n = static_cast<double>(trials);
  const double e = static_cast<double>(successes);
  return log_binomial(n, e) + log_beta(e + prior.alpha, n - e + prior.beta) -
         log_beta(prior.alpha, prior.beta);
}

EvidenceResult evidence_m1(const Graph& g) {
  const std::int64_t n = g.node_count();
  const std::int64_t e = g.edge_count();
  const auto vol = log_volume_edges(n, e);
  // C(N,E) B(E+1, N-E+1) = 1 / (N+1)
  const double li = -std::log1p(static_cast<double>(pair_count(n)));
  return finish(ModelId::M1, EvidenceMethod::ClosedForm, li, vol);
}

EvidenceResult evidence_m2(const Graph& g, BetaPrior prior) {
  check_beta(prior, "m2");
  const std::int64_t n = g.node_count();
  const std::int64_t e = g.edge_count();
  const auto vol = log_volume_edges(n, e);
  double li;
  if (prior.alpha == 1.0 && prior.beta == 1.0) {
    li = -std::log1p(static_cast<double>(pair_count(n)));
  } else {
    li = log_beta_binomial(pair_count(n), e, prior);
  }
  return finish(ModelId::M2, EvidenceMethod::ClosedForm, li, vol);
}

double log_degree_likelihood(double lambda, std::int64_t n, std::int64_t degree_sum,
                             bool normalized) {
  if (!(lambda > 0)) return -kInf;
  const double nn = static_cast<double>(n);
  const double base = normalized ? nn * std::log(-std::expm1(-lambda)) : nn * std::log(lambda);
  return base - lambda * static_cast<double>(degree_sum);
}

LogQuadratureResult m3_log_integral(std::int64_t n, std::int64_t degree_sum, NormalPrior prior,
                                    bool normalized, const QuadratureOptions& opts) {
  if (!(prior.sigma > 0)) throw DomainError("m3: sigma must be positive");
  if (n < 1) throw DomainError("m3: graph has no vertices");
  const double nn = static_cast<double>(n);
  const double s = static_cast<double>(degree_sum);
  const double prec = 1.0 / (prior.sigma * prior.sigma);

  // Integrate over the offset d = lambda - mu so that the prior term stays
  // exact when sigma is far below the spacing of doubles near mu.
  auto log_f = [&](double d) {
    const double lam = prior.mu + d;
    if (!(lam > 0)) return -kInf;
    const double z = d / prior.sigma;
    return log_degree_likelihood(lam, n, degree_sum, normalized) - 0.5 * z * z -
           std::log(prior.sigma) - 0.5 * kLog2Pi;
  };
  // d/dlambda of log_f; strictly decreasing from +inf at 0+.
  auto slope = [&](double lam) {
    const double lik = normalized ? nn / std::expm1(lam) : nn / lam;
    return lik - s - (lam - prior.mu) * prec;
  };
  double lo = std::numeric_limits<double>::min();
  double hi = std::max(1.0, prior.mu + 10.0 * prior.sigma);
  while (slope(hi) > 0) hi *= 2.0;
  for (int i = 0; i < 2000 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = lo < 1e-300 ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    (slope(mid) > 0 ? lo : hi) = mid;
  }
  const double mode = 0.5 * (lo + hi);
  double curv;
  if (normalized) {
    const double em = std::expm1(mode);
    curv = nn * (em + 1.0) / (em * em) + prec;
  } else {
    curv = nn / (mode * mode) + prec;
  }
  const double width = 1.0 / std::sqrt(curv);
  return integrate_log_peaked(log_f, -prior.mu, kInf, mode - prior.mu, width, opts);
}

EvidenceResult evidence_m3(const Graph& g, NormalPrior prior, const EvidenceOptions& opts) {
  ModelSpec spec;
  spec.id = ModelId::M3;
  spec.lambda_prior = prior;
  spec.validate();
  const auto dist = degree_distribution(g);
  const auto q = m3_log_integral(g.node_count(), 2 * g.edge_count(), prior,
                                 opts.normalized_degree_pmf, opts.quadrature);
  const double log_multi = opts.degree_multinomial ? log_multinomial(dist) : 0.0;
  const auto vol = log_volume_degree_distribution(dist, opts.sampling);
  auto r = finish(ModelId::M3, EvidenceMethod::Quadrature, q.log_value + log_multi, vol);
  r.diagnostics["log_degree_multinomial"] = log_multi;
  r.diagnostics["quadrature_log_error"] = q.log_error;
  r.diagnostics["quadrature_evaluations"] = static_cast<double>(q.evaluations);
  r.diagnostics["quadrature_intervals"] = static_cast<double>(q.intervals);
  r.diagnostics["normalized_degree_pmf"] = opts.normalized_degree_pmf ? 1.0 : 0.0;
  return r;
}

EvidenceResult evidence_m4(const Graph& g, const std::array<BetaPrior, 3>& priors) {
  for (const auto& p : priors) check_beta(p, "m4");
  const auto mm = type_mixing(g);
  const std::int64_t np = g.count_type(NodeType::Primary);
  const std::int64_t ns = g.count_type(NodeType::Specialty);
  const std::array<std::int64_t, 3> cap{pair_count(np), np * ns, pair_count(ns)};
  const std::array<std::int64_t, 3> cnt{mm.pp, mm.ps, mm.ss};
  double li = 0.0;
  for (std::size_t b = 0; b < 3; ++b) li += log_beta_binomial(cap[b], cnt[b], priors[b]);
  const auto vol = log_volume_type_mixing(np, ns, mm);
  return finish(ModelId::M4, EvidenceMethod::ClosedForm, li, vol);
}

DegreeMixingLogistic::DegreeMixingLogistic(const DegreeDistribution& dist,
                                           const DegreeMixingMatrix& dmm) {
  std::vector<std::int64_t> present;
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k] > 0) present.push_back(static_cast<std::int64_t>(k));
  }
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = i; j < present.size(); ++j) {
      const auto k = present[i], l = present[j];
      if (k == l && dist[static_cast<std::size_t>(k)] < 2) continue;
      auto it = dmm.find({k, l});
      const std::int64_t c = it == dmm.end() ? 0 : it->second;
      cells_.push_back({static_cast<double>(k), static_cast<double>(l), c});
      counts.push_back(c);
      edges_ += c;
    }
  }
  if (edges_ != total_edges(dmm)) {
    throw DomainError("degree-mixing matrix has cells not realizable under its degree distribution");
  }
  log_coefficient_ = log_multinomial(counts);
}

double DegreeMixingLogistic::log_likelihood(const Eigen::Vector3d& beta) const {
  std::vector<double> ls(cells_.size());
  double fit = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    ls[c] = log_sigmoid(beta[0] + beta[1] * cell.k + beta[2] * cell.l);
    if (cell.count) fit += static_cast<double>(cell.count) * ls[c];
  }
  return log_coefficient_ + fit - static_cast<double>(edges_) * log_sum_exp(ls);
}

double DegreeMixingLogistic::log_likelihood(const Eigen::Vector3d& beta, Eigen::Vector3d& grad,
                                            Eigen::Matrix3d& hess) const {
  const std::size_t m = cells_.size();
  std::vector<double> ls(m), sv(m);
  for (std::size_t c = 0; c < m; ++c) {
    const double eta = beta[0] + beta[1] * cells_[c].k + beta[2] * cells_[c].l;
    ls[c] = log_sigmoid(eta);
    sv[c] = sigmoid(eta);
  }
  const double log_z = log_sum_exp(ls);
  const double e = static_cast<double>(edges_);

  double fit = 0.0;
  Eigen::Vector3d a_bar = Eigen::Vector3d::Zero();
  Eigen::Matrix3d aa = Eigen::Matrix3d::Zero();  // sum pi a a^T
  Eigen::Matrix3d curv_pi = Eigen::Matrix3d::Zero();  // sum pi s(1-s) x x^T
  Eigen::Matrix3d curv_n = Eigen::Matrix3d::Zero();   // sum n s(1-s) x x^T
  grad.setZero();
  for (std::size_t c = 0; c < m; ++c) {
    const Eigen::Vector3d x(1.0, cells_[c].k, cells_[c].l);
    const double s = sv[c];
    const double pi = std::exp(ls[c] - log_z);
    const Eigen::Vector3d a = (1.0 - s) * x;
    const Eigen::Matrix3d xx = x * x.transpose();
    a_bar += pi * a;
    aa += pi * a * a.transpose();
    curv_pi += pi * s * (1.0 - s) * xx;
    if (cells_[c].count) {
      const double n = static_cast<double>(cells_[c].count);
      fit += n * ls[c];
      grad += n * a;
      curv_n += n * s * (1.0 - s) * xx;
    }
  }
  grad -= e * a_bar;
  hess = -curv_n - e * (aa - a_bar * a_bar.transpose() - curv_pi);
  return log_coefficient_ + fit - e * log_z;
}

double log_mvn_density(const Eigen::Vector3d& x, const MvnPrior& prior) {
  Eigen::LLT<Eigen::Matrix3d> llt(prior.cov);
  if (llt.info() != Eigen::Success) throw DomainError("m5 prior covariance is not positive definite");
  const Eigen::Vector3d z = llt.matrixL().solve(x - prior.mean);
  const Eigen::Matrix3d l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)) + std::log(l(2, 2)));
  return -0.5 * z.squaredNorm() - 1.5 * kLog2Pi - 0.5 * log_det;
}

LaplaceResult laplace_m5(const DegreeMixingLogistic& model, const MvnPrior& prior) {
  check_mvn(prior);
  const Eigen::Matrix3d precision = prior.cov.inverse();
  auto log_post = [&](const Eigen::Vector3d& b, Eigen::Vector3d* g, Eigen::Matrix3d* h) {
    double v;
    if (g) {
      v = model.log_likelihood(b, *g, *h);
      *g -= precision * (b - prior.mean);
      *h -= precision;
    } else {
      v = model.log_likelihood(b);
    }
    return v + log_mvn_density(b, prior);
  };

  LaplaceResult r;
  Eigen::Vector3d beta = prior.mean;
  Eigen::Vector3d grad;
  Eigen::Matrix3d hess;
  double value = log_post(beta, &grad, &hess);
  std::ostringstream trace;
  constexpr int kMaxIter = 200;
  bool converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    r.iterations = it + 1;
    Eigen::Matrix3d neg = -hess;
    // Levenberg shift when the negative Hessian is not positive definite
    double tau = 0.0;
    Eigen::LLT<Eigen::Matrix3d> llt(neg);
    while (llt.info() != Eigen::Success) {
      tau = tau == 0.0 ? 1e-6 * std::max(1.0, neg.diagonal().cwiseAbs().maxCoeff()) : 10.0 * tau;
      llt.compute(neg + tau * Eigen::Matrix3d::Identity());
    }
    const Eigen::Vector3d step = llt.solve(grad);
    const double decrement = grad.dot(step);
    if (it < 10 || it % 20 == 0) {
      trace << " it=" << it << " logpost=" << value << " |grad|=" << grad.norm();
    }
    if (!std::isfinite(decrement)) break;
    if (decrement < 1e-12 && tau == 0.0) {
      converged = true;
      break;
    }
    double t = 1.0;
    Eigen::Vector3d next;
    double next_value = -kInf;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      next = beta + t * step;
      next_value = log_post(next, nullptr, nullptr);
      if (next_value >= value) break;
    }
    if (!(next_value >= value)) {
      // no ascent along the Newton direction; accept the point if it is stationary
      converged = decrement < 1e-8;
      break;
    }
    const double gain = next_value - value;
    beta = next;
    value = log_post(beta, &grad, &hess);
    if (gain < 1e-14 * std::max(1.0, std::abs(value)) && tau == 0.0 && t == 1.0) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw OptimizationError("m5 Newton ascent did not converge in " + std::to_string(kMaxIter) +
                            " iterations; trace:" + trace.str());
  }
  r.mode = beta;
  r.neg_hessian = -hess;
  r.log_posterior_at_mode = value;
  Eigen::LLT<Eigen::Matrix3d> llt(r.neg_hessian);
  if (llt.info() != Eigen::Success) {
    throw DegeneratePosteriorError("m5 Hessian at the mode is not negative definite");
  }
  const Eigen::Matrix3d l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)) + std::log(l(2, 2)));
  if (!std::isfinite(log_det)) throw DegeneratePosteriorError("m5 Hessian at the mode is singular");
  r.log_integral = value + 1.5 * kLog2Pi - 0.5 * log_det;
  return r;
}

EvidenceResult evidence_m5(const Graph& g, const MvnPrior& prior, const EvidenceOptions& opts) {
  check_mvn(prior);
  if (g.edge_count() == 0) throw DomainError("m5 requires at least one edge");
  const auto dist = degree_distribution(g);
  const auto dmm = degree_mixing(g);
  const DegreeMixingLogistic model(dist, dmm);
  const auto lap = laplace_m5(model, prior);
  const auto vol = log_volume_degree_mixing(dmm, g.node_count(), opts.sampling);
  auto r = finish(ModelId::M5, EvidenceMethod::Laplace, lap.log_integral, vol);
  r.diagnostics["map_iterations"] = static_cast<double>(lap.iterations);
  r.diagnostics["map_b0"] = lap.mode[0];
  r.diagnostics["map_b1"] = lap.mode[1];
  r.diagnostics["map_b2"] = lap.mode[2];
  r.diagnostics["cells"] = static_cast<double>(model.cells().size());

  if (opts.mc_samples > 0) {
    // importance sampling from the Laplace Gaussian N(mode, H^-1)
    MvnPrior proposal{lap.mode, lap.neg_hessian.inverse()};
    proposal.cov = 0.5 * (proposal.cov + proposal.cov.transpose());
    const Eigen::Matrix3d chol = Eigen::LLT<Eigen::Matrix3d>(proposal.cov).matrixL();
    std::vector<double> lw(static_cast<std::size_t>(opts.mc_samples));
    for (std::int64_t i = 0; i < opts.mc_samples; ++i) {
      auto rng = make_stream(opts.mc_seed, static_cast<std::uint64_t>(i));
      const Eigen::Vector3d z(standard_normal(rng), standard_normal(rng), standard_normal(rng));
      const Eigen::Vector3d b = proposal.mean + chol * z;
      lw[static_cast<std::size_t>(i)] =
          model.log_likelihood(b) + log_mvn_density(b, prior) - log_mvn_density(b, proposal);
    }
    const auto s = detail::summarize_log_weights(lw);
    r.diagnostics["mc_log_integral"] = s.log_mean;
    r.diagnostics["mc_std_error_log"] = s.relative_se;
    r.diagnostics["mc_samples"] = static_cast<double>(opts.mc_samples);
  }
  return r;
}

EvidenceResult evidence(const Graph& g, const ModelSpec& spec, const EvidenceOptions& opts) {
  spec.validate();
  switch (spec.id) {
    case ModelId::M1: return evidence_m1(g);
    case ModelId::M2: return evidence_m2(g, spec.beta_prior);
    case ModelId::M3: return evidence_m3(g, spec.lambda_prior, opts);
    case ModelId::M4: return evidence_m4(g, spec.block_priors);
    case ModelId::M5: return evidence_m5(g, spec.mvn_prior, opts);
  }
  throw DomainError("unknown model");
}

std::vector<double> posterior_probabilities(std::span<const double> log_evidences,
                                            std::span<const double> prior_probs) {
  if (log_evidences.empty()) throw DomainError("posterior_probabilities: no models given");
  if (log_evidences.size() != prior_probs.size()) {
    throw DomainError("posterior_probabilities: evidence and prior counts differ");
  }
  double total_prior = 0.0;
  for (double p : prior_probs) {
    if (!(p > 0.0) || p > 1.0) throw DomainError("prior model probabilities must lie in (0, 1]");
    total_prior += p;
  }
  if (std::abs(total_prior - 1.0) > 1e-9) {
    throw DomainError("prior model probabilities must sum to 1 (got " +
                      std::to_string(total_prior) + ")");
  }
  std::vector<double> joint(log_evidences.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (std::isnan(log_evidences[i])) throw DomainError("log evidence is NaN");
    joint[i] = log_evidences[i] + std::log(prior_probs[i]);
  }
  const double norm = log_sum_exp(joint);
  if (!std::isfinite(norm)) throw DomainError("every model has zero (or infinite) evidence");
  std::vector<double> out(joint.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) sum += out[i] = std::exp(joint[i] - norm);
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> posterior_probabilities(
    std::span<const std::pair<ModelSpec, EvidenceResult>> results) {
  std::vector<double> le, pr;
  for (const auto& [spec, res] : results) {
    le.push_back(res.log_evidence.log());
    pr.push_back(spec.prior_model_prob);
  }
  return posterior_probabilities(le, pr);
}

}  // namespace ccmsel
