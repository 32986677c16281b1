#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ccmsel/enumeration.hpp"
#include "ccmsel/errors.hpp"
#include "ccmsel/evidence.hpp"
#include "ccmsel/graph_io.hpp"
#include "ccmsel/ingest.hpp"
#include "ccmsel/prior_config.hpp"
#include "ccmsel/prior_fit.hpp"
#include "ccmsel/simulate.hpp"
#include "manifest.hpp"

namespace ccmsel::cli {

namespace {

namespace fs = std::filesystem;

/// Raised for flag combinations CLI11 cannot express; exits 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ordered_json log_json(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

ordered_json log_json(LogValue v) { return log_json(v.log()); }

ordered_json volume_json(const VolumeEstimate& v) {
  ordered_json j;
  j["log_count"] = log_json(v.log_count);
  j["log10_count"] = log_json(v.log_count.log10());
  j["std_error_log"] = log_json(v.std_error_log);
  j["method"] = std::string(to_string(v.method));
  j["samples"] = v.samples;
  return j;
}

ordered_json evidence_json(const EvidenceResult& r) {
  ordered_json j;
  j["model"] = std::string(to_string(r.model));
  j["method"] = std::string(to_string(r.method));
  j["log_evidence"] = log_json(r.log_evidence);
  j["log10_evidence"] = log_json(r.log_evidence.log10());
  j["log_integral"] = log_json(r.log_integral);
  j["log_volume"] = log_json(r.log_volume);
  j["volume"] = volume_json(r.volume);
  ordered_json d = ordered_json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = log_json(v);
  j["diagnostics"] = d;
  return j;
}

ordered_json graph_summary(const Graph& g) {
  ordered_json j;
  j["n"] = g.node_count();
  j["edges"] = g.edge_count();
  j["primary"] = g.count_type(NodeType::Primary);
  j["specialty"] = g.count_type(NodeType::Specialty);
  j["untyped"] = g.count_type(NodeType::Untyped);
  return j;
}

void emit(const ordered_json& j, const std::optional<fs::path>& out_path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path) write_atomic(*out_path, text);
  else out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Digest of the invocation: every argument except output locations and
/// worker counts, plus the bytes of each input file.
std::string digest(const std::vector<std::string>& args, const std::vector<fs::path>& inputs) {
  static const std::set<std::string> skip{"--out", "--report", "--jobs"};
  Fnv1a h;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    const auto eq = a.find('=');
    const std::string name = a.substr(0, eq);
    if (skip.count(name)) {
      if (eq == std::string::npos) ++i;
      continue;
    }
    h.update_field(a);
  }
  for (const auto& p : inputs) h.update_file(p);
  return h.hex();
}

int check_jobs(int jobs) {
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  return jobs;
}

struct Context {
  std::vector<std::string> args;  // without program name
  std::ostream& out;
  RunManifest manifest;
};

// ---------------------------------------------------------------------------

struct IngestArgs {
  fs::path shared, providers, out;
  std::string state;
  std::optional<std::int64_t> threshold;
  std::optional<fs::path> config;
  bool include_isolates = false;
};

void add_ingest(CLI::App& app, IngestArgs& a) {
  auto* s = app.add_subcommand("ingest", "Build a state graph from shared-patient and provider files");
  s->add_option("--shared", a.shared, "Shared-patient file (delimited, with header)")->required()->check(CLI::ExistingFile);
  s->add_option("--providers", a.providers, "Provider file (delimited, with header)")->required()->check(CLI::ExistingFile);
  s->add_option("--state", a.state, "Two-letter state code")->required();
  s->add_option("--threshold", a.threshold, "Minimum shared-patient count (overrides the config)");
  s->add_option("--config", a.config, "Ingest config file (key = value)")->check(CLI::ExistingFile);
  s->add_flag("--include-isolates", a.include_isolates, "Keep in-state providers without retained edges");
  s->add_option("--out", a.out, "Output graph JSON")->required();
}

int do_ingest(Context& ctx, const IngestArgs& a) {
  std::vector<fs::path> inputs{a.shared, a.providers};
  if (a.config) inputs.push_back(*a.config);
  ctx.manifest.config_digest = digest(ctx.args, inputs);
  IngestConfig cfg = a.config ? read_ingest_config(*a.config) : IngestConfig{};
  if (a.threshold) {
    if (*a.threshold < 1) throw UsageError("--threshold must be >= 1");
    cfg.threshold = *a.threshold;
  }
  const auto shared = timed(ctx.manifest, "parse_shared", [&] { return parse_shared_patient_file(a.shared, cfg); });
  const auto prov = timed(ctx.manifest, "parse_providers", [&] { return parse_provider_file(a.providers, cfg); });
  const auto g = timed(ctx.manifest, "build_graph", [&] {
    return build_state_graph(shared, prov.records, a.state, cfg.include_isolates || a.include_isolates);
  });

  ordered_json summary = graph_summary(g);
  summary["state"] = a.state;
  summary["threshold"] = cfg.threshold;
  summary["interval"] = cfg.interval_label;
  summary["shared_records"] = shared.size();
  summary["provider_records"] = prov.records.size();
  summary["duplicate_provider_rows"] = prov.duplicate_rows;
  ordered_json unmapped = ordered_json::object();
  for (const auto& [spec, count] : prov.unmapped) unmapped[spec] = count;
  summary["unmapped_specialties"] = unmapped;
  summary["unmapped_total"] = prov.unmapped_total();

  ordered_json j = graph_to_json(g);
  j["summary"] = summary;
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  ordered_json brief = summary;
  brief.erase("unmapped_specialties");
  ctx.out << brief.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  fs::path graph;
  std::optional<fs::path> out;
};

void add_stats(CLI::App& app, StatsArgs& a) {
  auto* s = app.add_subcommand("stats", "Node, edge and type counts of a graph");
  s->add_option("--graph", a.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--out", a.out, "Output JSON (default: stdout)");
}

int do_stats(Context& ctx, const StatsArgs& a) {
  ctx.manifest.config_digest = digest(ctx.args, {a.graph});
  const auto g = timed(ctx.manifest, "read_graph", [&] { return read_graph(a.graph); });
  ordered_json j = graph_summary(g);
  const auto d = g.degrees();
  j["max_degree"] = d.empty() ? 0 : *std::max_element(d.begin(), d.end());
  j["mean_degree"] = 2.0 * static_cast<double>(g.edge_count()) / g.node_count();
  j["density"] = g.node_count() > 1
                     ? static_cast<double>(g.edge_count()) /
                           (0.5 * g.node_count() * (g.node_count() - 1.0))
                     : 0.0;
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct VolumeArgs {
  fs::path graph;
  std::string statistic;
  std::int64_t samples = 1000;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int oracle_limit = 8;
  std::optional<fs::path> out;
};

const std::vector<std::string> kStatisticNames{"edges", "degdist", "typemix", "degmix"};

void add_volume(CLI::App& app, VolumeArgs& a) {
  auto* s = app.add_subcommand("volume", "Log volume factor log|c(x)| of the graph's congruence class");
  s->add_option("--graph", a.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--statistic", a.statistic, "Statistic: edges, degdist, typemix or degmix")
      ->required()->check(CLI::IsMember(kStatisticNames));
  s->add_option("--samples", a.samples, "Importance samples")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.seed, "Random seed (required for degdist and degmix)");
  s->add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  s->add_option("--oracle-limit", a.oracle_limit, "Count exactly up to this many nodes")->capture_default_str()->check(CLI::Range(0, 64));
  s->add_option("--out", a.out, "Output JSON (default: stdout)");
}

int do_volume(Context& ctx, const VolumeArgs& a) {
  const auto kind = statistic_kind_from_string(a.statistic);
  const bool random = kind == StatisticKind::DegreeDistribution || kind == StatisticKind::DegreeMixing;
  if (random && !a.seed) throw UsageError("--seed is required for --statistic " + a.statistic);
  ctx.manifest.seed = a.seed;
  ctx.manifest.config_digest = digest(ctx.args, {a.graph});
  const auto g = timed(ctx.manifest, "read_graph", [&] { return read_graph(a.graph); });
  SamplingOptions opts;
  opts.samples = a.samples;
  opts.seed = a.seed.value_or(0);
  opts.jobs = check_jobs(a.jobs);
  opts.oracle_limit = a.oracle_limit;
  const auto v = timed(ctx.manifest, "volume", [&] { return log_volume(g, kind, opts); });
  ordered_json j;
  j["statistic"] = a.statistic;
  const auto vj = volume_json(v);
  for (auto it = vj.begin(); it != vj.end(); ++it) j[it.key()] = it.value();
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct EvidenceArgs {
  fs::path graph;
  std::string model;
  std::optional<fs::path> prior;
  std::int64_t samples = 1000;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool normalized = false;
  bool bare_product = false;
  std::int64_t mc_samples = 0;
  std::optional<fs::path> out;
};

const std::vector<std::string> kModelNames{"m1", "m2", "m3", "m4", "m5"};

void add_evidence(CLI::App& app, EvidenceArgs& a) {
  auto* s = app.add_subcommand("evidence", "Log model evidence of one model");
  s->add_option("--graph", a.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--model", a.model, "Model: m1..m5")->required()->check(CLI::IsMember(kModelNames));
  s->add_option("--prior", a.prior, "Prior config (key = value sections)")->check(CLI::ExistingFile);
  s->add_option("--samples", a.samples, "Importance samples for the volume factor")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.seed, "Random seed (required for m3 and m5)");
  s->add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  s->add_flag("--normalized-pmf", a.normalized, "m3: geometric degree pmf instead of the exponential density");
  s->add_flag("--no-degree-multinomial", a.bare_product, "m3: drop the n!/prod D[k]! factor from the integrand");
  s->add_option("--mc-samples", a.mc_samples, "m5: importance-sampling cross-check of the Laplace integral")->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_option("--out", a.out, "Output JSON (default: stdout)");
}

bool model_is_random(ModelId id) { return id == ModelId::M3 || id == ModelId::M5; }

EvidenceOptions evidence_options(std::int64_t samples, std::optional<std::uint64_t> seed, int jobs,
                                 bool normalized, bool bare_product, std::int64_t mc_samples) {
  EvidenceOptions o;
  o.degree_multinomial = !bare_product;
  o.sampling.samples = samples;
  o.sampling.seed = seed.value_or(0);
  o.sampling.jobs = check_jobs(jobs);
  o.normalized_degree_pmf = normalized;
  o.mc_samples = mc_samples;
  o.mc_seed = seed.value_or(0) ^ 0x6d63ull;
  return o;
}

int do_evidence(Context& ctx, const EvidenceArgs& a) {
  const auto id = model_id_from_string(a.model);
  if ((model_is_random(id) || a.mc_samples > 0) && !a.seed) {
    throw UsageError("--seed is required for model " + a.model);
  }
  std::vector<fs::path> inputs{a.graph};
  if (a.prior) inputs.push_back(*a.prior);
  ctx.manifest.seed = a.seed;
  ctx.manifest.config_digest = digest(ctx.args, inputs);
  const auto g = timed(ctx.manifest, "read_graph", [&] { return read_graph(a.graph); });
  const PriorConfig priors = a.prior ? read_prior_config(*a.prior) : PriorConfig{};
  const auto opts = evidence_options(a.samples, a.seed, a.jobs, a.normalized, a.bare_product, a.mc_samples);
  const auto r = timed(ctx.manifest, "evidence", [&] { return evidence(g, priors.spec(id), opts); });
  ordered_json j = evidence_json(r);
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
  fs::path graph;
  std::string models;
  std::optional<fs::path> priors;
  std::int64_t samples = 1000;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool normalized = false;
  bool bare_product = false;
  std::optional<fs::path> out;
};

void add_select(CLI::App& app, SelectArgs& a) {
  auto* s = app.add_subcommand("select", "Posterior model probabilities over a set of models");
  s->add_option("--graph", a.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--models", a.models, "Comma-separated models, e.g. m2,m3")->required();
  s->add_option("--priors", a.priors, "Prior config (key = value sections)")->check(CLI::ExistingFile);
  s->add_option("--samples", a.samples, "Importance samples for volume factors")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.seed, "Random seed (required when m3 or m5 is selected)");
  s->add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  s->add_flag("--normalized-pmf", a.normalized, "m3: geometric degree pmf instead of the exponential density");
  s->add_flag("--no-degree-multinomial", a.bare_product, "m3: drop the n!/prod D[k]! factor from the integrand");
  s->add_option("--out", a.out, "Output JSON (default: stdout)");
}

int do_select(Context& ctx, const SelectArgs& a) {
  std::vector<ModelId> ids;
  for (const auto& name : split_list(a.models)) {
    try {
      ids.push_back(model_id_from_string(name));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  if (ids.size() < 2) throw UsageError("--models needs at least two models");
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (ids[i] == ids[j]) throw UsageError("--models lists a model twice");
  if (!a.seed && std::any_of(ids.begin(), ids.end(), model_is_random)) {
    throw UsageError("--seed is required when m3 or m5 is selected");
  }
  std::vector<fs::path> inputs{a.graph};
  if (a.priors) inputs.push_back(*a.priors);
  ctx.manifest.seed = a.seed;
  ctx.manifest.config_digest = digest(ctx.args, inputs);
  const auto g = timed(ctx.manifest, "read_graph", [&] { return read_graph(a.graph); });
  const PriorConfig priors = a.priors ? read_prior_config(*a.priors) : PriorConfig{};

  std::size_t explicit_count = 0;
  for (auto id : ids) explicit_count += priors.explicit_model_prob.count(id);
  if (explicit_count != 0 && explicit_count != ids.size()) {
    throw DomainError("prior_model_prob must be given for all selected models or none");
  }
  const auto opts = evidence_options(a.samples, a.seed, a.jobs, a.normalized, a.bare_product, 0);
  std::vector<std::pair<ModelSpec, EvidenceResult>> results;
  for (auto id : ids) {
    auto spec = priors.spec(id);
    if (explicit_count == 0) spec.prior_model_prob = 1.0 / static_cast<double>(ids.size());
    auto r = timed(ctx.manifest, std::string("evidence_") + std::string(to_string(id)),
                   [&] { return evidence(g, spec, opts); });
    results.emplace_back(spec, std::move(r));
  }
  const auto post = posterior_probabilities(results);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [spec, r] = results[i];
    ordered_json row;
    row["model"] = std::string(to_string(spec.id));
    row["log_evidence"] = log_json(r.log_evidence);
    row["log10_evidence"] = log_json(r.log_evidence.log10());
    row["prior_model_prob"] = spec.prior_model_prob;
    row["posterior"] = post[i];
    row["method"] = std::string(to_string(r.method));
    row["log_volume"] = log_json(r.log_volume);
    row["volume_std_error_log"] = r.volume.std_error_log;
    rows.push_back(row);
  }
  ordered_json j;
  j["graph"] = graph_summary(g);
  j["models"] = rows;
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  fs::path graphs;
  std::string exclude;
  std::string model;
  std::int64_t max_degree = 300;
  int jobs = 1;
  fs::path out;
  std::optional<fs::path> report;
};

void add_fit(CLI::App& app, FitArgs& a) {
  auto* s = app.add_subcommand("fit-prior", "Fit a model's prior on every state but one");
  s->add_option("--graphs", a.graphs, "Directory of state graphs named <STATE>.json")->required()->check(CLI::ExistingDirectory);
  s->add_option("--exclude", a.exclude, "Target state left out of the fit")->required();
  s->add_option("--model", a.model, "Model: m2..m5")->required()->check(CLI::IsMember(kModelNames));
  s->add_option("--max-degree", a.max_degree, "m5: largest degree used by the per-state fits")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  s->add_option("--out", a.out, "Output prior config")->required();
  s->add_option("--report", a.report, "Fit report JSON (default: <out>.report.json)");
}

int do_fit(Context& ctx, const FitArgs& a) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.graphs)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  ctx.manifest.config_digest = digest(ctx.args, files);
  std::map<std::string, Graph> states;
  timed(ctx.manifest, "read_graphs", [&] {
    for (const auto& f : files) states.emplace(f.stem().string(), read_graph(f));
  });
  const auto id = model_id_from_string(a.model);
  const auto rep = timed(ctx.manifest, "fit", [&] {
    return fit_prior(states, a.exclude, id, a.max_degree, check_jobs(a.jobs));
  });

  PriorConfig cfg;
  cfg.specs[id] = rep.fitted;
  std::string text = "# " + std::string(to_string(id)) + " prior fitted on " +
                     std::to_string(rep.per_state_summaries.size()) + " states, excluding " +
                     a.exclude + "\n" + format_prior_config(cfg);
  write_atomic(a.out, text);

  ordered_json j;
  j["target_state"] = rep.target_state;
  j["model"] = std::string(to_string(id));
  j["prior_config"] = format_prior_config(cfg);
  ordered_json per = ordered_json::object();
  for (const auto& [state, sums] : rep.per_state_summaries) {
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : sums) s[k] = v;
    per[state] = s;
  }
  j["per_state_summaries"] = per;
  j["warnings"] = rep.warnings;
  j["manifest"] = ctx.manifest.to_json();
  fs::path report = a.report ? *a.report : fs::path(a.out.string() + ".report.json");
  emit(j, report, ctx.out);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string mechanism;
  std::int32_t n = 0;
  double p = 0.0;
  double lambda = 0.0;
  std::int32_t n_primary = 0;
  double p_pp = 0.0, p_ps = 0.0, p_ss = 0.0;
  std::string beta = "0,0,0";
  std::int32_t reps = 1;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  fs::path out;
};

const std::vector<std::string> kMechanisms{"er", "exp", "block", "degmix"};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* s = app.add_subcommand("simulate", "Sample synthetic networks");
  s->add_option("--mechanism", a.mechanism, "er, exp, block or degmix")->required()->check(CLI::IsMember(kMechanisms));
  s->add_option("--n", a.n, "Node count")->required()->check(CLI::Range(2, 1 << 24));
  s->add_option("--p", a.p, "er: edge probability");
  s->add_option("--lambda", a.lambda, "exp, degmix: rate of the exponential degree draw");
  s->add_option("--n-primary", a.n_primary, "block: number of primary nodes");
  s->add_option("--p-pp", a.p_pp, "block: primary-primary edge probability");
  s->add_option("--p-ps", a.p_ps, "block: primary-specialty edge probability");
  s->add_option("--p-ss", a.p_ss, "block: specialty-specialty edge probability");
  s->add_option("--beta", a.beta, "degmix: b0,b1,b2 of the cell weights")->capture_default_str();
  s->add_option("--reps", a.reps, "Replicates")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.seed, "Random seed")->required();
  s->add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  s->add_option("--out", a.out, "Output directory")->required();
}

int do_simulate(Context& ctx, const SimulateArgs& a) {
  ctx.manifest.seed = a.seed;
  ctx.manifest.config_digest = digest(ctx.args, {});
  Mechanism mech;
  ordered_json params;
  params["mechanism"] = a.mechanism;
  params["n"] = a.n;
  if (a.mechanism == "er") {
    mech = ErMechanism{a.p};
    params["p"] = a.p;
  } else if (a.mechanism == "exp") {
    mech = ExponentialDegreeMechanism{a.lambda};
    params["lambda"] = a.lambda;
  } else if (a.mechanism == "block") {
    mech = BlockMixingMechanism{a.n_primary, a.p_pp, a.p_ps, a.p_ss};
    params["n_primary"] = a.n_primary;
    params["p_pp"] = a.p_pp;
    params["p_ps"] = a.p_ps;
    params["p_ss"] = a.p_ss;
  } else {
    const auto parts = split_list(a.beta);
    if (parts.size() != 3) throw UsageError("--beta needs three comma-separated numbers");
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
      try {
        b[i] = std::stod(parts[static_cast<std::size_t>(i)]);
      } catch (const std::exception&) {
        throw UsageError("--beta: '" + parts[static_cast<std::size_t>(i)] + "' is not a number");
      }
    }
    mech = DegreeMixingMechanism{a.lambda, b};
    params["lambda"] = a.lambda;
    params["beta"] = {b[0], b[1], b[2]};
  }
  SimConfig base{a.n, mech, 0};
  base.validate();

  const auto reps = static_cast<std::size_t>(a.reps);
  std::vector<std::string> texts(reps);
  std::vector<ordered_json> infos(reps);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(check_jobs(a.jobs)), reps);
  timed(ctx.manifest, "simulate", [&] {
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
      for (std::size_t r; (r = next++) < reps;) {
        try {
          SimConfig cfg = base;
          cfg.seed = replica_seed(*a.seed, r);
          SimDiagnostics diag;
          const auto g = sample_network(cfg, &diag);
          ordered_json info;
          info["replica"] = r;
          info["seed"] = cfg.seed;
          info["edges"] = g.edge_count();
          info["target_degree_sum"] = diag.target_degree_sum;
          info["repaired_mass"] = diag.repaired_mass;
          info["used_fallback"] = diag.used_fallback;
          info["swaps_attempted"] = diag.swaps_attempted;
          info["swaps_accepted"] = diag.swaps_accepted;
          ordered_json j = graph_to_json(g);
          j["simulation"] = params;
          j["replica"] = info;
          infos[r] = info;
          texts[r] = j.dump() + "\n";
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  });

  fs::create_directories(a.out);
  ordered_json files = ordered_json::array();
  for (std::size_t r = 0; r < reps; ++r) {
    std::ostringstream name;
    name << "rep_" << std::setw(4) << std::setfill('0') << r << ".json";
    write_atomic(a.out / name.str(), texts[r]);
    ordered_json f = infos[r];
    f["file"] = name.str();
    files.push_back(f);
  }
  ordered_json j;
  j["simulation"] = params;
  j["replicas"] = files;
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out / "manifest.json", ctx.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  fs::path graph;
  std::string kind;
  std::string format = "json";
  std::optional<fs::path> out;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* s = app.add_subcommand("report", "Tabulate a statistic for external plotting");
  s->add_option("--graph", a.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--kind", a.kind, "Statistic: edges, degdist, typemix or degmix")->required()->check(CLI::IsMember(kStatisticNames));
  s->add_option("--format", a.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  s->add_option("--out", a.out, "Output file (default: stdout)");
}

int do_report(Context& ctx, const ReportArgs& a) {
  ctx.manifest.config_digest = digest(ctx.args, {a.graph});
  const auto g = timed(ctx.manifest, "read_graph", [&] { return read_graph(a.graph); });
  const auto kind = statistic_kind_from_string(a.kind);
  const auto x = compute_statistic(g, kind);
  std::vector<std::string> columns;
  ordered_json rows = ordered_json::array();
  switch (kind) {
    case StatisticKind::EdgeCount:
      columns = {"edges"};
      rows.push_back({x.edge_count()});
      break;
    case StatisticKind::DegreeDistribution: {
      columns = {"degree", "count"};
      const auto& d = x.degree_distribution();
      for (std::size_t k = 0; k < d.size(); ++k) rows.push_back({k, d[k]});
      break;
    }
    case StatisticKind::TypeMixing: {
      columns = {"type_a", "type_b", "edges"};
      const auto& m = x.type_mixing();
      rows.push_back({"primary", "primary", m.pp});
      rows.push_back({"primary", "specialty", m.ps});
      rows.push_back({"specialty", "specialty", m.ss});
      break;
    }
    case StatisticKind::DegreeMixing:
      columns = {"degree_k", "degree_l", "edges"};
      for (const auto& [kl, c] : x.degree_mixing()) rows.push_back({kl.first, kl.second, c});
      break;
  }
  if (a.format == "csv") {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "");
        if (row[i].is_string()) os << row[i].get<std::string>();
        else os << row[i].dump();
      }
      os << "\n";
    }
    if (a.out) write_atomic(*a.out, os.str());
    else ctx.out << os.str();
    return 0;
  }
  ordered_json j;
  j["kind"] = a.kind;
  j["columns"] = columns;
  j["rows"] = rows;
  j["manifest"] = ctx.manifest.to_json();
  emit(j, a.out, ctx.out);
  return 0;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message,
                std::optional<long> line = std::nullopt) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (line) j["line"] = *line;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian model selection for congruence class network models", "ccmsel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  IngestArgs ingest;
  StatsArgs stats;
  VolumeArgs volume;
  EvidenceArgs evid;
  SelectArgs select;
  FitArgs fit;
  SimulateArgs sim;
  ReportArgs report;
  add_ingest(app, ingest);
  add_stats(app, stats);
  add_volume(app, volume);
  add_evidence(app, evid);
  add_select(app, select);
  add_fit(app, fit);
  add_simulate(app, sim);
  add_report(app, report);

  std::vector<std::string> argv_store{"ccmsel"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    error_json(err, "usage_error", e.what());
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  Context ctx{args, out, {}};
  ctx.manifest.command = sub->get_name();
  ctx.manifest.tool_version = tool_version();
  try {
    const auto& name = sub->get_name();
    if (name == "ingest") return do_ingest(ctx, ingest);
    if (name == "stats") return do_stats(ctx, stats);
    if (name == "volume") return do_volume(ctx, volume);
    if (name == "evidence") return do_evidence(ctx, evid);
    if (name == "select") return do_select(ctx, select);
    if (name == "fit-prior") return do_fit(ctx, fit);
    if (name == "simulate") return do_simulate(ctx, sim);
    if (name == "report") return do_report(ctx, report);
  } catch (const UsageError& e) {
    error_json(err, "usage_error", e.what());
    return 2;
  } catch (const ParseError& e) {
    error_json(err, e.kind(), e.what(), e.line());
    return 1;
  } catch (const Error& e) {
    error_json(err, e.kind(), e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    error_json(err, "parse_error", e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    error_json(err, "io_error", e.what());
    return 1;
  } catch (const std::exception& e) {
    error_json(err, "internal_error", e.what());
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ccmsel::cli
