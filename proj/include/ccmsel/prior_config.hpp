#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "ccmsel/evidence.hpp"

namespace ccmsel {

/// Hyperparameters for every model, read from a key=value file:
///
///   # comment
///   [m2]
///   alpha = 2.0
///   beta = 3.0
///   prior_model_prob = 0.5
///   [m3]
///   mu = 0.1
///   sigma = 0.02
///   [m4]
///   alpha_pp = 1   beta_pp = 1   (one key per line; likewise _ps, _ss)
///   [m5]
///   mean = -4.0, 0.01, 0.01
///   cov = 1,0,0, 0,1,0, 0,0,1
///
/// List values may be wrapped in [ ]. Models without a section keep the
/// defaults of ModelSpec (uniform Beta, standard normal, identity).
struct PriorConfig {
  std::map<ModelId, ModelSpec> specs;
  /// Models whose section set prior_model_prob explicitly.
  std::set<ModelId> explicit_model_prob;

  /// The spec for `id`, default-constructed if absent.
  ModelSpec spec(ModelId id) const;
};

/// Throws ParseError (with line number) on malformed input and DomainError
/// on invalid hyperparameters.
PriorConfig parse_prior_config(std::string_view text);
PriorConfig read_prior_config(const std::filesystem::path& path);

/// Writes the sections for the listed specs; parse_prior_config round-trips
/// it exactly (values use the shortest round-trip form).
std::string format_prior_config(const PriorConfig& config);

}  // namespace ccmsel
