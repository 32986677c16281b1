#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ccmsel/graph.hpp"

namespace ccmsel {

struct SharedPatientRecord {
  std::string npi_a;  // npi_a < npi_b
  std::string npi_b;
  std::int64_t shared_count = 0;
  friend bool operator==(const SharedPatientRecord&, const SharedPatientRecord&) = default;
};

struct ProviderRecord {
  std::string npi;
  std::string state;
  std::string specialty;
  NodeType derived_type = NodeType::Specialty;
};

/// Input layout and typing rules. Read from a key=value file by
/// read_ingest_config; see config/ingest.conf for every key.
struct IngestConfig {
  char delimiter = ',';
  std::string shared_npi_a = "npi_a";
  std::string shared_npi_b = "npi_b";
  std::string shared_count = "shared_count";
  std::string provider_npi = "npi";
  std::string provider_state = "state";
  std::string provider_specialty = "specialty";
  std::int64_t threshold = 1;
  std::vector<std::string> primary_specialties{"Family Practice", "Internal Medicine",
                                               "General Practice", "Geriatric Medicine",
                                               "Pediatric Medicine"};
  NodeType default_type = NodeType::Specialty;
  bool include_isolates = false;
  std::string interval_label = "30";
};

IngestConfig parse_ingest_config(std::string_view text);
IngestConfig read_ingest_config(const std::filesystem::path& path);

/// Splits one delimited line; double-quoted fields may contain the
/// delimiter and "" escapes.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

/// Rows below cfg.threshold are dropped; (A,B) and (B,A) merge keeping the
/// larger count. Output is sorted by (npi_a, npi_b). Throws ParseError with
/// the 1-based line number (header is line 1) and SchemaError for missing
/// columns.
std::vector<SharedPatientRecord> parse_shared_patient(std::istream& in, const IngestConfig& cfg);
std::vector<SharedPatientRecord> parse_shared_patient_file(const std::filesystem::path& path,
                                                           const IngestConfig& cfg);

struct ProviderParseResult {
  std::vector<ProviderRecord> records;  // first row per NPI, in file order
  /// Unmapped specialty -> number of providers given the default type.
  std::map<std::string, std::int64_t> unmapped;
  std::int64_t duplicate_rows = 0;
  std::int64_t unmapped_total() const;
};

/// Specialty matching ignores case and surrounding blanks.
NodeType classify_specialty(std::string_view specialty, const IngestConfig& cfg, bool* mapped);

ProviderParseResult parse_providers(std::istream& in, const IngestConfig& cfg);
ProviderParseResult parse_provider_file(const std::filesystem::path& path, const IngestConfig& cfg);

/// Nodes: providers in `state` with at least one retained edge whose other
/// endpoint is also in `state` (all in-state providers with
/// include_isolates). Nodes are ordered by NPI. Throws EmptyNetworkError if
/// no provider qualifies.
Graph build_state_graph(const std::vector<SharedPatientRecord>& shared,
                        const std::vector<ProviderRecord>& providers, std::string_view state,
                        bool include_isolates = false);

}  // namespace ccmsel
