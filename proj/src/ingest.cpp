#include "ccmsel/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ccmsel/errors.hpp"

namespace ccmsel {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  return in;
}

// Header lookup: column name -> index.
std::size_t column(const std::vector<std::string>& header, const std::string& name,
                   const char* file) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw SchemaError(std::string(file) + " file has no column '" + name + "'");
}

}  // namespace

std::vector<std::string> split_delimited(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = true;
    } else if (c == delimiter) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

IngestConfig parse_ingest_config(std::string_view text) {
  IngestConfig cfg;
  bool replaced_primary = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected key = value", line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string val = trim(std::string_view(s).substr(eq + 1));
    if (key == "delimiter") {
      if (val == "tab" || val == "\\t") cfg.delimiter = '\t';
      else if (val == "comma") cfg.delimiter = ',';
      else if (val == "pipe") cfg.delimiter = '|';
      else if (val.size() == 1) cfg.delimiter = val[0];
      else throw ParseError("line " + std::to_string(line) + ": delimiter must be one character, tab, comma or pipe", line);
    } else if (key == "shared.npi_a") cfg.shared_npi_a = val;
    else if (key == "shared.npi_b") cfg.shared_npi_b = val;
    else if (key == "shared.count") cfg.shared_count = val;
    else if (key == "provider.npi") cfg.provider_npi = val;
    else if (key == "provider.state") cfg.provider_state = val;
    else if (key == "provider.specialty") cfg.provider_specialty = val;
    else if (key == "threshold") {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || p != val.data() + val.size() || v < 1) {
        throw ParseError("line " + std::to_string(line) + ": threshold must be a positive integer", line);
      }
      cfg.threshold = v;
    } else if (key == "primary_specialty") {
      if (!replaced_primary) cfg.primary_specialties.clear();
      replaced_primary = true;
      cfg.primary_specialties.push_back(val);
    } else if (key == "default_type") {
      try {
        cfg.default_type = node_type_from_string(val);
      } catch (const Error& e) {
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
      }
    } else if (key == "include_isolates") {
      const auto v = lower(val);
      if (v != "true" && v != "false") throw ParseError("line " + std::to_string(line) + ": include_isolates must be true or false", line);
      cfg.include_isolates = v == "true";
    } else if (key == "interval") {
      cfg.interval_label = val;
    } else {
      throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
    }
  }
  return cfg;
}

IngestConfig read_ingest_config(const std::filesystem::path& path) {
  auto in = open(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ingest_config(ss.str());
}

std::vector<SharedPatientRecord> parse_shared_patient(std::istream& in, const IngestConfig& cfg) {
  std::string line;
  if (!read_line(in, line)) throw SchemaError("shared-patient file is empty (no header)");
  const auto header = split_delimited(line, cfg.delimiter);
  const auto ia = column(header, cfg.shared_npi_a, "shared-patient");
  const auto ib = column(header, cfg.shared_npi_b, "shared-patient");
  const auto ic = column(header, cfg.shared_count, "shared-patient");
  const auto need = std::max({ia, ib, ic}) + 1;

  std::map<std::pair<std::string, std::string>, std::int64_t> best;
  long lineno = 1;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_delimited(line, cfg.delimiter);
    auto fail = [&](const std::string& why) {
      return ParseError("shared-patient line " + std::to_string(lineno) + ": " + why, lineno);
    };
    if (f.size() < need) throw fail("expected at least " + std::to_string(need) + " fields, got " + std::to_string(f.size()));
    std::string a = trim(f[ia]), b = trim(f[ib]);
    const std::string cs = trim(f[ic]);
    if (a.empty() || b.empty()) throw fail("empty provider identifier");
    if (a == b) throw fail("provider shares patients with itself");
    std::int64_t count = 0;
    auto [p, ec] = std::from_chars(cs.data(), cs.data() + cs.size(), count);
    if (cs.empty() || ec != std::errc() || p != cs.data() + cs.size() || count < 0) {
      throw fail("shared count '" + cs + "' is not a nonnegative integer");
    }
    if (count < cfg.threshold) continue;
    if (b < a) std::swap(a, b);
    auto& slot = best[{a, b}];
    slot = std::max(slot, count);
  }
  std::vector<SharedPatientRecord> out;
  out.reserve(best.size());
  for (auto& [key, count] : best) out.push_back({key.first, key.second, count});
  return out;
}

std::vector<SharedPatientRecord> parse_shared_patient_file(const std::filesystem::path& path,
                                                           const IngestConfig& cfg) {
  auto in = open(path);
  return parse_shared_patient(in, cfg);
}

std::int64_t ProviderParseResult::unmapped_total() const {
  std::int64_t t = 0;
  for (const auto& [k, v] : unmapped) t += v;
  return t;
}

NodeType classify_specialty(std::string_view specialty, const IngestConfig& cfg, bool* mapped) {
  const auto s = lower(trim(specialty));
  for (const auto& p : cfg.primary_specialties) {
    if (lower(trim(p)) == s) {
      if (mapped) *mapped = true;
      return NodeType::Primary;
    }
  }
  if (mapped) *mapped = false;
  return cfg.default_type;
}

ProviderParseResult parse_providers(std::istream& in, const IngestConfig& cfg) {
  std::string line;
  if (!read_line(in, line)) throw SchemaError("provider file is empty (no header)");
  const auto header = split_delimited(line, cfg.delimiter);
  const auto in_npi = column(header, cfg.provider_npi, "provider");
  const auto in_state = column(header, cfg.provider_state, "provider");
  const auto in_spec = column(header, cfg.provider_specialty, "provider");
  const auto need = std::max({in_npi, in_state, in_spec}) + 1;

  ProviderParseResult res;
  std::unordered_map<std::string, std::size_t> seen;
  long lineno = 1;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_delimited(line, cfg.delimiter);
    if (f.size() < need) {
      throw ParseError("provider line " + std::to_string(lineno) + ": expected at least " +
                           std::to_string(need) + " fields, got " + std::to_string(f.size()),
                       lineno);
    }
    ProviderRecord r;
    r.npi = trim(f[in_npi]);
    r.state = upper(trim(f[in_state]));
    r.specialty = trim(f[in_spec]);
    if (r.npi.empty()) throw SchemaError("provider line " + std::to_string(lineno) + ": missing NPI");
    if (r.state.empty()) throw SchemaError("provider line " + std::to_string(lineno) + ": missing state");
    if (seen.count(r.npi)) {
      ++res.duplicate_rows;
      continue;
    }
    bool mapped = false;
    r.derived_type = classify_specialty(r.specialty, cfg, &mapped);
    if (!mapped) ++res.unmapped[r.specialty];
    seen.emplace(r.npi, res.records.size());
    res.records.push_back(std::move(r));
  }
  return res;
}

ProviderParseResult parse_provider_file(const std::filesystem::path& path, const IngestConfig& cfg) {
  auto in = open(path);
  return parse_providers(in, cfg);
}

Graph build_state_graph(const std::vector<SharedPatientRecord>& shared,
                        const std::vector<ProviderRecord>& providers, std::string_view state,
                        bool include_isolates) {
  const std::string target = upper(trim(state));
  std::map<std::string, NodeType> resident;  // ordered by NPI
  for (const auto& p : providers) {
    if (p.state == target) resident.emplace(p.npi, p.derived_type);
  }
  std::set<std::pair<std::string, std::string>> kept;
  std::set<std::string> touched;
  for (const auto& r : shared) {
    if (!resident.count(r.npi_a) || !resident.count(r.npi_b)) continue;
    kept.emplace(std::min(r.npi_a, r.npi_b), std::max(r.npi_a, r.npi_b));
    touched.insert(r.npi_a);
    touched.insert(r.npi_b);
  }
  std::vector<std::string> ids;
  std::vector<NodeType> types;
  std::map<std::string, std::int32_t> index;
  for (const auto& [npi, type] : resident) {
    if (!include_isolates && !touched.count(npi)) continue;
    index[npi] = static_cast<std::int32_t>(ids.size());
    ids.push_back(npi);
    types.push_back(type);
  }
  if (ids.empty()) {
    throw EmptyNetworkError("state " + target + " has no qualifying providers");
  }
  std::vector<Graph::Edge> edges;
  edges.reserve(kept.size());
  for (const auto& [a, b] : kept) edges.emplace_back(index.at(a), index.at(b));
  return Graph(std::move(ids), std::move(types), std::move(edges));
}

}  // namespace ccmsel
