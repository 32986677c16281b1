#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ccmsel/errors.hpp"

#ifndef CCMSEL_VERSION
#define CCMSEL_VERSION "0.0.0"
#endif

namespace ccmsel::cli {

void Fnv1a::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    h_ ^= c;
    h_ *= 0x100000001b3ull;
  }
}

void Fnv1a::update_field(std::string_view bytes) {
  update(std::to_string(bytes.size()));
  update(":");
  update(bytes);
}

void Fnv1a::update_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  update_field(ss.str());
}

std::string Fnv1a::hex() const {
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h_;
  return os.str();
}

ordered_json RunManifest::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  j["tool_version"] = tool_version;
  ordered_json t = ordered_json::object();
  for (const auto& [stage, ms] : timings) t[stage] = ms;
  j["timings"] = t;
  return j;
}

std::string tool_version() { return CCMSEL_VERSION; }

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw SchemaError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ccmsel::cli
