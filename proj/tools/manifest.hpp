#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ccmsel::cli {

using ordered_json = nlohmann::ordered_json;

/// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  /// Adds a length prefix first so ("ab","c") and ("a","bc") differ.
  void update_field(std::string_view bytes);
  void update_file(const std::filesystem::path& path);
  std::uint64_t value() const noexcept { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  /// stage -> milliseconds; insertion order is kept in the output.
  std::vector<std::pair<std::string, double>> timings;

  ordered_json to_json() const;
};

std::string tool_version();

/// Runs f and records its wall time under `stage`.
template <class F>
auto timed(RunManifest& m, const std::string& stage, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&] {
    const auto t1 = std::chrono::steady_clock::now();
    m.timings.emplace_back(stage, std::chrono::duration<double, std::milli>(t1 - t0).count());
  };
  if constexpr (std::is_void_v<decltype(f())>) {
    f();
    finish();
  } else {
    auto r = f();
    finish();
    return r;
  }
}

/// Writes to a sibling temporary file then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ccmsel::cli
