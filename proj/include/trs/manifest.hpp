#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace trs {

// FNV-1a 64-bit digest; used to fingerprint command inputs.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

// Record of one CLI invocation. Re-running the stored argv reproduces every
// output byte-for-byte; timing lives only here, never in outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  nlohmann::ordered_json config;
  std::vector<std::string> outputs;
  std::string version;
  double timing_ms = 0.0;

  void add_input(std::string_view source, std::string_view bytes);
  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void write(const std::string& path) const;
};

}  // namespace trs
