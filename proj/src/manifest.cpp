#include "trs/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trs/version.hpp"

namespace trs {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void atomic_write_file(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void RunManifest::add_input(std::string_view source, std::string_view bytes) {
  inputs.push_back({{"source", std::string(source)}, {"fnv1a64", fnv1a64_hex(bytes)}});
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "trs";
  j["version"] = version.empty() ? kVersion : version;
  j["command"] = command;
  j["argv"] = argv;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["config"] = config.is_null() ? nlohmann::ordered_json::object() : config;
  j["outputs"] = outputs;
  j["timing_ms"] = timing_ms;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("inputs")) m.inputs = j.at("inputs");
  if (j.contains("config")) m.config = j.at("config");
  if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.version = j.value("version", "");
  m.timing_ms = j.value("timing_ms", 0.0);
  return m;
}

void RunManifest::write(const std::string& path) const {
  atomic_write_file(path, to_json().dump(2) + "\n");
}

}  // namespace trs
