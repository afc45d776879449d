#include "doctest.h"

#include <filesystem>

#include "trs/manifest.hpp"

using namespace trs;

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("atomic write then read round trips and leaves no temp file") {
  const auto dir = std::filesystem::temp_directory_path() / "trs_manifest_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "out.txt").string();
  atomic_write_file(path, "hello\nworld\n");
  CHECK(read_file(path) == "hello\nworld\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  atomic_write_file(path, "second");
  CHECK(read_file(path) == "second");
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest JSON round trip") {
  RunManifest m;
  m.command = "fit";
  m.argv = {"fit", "--data", "ld_all", "--seed", "7"};
  m.seed = 7;
  m.add_input("builtin:ld_all", "155,31,131,45,56,30,332");
  m.config["iterations"] = 1000;
  m.outputs = {"out/fit_summary.json", "out/chain.csv"};
  m.timing_ms = 12.5;

  const auto j = m.to_json();
  CHECK(j.at("tool") == "trs");
  const RunManifest back = RunManifest::from_json(j);
  CHECK(back.command == "fit");
  CHECK(back.argv == m.argv);
  CHECK(back.seed == 7);
  CHECK(back.outputs == m.outputs);
  CHECK(back.config.at("iterations") == 1000);
}
