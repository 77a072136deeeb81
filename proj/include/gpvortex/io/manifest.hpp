#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace gpv::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputFile {
  std::string path;  // relative to the run directory
  std::string sha256;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string timestamp;
  nlohmann::ordered_json regime = nlohmann::ordered_json::object();
  nlohmann::ordered_json grid = nlohmann::ordered_json::object();
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  std::vector<OutputFile> outputs;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

std::string sha256_file(const std::string& path);
std::string utc_timestamp();

// Records a file written under run_dir, replacing an earlier entry for the same path.
void add_output(RunManifest& m, const std::string& run_dir, const std::string& rel_path);

nlohmann::ordered_json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::ordered_json& j);

void write_manifest(const std::string& run_dir, const RunManifest& m);
RunManifest read_manifest(const std::string& run_dir);

// Paths of outputs that are missing or whose checksum differs.
std::vector<std::string> verify_manifest(const std::string& run_dir, const RunManifest& m);

// Manifest JSON without the fields that legitimately differ between runs
// (timestamp and wallclock entries).
nlohmann::ordered_json reproducible_view(const RunManifest& m);

}  // namespace gpv::io
