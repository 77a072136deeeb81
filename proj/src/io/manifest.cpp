#include "gpvortex/io/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpvortex/errors.hpp"

namespace gpv::io {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string sha256_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("missing input artifact: " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("SHA-256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (is) {
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_output(RunManifest& m, const std::string& run_dir, const std::string& rel_path) {
  const std::string sum = sha256_file((fs::path(run_dir) / rel_path).string());
  for (auto& o : m.outputs)
    if (o.path == rel_path) {
      o.sha256 = sum;
      return;
    }
  m.outputs.push_back({rel_path, sum});
}

ordered_json manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["timestamp"] = m.timestamp;
  j["regime"] = m.regime;
  j["grid"] = m.grid;
  j["options"] = m.options;
  ordered_json outs = ordered_json::array();
  for (const auto& o : m.outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  j["outputs"] = outs;
  j["summary"] = m.summary;
  return j;
}

RunManifest manifest_from_json(const ordered_json& j) {
  RunManifest m;
  try {
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.regime = j.at("regime");
    m.grid = j.at("grid");
    m.options = j.at("options");
    for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("path"), o.at("sha256")});
    m.summary = j.at("summary");
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::string& run_dir, const RunManifest& m) {
  std::ofstream os(fs::path(run_dir) / "manifest.json", std::ios::trunc);
  if (!os) throw ParameterError("cannot write manifest in " + run_dir);
  os << manifest_to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::string& run_dir) {
  const fs::path p = fs::path(run_dir) / "manifest.json";
  std::ifstream is(p);
  if (!is) throw ParameterError("missing input artifact: " + p.string());
  ordered_json j;
  try {
    j = ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed manifest: ") + e.what());
  }
  return manifest_from_json(j);
}

std::vector<std::string> verify_manifest(const std::string& run_dir, const RunManifest& m) {
  std::vector<std::string> bad;
  for (const auto& o : m.outputs) {
    const fs::path p = fs::path(run_dir) / o.path;
    if (!fs::exists(p) || sha256_file(p.string()) != o.sha256) bad.push_back(o.path);
  }
  return bad;
}

namespace {
void strip(ordered_json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (it.key() == "timestamp" || it.key() == "wallclock" || it.key() == "wallclock_s")
        it = j.erase(it);
      else
        strip(*it++);
    }
  } else if (j.is_array()) {
    for (auto& e : j) strip(e);
  }
}
}  // namespace

ordered_json reproducible_view(const RunManifest& m) {
  ordered_json j = manifest_to_json(m);
  strip(j);
  return j;
}

}  // namespace gpv::io
