#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpvortex/profile1d.hpp"
#include "gpvortex/solver2d.hpp"
#include "gpvortex/vortex.hpp"

namespace gpv::io {

inline constexpr int kConfigSchemaVersion = 1;

// Everything a command may need. Fields are filled from a JSON file first and
// then overridden by command-line flags.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  double epsilon = 0.05;
  double omega0 = 0.35;
  Domain domain = Domain::Disc;
  int nodes = 2048;  // 1-D profile grid
  int Nr = 256;
  int Nt = 512;
  double r0 = 1e-3;
  SolveOptions solve;
  CellOptions cells;
  std::vector<double> sweep_omega0;
  bool warm_start = false;
};

// Parses and validates a config document. Errors name the offending field by
// JSON pointer, e.g. "/grid/Nt: expected an even integer >= 8".
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& c);

}  // namespace gpv::io
