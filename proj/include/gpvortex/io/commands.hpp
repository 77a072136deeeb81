#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpv::io {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

// Command-line entry point; args[0] is the program name. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Markdown summary of a run directory's manifest.
std::string render_report(const std::string& run_dir);

}  // namespace gpv::io
