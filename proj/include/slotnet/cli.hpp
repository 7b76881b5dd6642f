#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slotnet::cli {

inline constexpr const char* kArtifactName = "slotnet";
inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

// Runs one command line (without the program name). CSV goes to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Listing of every configuration key, shown under --help.
std::string parameter_help();

}  // namespace slotnet::cli
