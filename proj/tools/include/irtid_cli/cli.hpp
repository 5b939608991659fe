#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irtid::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

/// Provenance record written next to every output.
struct RunManifest {
  std::string command;
  std::string config_digest;  // FNV-1a of the canonical config JSON
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;  // ISO 8601, UTC
  std::string finished_at;

  std::string to_json() const;
};

std::string tool_version();

/// Entry point shared by the executable and the tests. args[0] is the
/// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irtid::cli
