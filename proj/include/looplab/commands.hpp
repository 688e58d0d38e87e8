#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "looplab/config.hpp"

namespace looplab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitNontermination = 3;

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string bytes;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string summary;  // human-readable, for stdout
  std::vector<Artifact> artifacts;
  const Artifact* find(std::string_view name) const;
};

// Each command is pure: the same config yields the same artifact bytes.
CommandResult cmd_scenario(const RunConfig& c);
CommandResult cmd_mc(const RunConfig& c);
CommandResult cmd_optics(const RunConfig& c);
CommandResult run_command(std::string_view command, const RunConfig& c);

void write_artifacts(const CommandResult& r, const std::string& dir);

// Recovers the producing command and config from any artifact's embedded header.
std::pair<std::string, RunConfig> read_provenance(const std::string& artifact_bytes);

struct ReplayResult {
  std::string command;
  std::string artifact;  // name matched against the regenerated bundle
  bool identical = false;
  std::string detail;
};
ReplayResult replay_file(const std::string& path);

}  // namespace looplab
