#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "looplab/optics.hpp"
#include "looplab/protocol.hpp"

namespace looplab {

// Parse failure with a 1-based source position (0 when not tied to a line).
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ScenarioOptions {
  ScenarioConfig config;
  std::optional<EventId> entry;  // episodic traversal start; the assumption target when unset
  int cycle_limit = 16;
  bool assert_no_loop = false;
  friend bool operator==(const ScenarioOptions&, const ScenarioOptions&) = default;
};

struct McOptions {
  std::vector<double> p;  // required by the mc command
  std::uint64_t trials = 0;
  double confidence = 0.95;
  friend bool operator==(const McOptions&, const McOptions&) = default;
};

struct OpticsOptions {
  DetectorGeometry geometry;
  bool auto_distance = true;  // destructive_geometry(wavelength, separation)
  bool auto_aperture = true;  // optimize_aperture
  std::uint64_t photons = 10000;
  std::uint64_t trials = 1000;
  double alpha = 0.01;
  std::uint64_t grid = 64;
  std::uint64_t profile_points = 801;
  friend bool operator==(const OpticsOptions&, const OpticsOptions&) = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir;  // empty: LOOPLAB_OUT_DIR, then "looplab_out"
  bool emit_trace = false;
  ScenarioOptions scenario;
  McOptions mc;
  OpticsOptions optics;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

bool operator==(const DetectorGeometry& a, const DetectorGeometry& b);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Reports embed the config without output_dir, so relocating a run keeps its bytes.
std::string to_yaml(const RunConfig& c, bool with_output_dir = true);

std::string format_double(double v);  // shortest round-trip form

// Flag-style value parsers shared by the CLI; throw ConfigError.
std::pair<DecisionRule, DecisionRule> parse_rule_pair(const std::string& s);
std::pair<EventValue, EventValue> parse_first_pair(const std::string& s);
ScheduleEntry parse_schedule_entry(const std::string& s);  // "S:A2->B2"
std::string schedule_entry_str(const ScheduleEntry& e);
std::vector<double> parse_double_list(const std::string& s);

std::string resolve_output_dir(const RunConfig& c);

}  // namespace looplab
