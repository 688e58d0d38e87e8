#pragma once

#include <optional>
#include <string>
#include <vector>

#include "looplab/protocol.hpp"

namespace looplab {

// One concrete attempt to close the dependency cycle from a seed value of its
// head event. Stops at the first violated constraint.
struct Refutation {
  EventValue seed = EventValue::UNKNOWN;
  std::vector<std::pair<EventId, EventValue>> chain;
  EventId conflict_at = EventId::A2p;
  std::string reason;
};

struct Witness {
  std::vector<EventId> cycle;  // dependency cycle, head repeated at the end
  std::string symbolic;        // e.g. "A2p = B1p = ¬B2 = ¬A1 = ¬A2p"; empty if no parity conflict
  std::vector<Refutation> refutations;
};

struct ConsistencyVerdict {
  std::vector<Assignment> consistent_assignments;  // ascending canonical order
  bool causal_loop = false;
  std::optional<Witness> witness;
};

// The four-event dependency cycle A2p -> A1 -> B2 -> B1p -> A2p.
const std::vector<EventId>& dependency_cycle();

// Total assignments (inputs fixed) that satisfy every local rule under the
// instance schedule, ignoring the kept-value constraint. Canonical order.
std::vector<Assignment> rule_consistent(const ProtocolInstance& inst);

// Values a measurement already executed before a between-arc decoherence must
// keep. Empty optional means no kept value can be defined (ideal histories
// absent or disagreeing); the map lists (event, value) otherwise.
struct KeptValues {
  bool definable = true;
  std::string reason;
  std::vector<std::pair<EventId, EventValue>> values;
};
KeptValues kept_values(const ProtocolInstance& inst);

ConsistencyVerdict enumerate_consistent(const ProtocolInstance& inst);

// Same semantics; requires a non-empty schedule.
ConsistencyVerdict loop_with_schedule(const ProtocolInstance& inst);

struct ScenarioRow {
  ScenarioConfig config;
  ConsistencyVerdict verdict;
};
std::vector<ScenarioRow> scenario_table();

}  // namespace looplab
