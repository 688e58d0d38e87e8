#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "looplab/ephemeral.hpp"
#include "looplab/protocol.hpp"

namespace looplab {

enum class VariantClass : std::uint8_t { First, Alternate };

struct TestAssumption {
  EventId target = EventId::A2p;
  EventValue assumed = EventValue::YES;

  // First: a frame's second measurement (A2, B2p). Alternate: A2p, B2.
  VariantClass variant_class() const;
  std::string str() const;  // "A2p=YES"
  friend bool operator==(const TestAssumption&, const TestAssumption&) = default;
};

enum class StepKind : std::uint8_t { Seed, Eval, Flip, Restart, Decoherence };
std::string_view name(StepKind k);

struct TraceStep {
  int run = 0;    // restarts before this step
  int cycle = 0;  // 1-based within the run
  StepKind kind = StepKind::Eval;
  EventId event = EventId::A2p;
  EventValue value = EventValue::UNKNOWN;
  std::optional<Pair> pair;  // Decoherence steps
  PairStates pairs;          // after the step
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct RevisionTrace {
  TestAssumption assumption;
  EventId entry = EventId::A2p;
  std::vector<TraceStep> steps;
  int restarts = 0;
  int cycle_count = 0;  // excludes each run's confirming pass
  std::vector<int> cycles_per_run;
  std::vector<int> transitions_per_run;  // INTACT->DEMOLISHED per run
  Assignment final_assignment;
  PairStates final_pairs;
};

class NonterminationError : public std::runtime_error {
 public:
  NonterminationError(const std::string& what, RevisionTrace partial)
      : std::runtime_error(what), trace(std::move(partial)) {}
  RevisionTrace trace;
};

struct EvaluateOptions {
  std::optional<EventId> entry;  // defaults to the target
  int cycle_limit = 16;
};

RevisionTrace evaluate(const ProtocolInstance& inst, TestAssumption assumption,
                       const EvaluateOptions& opt = {});

// One more pass over the cycle from the final state, for idempotence checks.
Assignment extra_cycle(const ProtocolInstance& inst, const RevisionTrace& trace);

// Values fixed by the first actions alone (three-valued propagation).
Assignment forced_values(const ProtocolInstance& inst);
bool admissible(const ProtocolInstance& inst, TestAssumption a);

std::vector<TestAssumption> all_assumptions();  // 8 variants

struct VariantRow {
  TestAssumption assumption;
  bool admissible = true;
  RevisionTrace trace;
};
std::vector<VariantRow> run_all_variants(const ProtocolInstance& inst, const EvaluateOptions& opt = {});

enum class PredictionBasis : std::uint8_t {
  AutonomousDecoherence,  // interleaved episodes converge to all NO
  CertainDecoherence,     // stochastic p > 0 over unbounded cycles
  EpisodicFixedPoints,    // both YES, fixed points listed as found
  EphemeralPropagation    // episodes not interleaved
};
std::string_view name(PredictionBasis b);

struct Prediction {
  std::vector<Assignment> outcomes;  // canonical order, deduplicated
  PredictionBasis basis = PredictionBasis::EphemeralPropagation;
  bool unique() const { return outcomes.size() == 1; }
  bool all_measurements_no() const;
};
Prediction predict(const ScenarioConfig& config);

}  // namespace looplab
