#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace looplab {

enum class EventId : std::uint8_t { A1p, A2p, A1, A2, B1, B2, B1p, B2p };
enum class EventValue : std::uint8_t { NO, YES, UNKNOWN };
enum class Frame : std::uint8_t { A, B };
enum class Kind : std::uint8_t { Decision, Measurement };
enum class Pair : std::uint8_t { S, Sp };
enum class DecisionRule : std::uint8_t { Same, Opposite };

inline constexpr std::array<EventId, 8> kAllEvents = {
    EventId::A1p, EventId::A2p, EventId::A1, EventId::A2,
    EventId::B1,  EventId::B2,  EventId::B1p, EventId::B2p};

// Events on the measurement cycle, in execution order starting after B2p.
inline constexpr std::array<EventId, 6> kCycle = {
    EventId::B2p, EventId::A2p, EventId::A1, EventId::A2, EventId::B2, EventId::B1p};

inline constexpr std::array<EventId, 4> kMeasurements = {
    EventId::A2p, EventId::A2, EventId::B2, EventId::B2p};

inline constexpr std::array<Pair, 2> kPairs = {Pair::S, Pair::Sp};

struct EventInfo {
  Frame frame;
  Kind kind;
  std::optional<Pair> pair;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

EventInfo info(EventId e);
std::string_view name(EventId e);
std::optional<EventId> parse_event(std::string_view s);
std::string_view name(EventValue v);
std::string_view name(Pair p);
std::string_view name(DecisionRule r);
std::optional<DecisionRule> parse_rule(std::string_view s);
std::optional<EventValue> parse_value(std::string_view s);  // YES|NO only
std::optional<Pair> parse_pair(std::string_view s);

inline bool is_measurement(EventId e) { return info(e).kind == Kind::Measurement; }
inline EventValue negate(EventValue v) {
  return v == EventValue::YES ? EventValue::NO : v == EventValue::NO ? EventValue::YES : v;
}
inline EventValue from_bool(bool b) { return b ? EventValue::YES : EventValue::NO; }

EventValue apply_rule(DecisionRule r, EventValue observed);

// Static wiring of the protocol.
Pair pair_of(EventId measurement);
EventId controlling_decision(EventId measurement);
EventId first_executed(Pair p);   // A2 for S, B2p for Sp
EventId second_executed(Pair p);  // B2 for S, A2p for Sp
EventId rule_input(EventId decision);  // A1 <- A2p, B1p <- B2

struct Arc {
  EventId from;
  EventId to;
  friend bool operator==(const Arc&, const Arc&) = default;
};

std::string arc_name(Arc a);  // "A2->B2"
std::optional<Arc> parse_arc(std::string_view s);
bool on_cycle(Arc a);
std::size_t cycle_position(EventId e);  // throws for A1p/B1
EventId cycle_next(EventId e);
EventId cycle_prev(EventId e);
// The six arcs, in traversal order beginning with the arc leaving `entry`.
std::array<Arc, 6> cycle_arcs(EventId entry = EventId::A2p);
// Traversal order of the six cycle events beginning at `entry`.
std::array<EventId, 6> cycle_order(EventId entry);
// True when `arc` lies between the pair's two measurements on that pair's timeline.
bool is_between(Pair p, Arc a);

struct ScheduleEntry {
  Pair pair;
  Arc arc;
  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

class DecoherenceSchedule {
 public:
  DecoherenceSchedule() = default;
  DecoherenceSchedule(std::initializer_list<ScheduleEntry> entries);

  void add(ScheduleEntry e);  // throws ConfigError on off-cycle arc or second entry per pair
  std::optional<Arc> for_pair(Pair p) const { return arcs_[static_cast<int>(p)]; }
  std::vector<ScheduleEntry> entries() const;
  bool empty() const { return !arcs_[0] && !arcs_[1]; }
  std::string str() const;

  friend bool operator==(const DecoherenceSchedule&, const DecoherenceSchedule&) = default;

 private:
  std::array<std::optional<Arc>, 2> arcs_{};
};

struct Ideal {
  friend bool operator==(const Ideal&, const Ideal&) = default;
};
struct Scheduled {
  DecoherenceSchedule schedule;
  friend bool operator==(const Scheduled&, const Scheduled&) = default;
};
struct Stochastic {
  double p = 0.0;
  friend bool operator==(const Stochastic&, const Stochastic&) = default;
};
using Mode = std::variant<Ideal, Scheduled, Stochastic>;

struct ScenarioConfig {
  DecisionRule rule_A = DecisionRule::Same;
  DecisionRule rule_B = DecisionRule::Same;
  EventValue first_A = EventValue::YES;  // A1p
  EventValue first_B = EventValue::YES;  // B1
  Mode mode = Ideal{};

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

std::string describe(const ScenarioConfig& c);  // "(SAME,OPPOSITE,YES,YES)"
bool both_first_yes(const ScenarioConfig& c);

class Assignment {
 public:
  Assignment() { values_.fill(EventValue::UNKNOWN); }

  EventValue& operator[](EventId e) { return values_[static_cast<int>(e)]; }
  EventValue operator[](EventId e) const { return values_[static_cast<int>(e)]; }
  bool total() const;
  std::string str() const;  // measurement cycle events only, "A2p=YES A1=NO ..."

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::array<EventValue, 8> values_;
};

enum class PairStatus : std::uint8_t { Intact, Demolished };

struct Provenance {
  enum class Source : std::uint8_t { None, Measurement, Decoherence, Assumption };
  Source source = Source::None;
  EventId event = EventId::A1p;  // Measurement / Assumption
  Arc arc{EventId::B2p, EventId::A2p};  // Decoherence

  std::string str() const;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct PairState {
  PairStatus status = PairStatus::Intact;
  Provenance provenance;

  bool intact() const { return status == PairStatus::Intact; }
  friend bool operator==(const PairState&, const PairState&) = default;
};

class PairStates {
 public:
  const PairState& operator[](Pair p) const { return s_[static_cast<int>(p)]; }
  // Returns true if the pair transitioned. DEMOLISHED never reverts.
  bool demolish(Pair p, Provenance why);
  friend bool operator==(const PairStates&, const PairStates&) = default;

 private:
  std::array<PairState, 2> s_{};
};

class ProtocolInstance {
 public:
  const ScenarioConfig& config() const { return config_; }
  const DecoherenceSchedule& schedule() const { return schedule_; }
  PairStates initial_pair_states() const { return {}; }
  ProtocolInstance with_schedule(DecoherenceSchedule s) const;
  ProtocolInstance ideal() const { return with_schedule({}); }

 private:
  friend ProtocolInstance build_instance(const ScenarioConfig& config);
  ScenarioConfig config_;
  DecoherenceSchedule schedule_;
};

// Validates the config and assembles an instance. Stochastic mode yields an
// empty schedule; schedules are sampled per trial by decoherence_mc.
ProtocolInstance build_instance(const ScenarioConfig& config);

// Value of `event` given the values it reads in `partial` and the pair states
// seen at its execution. Throws EvaluationOrderError on an UNKNOWN read.
EventValue local_rule(const ProtocolInstance& inst, EventId event, const Assignment& partial,
                      const PairStates& pairs);

// Pair state of measurement `m`'s pair at its execution, induced by a
// (possibly partial) assignment and the instance schedule. Throws
// EvaluationOrderError if the first member's type is needed but UNKNOWN.
PairState induced_pair_state(const ProtocolInstance& inst, const Assignment& a, EventId m);

// True when every event's value equals its local rule under induced pair states.
bool satisfies_rules(const ProtocolInstance& inst, const Assignment& a);

// Decision events must follow the configured rules and inputs.
bool decisions_follow_rules(const ScenarioConfig& c, const Assignment& a);

// Frame/pair relabeling A<->B, S<->Sp, primed<->unprimed.
EventId swap_frames(EventId e);
Pair swap_frames(Pair p);
Arc swap_frames(Arc a);
Assignment swap_frames(const Assignment& a);
ScenarioConfig swap_frames(const ScenarioConfig& c);
DecoherenceSchedule swap_frames(const DecoherenceSchedule& s);

// All 16 ideal (rule_A, rule_B, A1p, B1) combinations in table order.
std::vector<ScenarioConfig> all_ideal_configs();

}  // namespace looplab
