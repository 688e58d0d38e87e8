#include "looplab/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace looplab {

namespace {

constexpr std::array<std::string_view, 8> kEventNames = {"A1p", "A2p", "A1", "A2",
                                                         "B1",  "B2",  "B1p", "B2p"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

EventInfo info(EventId e) {
  switch (e) {
    case EventId::A1p: return {Frame::A, Kind::Decision, std::nullopt};
    case EventId::A2p: return {Frame::A, Kind::Measurement, Pair::Sp};
    case EventId::A1: return {Frame::A, Kind::Decision, std::nullopt};
    case EventId::A2: return {Frame::A, Kind::Measurement, Pair::S};
    case EventId::B1: return {Frame::B, Kind::Decision, std::nullopt};
    case EventId::B2: return {Frame::B, Kind::Measurement, Pair::S};
    case EventId::B1p: return {Frame::B, Kind::Decision, std::nullopt};
    case EventId::B2p: return {Frame::B, Kind::Measurement, Pair::Sp};
  }
  throw std::invalid_argument("bad EventId");
}

std::string_view name(EventId e) { return kEventNames[static_cast<int>(e)]; }

std::optional<EventId> parse_event(std::string_view s) {
  for (EventId e : kAllEvents)
    if (name(e) == s || lower(name(e)) == lower(s)) return e;
  return std::nullopt;
}

std::string_view name(EventValue v) {
  switch (v) {
    case EventValue::NO: return "NO";
    case EventValue::YES: return "YES";
    case EventValue::UNKNOWN: return "UNKNOWN";
  }
  return "?";
}

std::string_view name(Pair p) { return p == Pair::S ? "S" : "Sp"; }

std::string_view name(DecisionRule r) { return r == DecisionRule::Same ? "SAME" : "OPPOSITE"; }

std::optional<DecisionRule> parse_rule(std::string_view s) {
  auto l = lower(s);
  if (l == "same") return DecisionRule::Same;
  if (l == "opposite") return DecisionRule::Opposite;
  return std::nullopt;
}

std::optional<EventValue> parse_value(std::string_view s) {
  auto l = lower(s);
  if (l == "yes") return EventValue::YES;
  if (l == "no") return EventValue::NO;
  return std::nullopt;
}

std::optional<Pair> parse_pair(std::string_view s) {
  auto l = lower(s);
  if (l == "s") return Pair::S;
  if (l == "sp" || l == "s'") return Pair::Sp;
  return std::nullopt;
}

EventValue apply_rule(DecisionRule r, EventValue observed) {
  if (observed == EventValue::UNKNOWN) return EventValue::UNKNOWN;
  return r == DecisionRule::Same ? observed : negate(observed);
}

Pair pair_of(EventId m) {
  auto i = info(m);
  if (!i.pair) throw std::invalid_argument(std::string(name(m)) + " is not a measurement");
  return *i.pair;
}

EventId controlling_decision(EventId m) {
  switch (m) {
    case EventId::A2p: return EventId::A1p;
    case EventId::A2: return EventId::A1;
    case EventId::B2: return EventId::B1;
    case EventId::B2p: return EventId::B1p;
    default: throw std::invalid_argument(std::string(name(m)) + " is not a measurement");
  }
}

EventId first_executed(Pair p) { return p == Pair::S ? EventId::A2 : EventId::B2p; }
EventId second_executed(Pair p) { return p == Pair::S ? EventId::B2 : EventId::A2p; }

EventId rule_input(EventId d) {
  if (d == EventId::A1) return EventId::A2p;
  if (d == EventId::B1p) return EventId::B2;
  throw std::invalid_argument(std::string(name(d)) + " has no rule input");
}

std::string arc_name(Arc a) {
  return std::string(name(a.from)) + "->" + std::string(name(a.to));
}

std::optional<Arc> parse_arc(std::string_view s) {
  std::size_t cut = s.find("->");
  std::size_t len = 2;
  if (cut == std::string_view::npos) {
    cut = s.find('-');
    len = 1;
  }
  if (cut == std::string_view::npos) return std::nullopt;
  auto from = parse_event(s.substr(0, cut));
  auto to = parse_event(s.substr(cut + len));
  if (!from || !to) return std::nullopt;
  return Arc{*from, *to};
}

std::size_t cycle_position(EventId e) {
  for (std::size_t i = 0; i < kCycle.size(); ++i)
    if (kCycle[i] == e) return i;
  throw std::invalid_argument(std::string(name(e)) + " is not on the measurement cycle");
}

EventId cycle_next(EventId e) { return kCycle[(cycle_position(e) + 1) % kCycle.size()]; }
EventId cycle_prev(EventId e) {
  return kCycle[(cycle_position(e) + kCycle.size() - 1) % kCycle.size()];
}

bool on_cycle(Arc a) {
  auto is_cyc = [](EventId e) { return e != EventId::A1p && e != EventId::B1; };
  return is_cyc(a.from) && is_cyc(a.to) && cycle_next(a.from) == a.to;
}

std::array<EventId, 6> cycle_order(EventId entry) {
  std::array<EventId, 6> out{};
  std::size_t start = cycle_position(entry);
  for (std::size_t i = 0; i < 6; ++i) out[i] = kCycle[(start + i) % 6];
  return out;
}

std::array<Arc, 6> cycle_arcs(EventId entry) {
  auto order = cycle_order(entry);
  std::array<Arc, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = Arc{order[i], order[(i + 1) % 6]};
  return out;
}

bool is_between(Pair p, Arc a) {
  return a.from == first_executed(p) && a.to == cycle_next(first_executed(p));
}

DecoherenceSchedule::DecoherenceSchedule(std::initializer_list<ScheduleEntry> entries) {
  for (const auto& e : entries) add(e);
}

void DecoherenceSchedule::add(ScheduleEntry e) {
  if (!on_cycle(e.arc))
    throw ConfigError("decoherence arc " + arc_name(e.arc) + " is not on the measurement cycle");
  auto& slot = arcs_[static_cast<int>(e.pair)];
  if (slot)
    throw ConfigError("pair " + std::string(name(e.pair)) + " already has a decoherence entry on " +
                      arc_name(*slot));
  slot = e.arc;
}

std::vector<ScheduleEntry> DecoherenceSchedule::entries() const {
  std::vector<ScheduleEntry> out;
  for (Pair p : kPairs)
    if (auto a = for_pair(p)) out.push_back({p, *a});
  return out;
}

std::string DecoherenceSchedule::str() const {
  std::string out;
  for (const auto& e : entries()) {
    if (!out.empty()) out += ",";
    out += std::string(name(e.pair)) + ":" + arc_name(e.arc);
  }
  return out.empty() ? "none" : out;
}

std::string describe(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "(" << name(c.rule_A) << "," << name(c.rule_B) << "," << name(c.first_A) << ","
     << name(c.first_B) << ")";
  return os.str();
}

bool both_first_yes(const ScenarioConfig& c) {
  return c.first_A == EventValue::YES && c.first_B == EventValue::YES;
}

bool Assignment::total() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](EventValue v) { return v == EventValue::UNKNOWN; });
}

std::string Assignment::str() const {
  std::string out;
  for (EventId e : cycle_order(EventId::A2p)) {
    if (!out.empty()) out += ' ';
    out += std::string(name(e)) + "=" + std::string(name((*this)[e]));
  }
  return out;
}

std::string Provenance::str() const {
  switch (source) {
    case Source::None: return "";
    case Source::Measurement: return std::string(name(event));
    case Source::Assumption: return "assumed:" + std::string(name(event));
    case Source::Decoherence: return "decoherence:" + arc_name(arc);
  }
  return "";
}

bool PairStates::demolish(Pair p, Provenance why) {
  auto& s = s_[static_cast<int>(p)];
  if (!s.intact()) return false;
  s.status = PairStatus::Demolished;
  s.provenance = why;
  return true;
}

ProtocolInstance ProtocolInstance::with_schedule(DecoherenceSchedule s) const {
  ProtocolInstance out = *this;
  out.schedule_ = std::move(s);
  return out;
}

ProtocolInstance build_instance(const ScenarioConfig& config) {
  auto check_input = [](EventValue v, const char* field) {
    if (v == EventValue::UNKNOWN)
      throw ConfigError(std::string(field) + " must be YES or NO");
  };
  check_input(config.first_A, "first_action_A");
  check_input(config.first_B, "first_action_B");
  ProtocolInstance inst;
  inst.config_ = config;
  if (const auto* s = std::get_if<Scheduled>(&config.mode)) {
    for (const auto& e : s->schedule.entries())
      if (!on_cycle(e.arc))
        throw ConfigError("decoherence arc " + arc_name(e.arc) + " is not on the measurement cycle");
    inst.schedule_ = s->schedule;
  } else if (const auto* st = std::get_if<Stochastic>(&config.mode)) {
    if (!(st->p >= 0.0 && st->p <= 1.0))
      throw ConfigError("decoherence probability p must lie in [0,1]");
  }
  return inst;
}

namespace {

EventValue read(const Assignment& a, EventId reader, EventId dep) {
  EventValue v = a[dep];
  if (v == EventValue::UNKNOWN)
    throw EvaluationOrderError(std::string(name(reader)) + " reads " + std::string(name(dep)) +
                               " before it is evaluated");
  return v;
}

}  // namespace

EventValue local_rule(const ProtocolInstance& inst, EventId event, const Assignment& partial,
                      const PairStates& pairs) {
  const auto& c = inst.config();
  switch (event) {
    case EventId::A1p: return c.first_A;
    case EventId::B1: return c.first_B;
    case EventId::A1: return apply_rule(c.rule_A, read(partial, event, EventId::A2p));
    case EventId::B1p: return apply_rule(c.rule_B, read(partial, event, EventId::B2));
    default: break;
  }
  EventValue type = read(partial, event, controlling_decision(event));
  if (type == EventValue::NO) return EventValue::NO;
  return pairs[pair_of(event)].intact() ? EventValue::YES : EventValue::NO;
}

PairState induced_pair_state(const ProtocolInstance& inst, const Assignment& a, EventId m) {
  Pair p = pair_of(m);
  auto dec = inst.schedule().for_pair(p);
  PairState demolished_by_decoherence{PairStatus::Demolished,
                                      {Provenance::Source::Decoherence, EventId::A1p,
                                       dec.value_or(Arc{EventId::B2p, EventId::A2p})}};
  if (dec && !is_between(p, *dec)) return demolished_by_decoherence;
  EventId f = first_executed(p);
  if (m == f) return {};
  if (read(a, m, controlling_decision(f)) == EventValue::NO)
    return {PairStatus::Demolished, {Provenance::Source::Measurement, f, {}}};
  if (dec) return demolished_by_decoherence;
  return {};
}

bool satisfies_rules(const ProtocolInstance& inst, const Assignment& a) {
  for (EventId e : kAllEvents) {
    PairStates ps;
    if (is_measurement(e)) {
      auto st = induced_pair_state(inst, a, e);
      if (!st.intact()) ps.demolish(pair_of(e), st.provenance);
    }
    if (a[e] != local_rule(inst, e, a, ps)) return false;
  }
  return true;
}

bool decisions_follow_rules(const ScenarioConfig& c, const Assignment& a) {
  return a[EventId::A1p] == c.first_A && a[EventId::B1] == c.first_B &&
         a[EventId::A1] == apply_rule(c.rule_A, a[EventId::A2p]) &&
         a[EventId::B1p] == apply_rule(c.rule_B, a[EventId::B2]);
}

EventId swap_frames(EventId e) {
  switch (e) {
    case EventId::A1p: return EventId::B1;
    case EventId::B1: return EventId::A1p;
    case EventId::A2p: return EventId::B2;
    case EventId::B2: return EventId::A2p;
    case EventId::A1: return EventId::B1p;
    case EventId::B1p: return EventId::A1;
    case EventId::A2: return EventId::B2p;
    case EventId::B2p: return EventId::A2;
  }
  return e;
}

Pair swap_frames(Pair p) { return p == Pair::S ? Pair::Sp : Pair::S; }

Arc swap_frames(Arc a) { return {swap_frames(a.from), swap_frames(a.to)}; }

Assignment swap_frames(const Assignment& a) {
  Assignment out;
  for (EventId e : kAllEvents) out[swap_frames(e)] = a[e];
  return out;
}

DecoherenceSchedule swap_frames(const DecoherenceSchedule& s) {
  DecoherenceSchedule out;
  for (const auto& e : s.entries()) out.add({swap_frames(e.pair), swap_frames(e.arc)});
  return out;
}

ScenarioConfig swap_frames(const ScenarioConfig& c) {
  ScenarioConfig out = c;
  out.rule_A = c.rule_B;
  out.rule_B = c.rule_A;
  out.first_A = c.first_B;
  out.first_B = c.first_A;
  if (const auto* s = std::get_if<Scheduled>(&c.mode)) out.mode = Scheduled{swap_frames(s->schedule)};
  return out;
}

std::vector<ScenarioConfig> all_ideal_configs() {
  std::vector<ScenarioConfig> out;
  for (DecisionRule ra : {DecisionRule::Same, DecisionRule::Opposite})
    for (DecisionRule rb : {DecisionRule::Same, DecisionRule::Opposite})
      for (EventValue fa : {EventValue::YES, EventValue::NO})
        for (EventValue fb : {EventValue::YES, EventValue::NO})
          out.push_back({ra, rb, fa, fb, Ideal{}});
  return out;
}

}  // namespace looplab
