#include "looplab/ephemeral.hpp"

#include <algorithm>

namespace looplab {

namespace {

// Value of a cycle event as a function of the seed x of the head event.
struct Lit {
  bool is_const = false;
  bool value = false;  // when is_const
  bool neg = false;    // otherwise: x or ¬x
};

Lit constant(bool v) { return {true, v, false}; }

Lit lit_and(std::initializer_list<Lit> terms) {
  std::optional<Lit> var;
  for (const Lit& t : terms) {
    if (t.is_const) {
      if (!t.value) return constant(false);
      continue;
    }
    if (var && var->neg != t.neg) return constant(false);
    var = t;
  }
  return var ? *var : constant(true);
}

Lit lit_rule(DecisionRule r, Lit in) {
  if (r == DecisionRule::Same) return in;
  if (in.is_const) return constant(!in.value);
  return {false, false, !in.neg};
}

Lit lit_input(EventValue v) { return constant(v == EventValue::YES); }

std::string symbolic_chain(const ProtocolInstance& inst) {
  const auto& c = inst.config();
  const auto& sched = inst.schedule();
  Lit a2p{false, false, false};
  Lit a1 = lit_rule(c.rule_A, a2p);
  Lit b2 = lit_and({lit_input(c.first_B), a1, sched.for_pair(Pair::S) ? constant(false) : a1});
  Lit b1p = lit_rule(c.rule_B, b2);
  Lit back = lit_and({lit_input(c.first_A), b1p, sched.for_pair(Pair::Sp) ? constant(false) : b1p});
  if (back.is_const || back.neg == a2p.neg) return {};
  const std::vector<std::pair<EventId, Lit>> nodes = {
      {EventId::A2p, back}, {EventId::B1p, b1p}, {EventId::B2, b2}, {EventId::A1, a1},
      {EventId::A2p, a2p}};
  std::string out;
  for (const auto& [e, l] : nodes) {
    if (!out.empty()) out += " = ";
    if (l.neg != back.neg) out += "¬";
    out += name(e);
  }
  return out;
}

Assignment with_inputs(const ScenarioConfig& c) {
  Assignment a;
  a[EventId::A1p] = c.first_A;
  a[EventId::B1] = c.first_B;
  return a;
}

EventValue evaluate_in_place(const ProtocolInstance& inst, Assignment& a, EventId e) {
  PairStates ps;
  if (is_measurement(e)) {
    auto st = induced_pair_state(inst, a, e);
    if (!st.intact()) ps.demolish(pair_of(e), st.provenance);
  }
  a[e] = local_rule(inst, e, a, ps);
  return a[e];
}

Refutation refute(const ProtocolInstance& inst, const KeptValues& kept, EventValue seed) {
  Refutation r;
  r.seed = seed;
  Assignment a = with_inputs(inst.config());
  a[EventId::A2p] = seed;
  r.chain.push_back({EventId::A2p, seed});
  for (EventId e : {EventId::A1, EventId::A2, EventId::B2, EventId::B1p, EventId::B2p}) {
    EventValue v = evaluate_in_place(inst, a, e);
    r.chain.push_back({e, v});
    for (const auto& [k, kv] : kept.values) {
      if (k == e && kv != v) {
        r.conflict_at = e;
        r.reason = std::string(name(e)) + " already executed as " + std::string(name(kv)) +
                   " before the decoherence but evaluates to " + std::string(name(v));
        return r;
      }
    }
  }
  Assignment probe = a;
  EventValue back = evaluate_in_place(inst, probe, EventId::A2p);
  r.chain.push_back({EventId::A2p, back});
  if (back != seed) {
    r.conflict_at = EventId::A2p;
    r.reason = "A2p evaluates to " + std::string(name(back)) + ", contradicting " +
               std::string(name(seed));
    return r;
  }
  if (!kept.definable) {
    r.conflict_at = EventId::A2p;
    r.reason = kept.reason;
  }
  return r;
}

}  // namespace

const std::vector<EventId>& dependency_cycle() {
  static const std::vector<EventId> c = {EventId::A2p, EventId::A1, EventId::B2, EventId::B1p,
                                         EventId::A2p};
  return c;
}

std::vector<Assignment> rule_consistent(const ProtocolInstance& inst) {
  std::vector<Assignment> out;
  for (unsigned bits = 0; bits < 64; ++bits) {
    Assignment a = with_inputs(inst.config());
    for (std::size_t i = 0; i < kCycle.size(); ++i) a[kCycle[i]] = from_bool((bits >> i) & 1u);
    if (satisfies_rules(inst, a)) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

KeptValues kept_values(const ProtocolInstance& inst) {
  KeptValues kv;
  if (inst.schedule().empty()) return kv;
  auto ideal = rule_consistent(inst.ideal());
  if (ideal.empty()) {
    kv.definable = false;
    kv.reason = "the undisturbed protocol has no consistent history for the decoherence to interrupt";
    return kv;
  }
  for (const auto& e : inst.schedule().entries()) {
    if (!is_between(e.pair, e.arc)) continue;
    EventId f = first_executed(e.pair);
    EventValue v = ideal.front()[f];
    for (const auto& b : ideal) {
      if (b[f] != v) {
        kv.definable = false;
        kv.reason = std::string(name(f)) + " has no single value across the undisturbed histories";
        return kv;
      }
    }
    kv.values.push_back({f, v});
  }
  return kv;
}

ConsistencyVerdict enumerate_consistent(const ProtocolInstance& inst) {
  ConsistencyVerdict out;
  auto kept = kept_values(inst);
  if (kept.definable) {
    for (const auto& a : rule_consistent(inst)) {
      bool ok = std::all_of(kept.values.begin(), kept.values.end(),
                            [&](const auto& kv) { return a[kv.first] == kv.second; });
      if (ok) out.consistent_assignments.push_back(a);
    }
  }
  out.causal_loop = out.consistent_assignments.empty();
  if (out.causal_loop) {
    Witness w;
    w.cycle = dependency_cycle();
    w.symbolic = symbolic_chain(kept.definable ? inst : inst.ideal());
    for (EventValue seed : {EventValue::YES, EventValue::NO})
      w.refutations.push_back(refute(inst, kept, seed));
    out.witness = std::move(w);
  }
  return out;
}

ConsistencyVerdict loop_with_schedule(const ProtocolInstance& inst) {
  if (inst.schedule().empty())
    throw std::invalid_argument("loop_with_schedule needs a non-empty schedule");
  return enumerate_consistent(inst);
}

std::vector<ScenarioRow> scenario_table() {
  std::vector<ScenarioRow> rows;
  for (const auto& c : all_ideal_configs()) rows.push_back({c, enumerate_consistent(build_instance(c))});
  return rows;
}

}  // namespace looplab
