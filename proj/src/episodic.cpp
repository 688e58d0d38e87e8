#include "looplab/episodic.hpp"

#include <algorithm>

namespace looplab {

VariantClass TestAssumption::variant_class() const {
  return (target == EventId::A2 || target == EventId::B2p) ? VariantClass::First
                                                           : VariantClass::Alternate;
}

std::string TestAssumption::str() const {
  return std::string(name(target)) + "=" + std::string(name(assumed));
}

std::string_view name(StepKind k) {
  switch (k) {
    case StepKind::Seed: return "seed";
    case StepKind::Eval: return "eval";
    case StepKind::Flip: return "flip";
    case StepKind::Restart: return "restart";
    case StepKind::Decoherence: return "decoherence";
  }
  return "?";
}

std::string_view name(PredictionBasis b) {
  switch (b) {
    case PredictionBasis::AutonomousDecoherence: return "autonomous_decoherence";
    case PredictionBasis::CertainDecoherence: return "certain_decoherence";
    case PredictionBasis::EpisodicFixedPoints: return "episodic_fixed_points";
    case PredictionBasis::EphemeralPropagation: return "ephemeral_propagation";
  }
  return "?";
}

bool Prediction::all_measurements_no() const {
  return !outcomes.empty() && std::all_of(outcomes.begin(), outcomes.end(), [](const Assignment& a) {
    return std::all_of(kMeasurements.begin(), kMeasurements.end(),
                       [&](EventId m) { return a[m] == EventValue::NO; });
  });
}

namespace {

Assignment inputs_of(const ScenarioConfig& c) {
  Assignment a;
  a[EventId::A1p] = c.first_A;
  a[EventId::B1] = c.first_B;
  return a;
}

void check_assumption(const TestAssumption& a) {
  if (!is_measurement(a.target))
    throw std::invalid_argument("test assumption target must be a measurement, got " +
                                std::string(name(a.target)));
  if (a.assumed == EventValue::UNKNOWN)
    throw std::invalid_argument("test assumption must assume YES or NO");
}

}  // namespace

RevisionTrace evaluate(const ProtocolInstance& inst, TestAssumption assumption,
                       const EvaluateOptions& opt) {
  check_assumption(assumption);
  const EventId target = assumption.target;
  const Pair target_pair = pair_of(target);
  const EventId entry = opt.entry.value_or(target);
  const auto order = cycle_order(entry);
  const auto& sched = inst.schedule();

  RevisionTrace tr;
  tr.assumption = assumption;
  tr.entry = entry;
  EventValue assumed = assumption.assumed;

  for (int run = 0;; ++run) {
    Assignment x = inputs_of(inst.config());
    PairStates ps;
    int transitions = 0;
    x[target] = assumed;
    if (assumed == EventValue::NO && first_executed(target_pair) == target)
      transitions += ps.demolish(target_pair, {Provenance::Source::Assumption, target, {}});
    tr.steps.push_back({run, 1, StepKind::Seed, target, assumed, std::nullopt, ps});

    bool untouched = true;
    bool restart = false;
    std::array<bool, 2> fired{false, false};
    int c = 0;
    while (true) {
      ++c;
      bool changed = false;
      for (std::size_t i = 0; i < order.size() && !restart; ++i) {
        const EventId e = order[i];
        if (!(c == 1 && i == 0)) {
          Arc arc{order[(i + order.size() - 1) % order.size()], e};
          for (Pair p : kPairs) {
            auto& f = fired[static_cast<int>(p)];
            if (f || sched.for_pair(p) != arc) continue;
            f = true;
            if (ps.demolish(p, {Provenance::Source::Decoherence, EventId::A1p, arc})) {
              ++transitions;
              if (c > 1) changed = true;
            }
            tr.steps.push_back({run, c, StepKind::Decoherence, e, EventValue::UNKNOWN, p, ps});
          }
        }
        if (c == 1 && e == target) continue;

        EventValue v = local_rule(inst, e, x, ps);
        if (is_measurement(e)) {
          const Pair p = pair_of(e);
          const EventValue type = x[controlling_decision(e)];
          const auto& st = ps[p];
          bool own_assumption_only =
              st.intact() || st.provenance.source == Provenance::Source::Assumption;
          if (e == target && untouched && x[e] == EventValue::NO && type == EventValue::YES &&
              own_assumption_only) {
            restart = true;
            tr.steps.push_back({run, c, StepKind::Restart, e, EventValue::YES, std::nullopt, ps});
            break;
          }
          if (type == EventValue::NO && first_executed(p) == e)
            transitions += ps.demolish(p, {Provenance::Source::Measurement, e, {}});
        }
        StepKind kind = StepKind::Eval;
        if (x[e] != EventValue::UNKNOWN && x[e] != v) {
          changed = true;
          if (e == target) {
            kind = StepKind::Flip;
            untouched = false;
          }
        }
        x[e] = v;
        tr.steps.push_back({run, c, kind, e, v, std::nullopt, ps});
      }
      if (restart) break;
      if (c > 1 && !changed) break;
      if (c >= opt.cycle_limit) {
        tr.final_assignment = x;
        tr.final_pairs = ps;
        throw NonterminationError("no fixed point for " + assumption.str() + " within " +
                                      std::to_string(opt.cycle_limit) + " cycles",
                                  tr);
      }
    }
    tr.cycles_per_run.push_back(c - 1);
    tr.transitions_per_run.push_back(transitions);
    tr.cycle_count += c - 1;
    if (restart) {
      ++tr.restarts;
      assumed = EventValue::YES;
      continue;
    }
    tr.final_assignment = x;
    tr.final_pairs = ps;
    return tr;
  }
}

Assignment extra_cycle(const ProtocolInstance& inst, const RevisionTrace& trace) {
  Assignment x = trace.final_assignment;
  PairStates ps = trace.final_pairs;
  for (EventId e : cycle_order(trace.entry)) {
    EventValue v = local_rule(inst, e, x, ps);
    if (is_measurement(e)) {
      Pair p = pair_of(e);
      if (x[controlling_decision(e)] == EventValue::NO && first_executed(p) == e)
        ps.demolish(p, {Provenance::Source::Measurement, e, {}});
    }
    x[e] = v;
  }
  return x;
}

Assignment forced_values(const ProtocolInstance& inst) {
  const auto& c = inst.config();
  const auto& sched = inst.schedule();
  Assignment x = inputs_of(c);
  // Intact status as YES/NO/UNKNOWN at measurement m.
  auto intact = [&](EventId m) {
    Pair p = pair_of(m);
    auto dec = sched.for_pair(p);
    if (dec && !is_between(p, *dec)) return EventValue::NO;
    EventId f = first_executed(p);
    if (m == f) return EventValue::YES;
    EventValue tf = x[controlling_decision(f)];
    if (tf == EventValue::NO || dec) return EventValue::NO;
    return tf;
  };
  for (int round = 0; round < 8; ++round) {
    x[EventId::A1] = apply_rule(c.rule_A, x[EventId::A2p]);
    x[EventId::B1p] = apply_rule(c.rule_B, x[EventId::B2]);
    for (EventId m : kMeasurements) {
      EventValue t = x[controlling_decision(m)];
      EventValue in = intact(m);
      if (t == EventValue::NO || in == EventValue::NO)
        x[m] = EventValue::NO;
      else if (t == EventValue::YES && in == EventValue::YES)
        x[m] = EventValue::YES;
      else
        x[m] = EventValue::UNKNOWN;
    }
  }
  return x;
}

bool admissible(const ProtocolInstance& inst, TestAssumption a) {
  check_assumption(a);
  EventValue f = forced_values(inst)[a.target];
  return f == EventValue::UNKNOWN || f == a.assumed;
}

std::vector<TestAssumption> all_assumptions() {
  std::vector<TestAssumption> out;
  for (EventId t : {EventId::A2, EventId::B2p, EventId::A2p, EventId::B2})
    for (EventValue v : {EventValue::YES, EventValue::NO}) out.push_back({t, v});
  return out;
}

std::vector<VariantRow> run_all_variants(const ProtocolInstance& inst, const EvaluateOptions& opt) {
  std::vector<VariantRow> rows;
  for (const auto& a : all_assumptions()) rows.push_back({a, admissible(inst, a), evaluate(inst, a, opt)});
  return rows;
}

namespace {

std::vector<Assignment> admissible_fixed_points(const ProtocolInstance& inst) {
  std::vector<Assignment> out;
  for (const auto& row : run_all_variants(inst))
    if (row.admissible) out.push_back(row.trace.final_assignment);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Prediction predict(const ScenarioConfig& config) {
  ProtocolInstance inst = build_instance(config);
  Prediction out;
  if (!both_first_yes(config)) {
    out.outcomes = enumerate_consistent(inst).consistent_assignments;
    out.basis = PredictionBasis::EphemeralPropagation;
    return out;
  }
  if (const auto* st = std::get_if<Stochastic>(&config.mode); st && st->p > 0.0) {
    // Over unbounded cycles every pair decoheres with probability one.
    Arc first = cycle_arcs(EventId::A2p)[0];
    out.outcomes = admissible_fixed_points(inst.with_schedule({{Pair::S, first}, {Pair::Sp, first}}));
    out.basis = PredictionBasis::CertainDecoherence;
    return out;
  }
  out.outcomes = admissible_fixed_points(inst);
  out.basis = out.unique() && out.all_measurements_no() ? PredictionBasis::AutonomousDecoherence
                                                        : PredictionBasis::EpisodicFixedPoints;
  return out;
}

}  // namespace looplab
