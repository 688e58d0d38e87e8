#include <doctest.h>

#include <algorithm>
#include <array>

#include "looplab/episodic.hpp"

using namespace looplab;
using E = EventId;
using V = EventValue;

namespace {

ScenarioConfig make(DecisionRule ra, DecisionRule rb, V fa, V fb) {
  ScenarioConfig c;
  c.rule_A = ra;
  c.rule_B = rb;
  c.first_A = fa;
  c.first_B = fb;
  return c;
}

const ScenarioConfig kThird = make(DecisionRule::Same, DecisionRule::Opposite, V::YES, V::YES);

std::vector<DecoherenceSchedule> all_schedules() {
  std::vector<std::optional<Arc>> options{std::nullopt};
  for (Arc a : cycle_arcs()) options.push_back(a);
  std::vector<DecoherenceSchedule> out;
  for (auto s : options)
    for (auto sp : options) {
      DecoherenceSchedule d;
      if (s) d.add({Pair::S, *s});
      if (sp) d.add({Pair::Sp, *sp});
      out.push_back(d);
    }
  return out;
}

}  // namespace

TEST_CASE("scenario #3 variants converge to the all-NO fixed point") {
  auto rows = run_all_variants(build_instance(kThird));
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CAPTURE(r.assumption.str());
    CHECK(r.admissible);
    const auto& a = r.trace.final_assignment;
    for (E m : kMeasurements) CHECK(a[m] == V::NO);
    CHECK(a[E::A1] == V::NO);
    CHECK(a[E::B1p] == V::YES);
    CHECK(r.trace.cycle_count <= 3);
    if (r.assumption.assumed == V::YES) {
      CHECK(r.trace.restarts == 0);
      CHECK(r.trace.cycle_count == 2);
    } else {
      CHECK(r.trace.restarts == 1);
      CHECK(r.trace.cycle_count == 3);
    }
  }
}

TEST_CASE("alternate variant A2p=YES revises A2p in its second cycle") {
  auto tr = evaluate(build_instance(kThird), {E::A2p, V::YES});
  std::vector<std::pair<E, V>> second;
  for (const auto& s : tr.steps)
    if (s.cycle == 2 && s.kind != StepKind::Decoherence) second.push_back({s.event, s.value});
  REQUIRE(second.size() >= 6);
  CHECK(second[0] == std::pair{E::A2p, V::NO});
  CHECK(second[1] == std::pair{E::A1, V::NO});
  CHECK(second[2] == std::pair{E::A2, V::NO});
  CHECK(second[3] == std::pair{E::B2, V::NO});
  CHECK(second[4] == std::pair{E::B1p, V::YES});
  CHECK(second[5] == std::pair{E::B2p, V::NO});
  auto flip = std::find_if(tr.steps.begin(), tr.steps.end(), [](const TraceStep& s) { return s.kind == StepKind::Flip; });
  REQUIRE(flip != tr.steps.end());
  CHECK(flip->event == E::A2p);
}

TEST_CASE("alternate variant A2p=NO restarts, then reproduces the YES trace") {
  auto inst = build_instance(kThird);
  auto no = evaluate(inst, {E::A2p, V::NO});
  auto yes = evaluate(inst, {E::A2p, V::YES});
  CHECK(no.restarts == 1);
  CHECK(std::count_if(no.steps.begin(), no.steps.end(), [](const TraceStep& s) { return s.kind == StepKind::Restart; }) == 1);
  std::vector<TraceStep> tail;
  for (const auto& s : no.steps)
    if (s.run == 1) tail.push_back({0, s.cycle, s.kind, s.event, s.value, s.pair, s.pairs});
  CHECK(tail == yes.steps);
}

TEST_CASE("one extra cycle from a fixed point changes nothing") {
  for (const auto& c : all_ideal_configs()) {
    auto inst = build_instance(c);
    for (const auto& r : run_all_variants(inst)) CHECK(extra_cycle(inst, r.trace) == r.trace.final_assignment);
  }
}

TEST_CASE("fixed point does not depend on the entry point") {
  // With a single seeded value only some entries can run their first cycle;
  // the rest must refuse rather than read an unevaluated event.
  for (const auto& c : all_ideal_configs()) {
    if (!both_first_yes(c) || !predict(c).unique()) continue;
    auto inst = build_instance(c);
    for (const auto& a : all_assumptions()) {
      if (!admissible(inst, a)) continue;
      auto base = evaluate(inst, a).final_assignment;
      int runnable = 0;
      for (E entry : kCycle) {
        CAPTURE(describe(c));
        CAPTURE(a.str());
        CAPTURE(name(entry));
        std::optional<RevisionTrace> tr;
        try {
          tr = evaluate(inst, a, {entry, 16});
        } catch (const EvaluationOrderError&) {
          continue;
        }
        CHECK(tr->final_assignment == base);
        ++runnable;
      }
      CHECK(runnable >= 2);
      CHECK_NOTHROW(evaluate(inst, a, {cycle_next(a.target), 16}));
    }
  }
}

TEST_CASE("termination and pair-state monotonicity over every schedule") {
  const auto schedules = all_schedules();
  CHECK(schedules.size() == 49);
  for (const auto& c : all_ideal_configs()) {
    for (const auto& sched : schedules) {
      auto inst = build_instance(c).with_schedule(sched);
      for (const auto& a : all_assumptions()) {
        if (!admissible(inst, a)) continue;
        for (E entry : {a.target, cycle_next(a.target)}) {
          CAPTURE(describe(c));
          CAPTURE(sched.str());
          CAPTURE(a.str());
          RevisionTrace tr;
          REQUIRE_NOTHROW(tr = evaluate(inst, a, {entry, 16}));
          for (std::size_t r = 0; r < tr.cycles_per_run.size(); ++r)
            CHECK(tr.cycles_per_run[r] <= 1 + tr.transitions_per_run[r]);
          CHECK(tr.restarts <= 1);
          std::array<V, 8> last{};
          last.fill(V::UNKNOWN);
          for (std::size_t i = 0; i < tr.steps.size(); ++i) {
            const auto& s = tr.steps[i];
            if (i > 0 && s.run != tr.steps[i - 1].run) last.fill(V::UNKNOWN);
            if (s.kind == StepKind::Decoherence || s.kind == StepKind::Restart || !is_measurement(s.event)) continue;
            CHECK_FALSE((last[static_cast<int>(s.event)] == V::NO && s.value == V::YES));
            last[static_cast<int>(s.event)] = s.value;
          }
          for (std::size_t i = 1; i < tr.steps.size(); ++i) {
            if (tr.steps[i].run != tr.steps[i - 1].run) continue;
            for (Pair p : kPairs)
              if (!tr.steps[i - 1].pairs[p].intact()) CHECK_FALSE(tr.steps[i].pairs[p].intact());
          }
          CHECK(extra_cycle(inst, tr) == tr.final_assignment);
        }
      }
    }
  }
}

TEST_CASE("cycle limit is a reported error, not a truncation") {
  auto inst = build_instance(kThird);
  try {
    evaluate(inst, {E::A2, V::YES}, {std::nullopt, 2});
    FAIL("expected NonterminationError");
  } catch (const NonterminationError& e) {
    CHECK_FALSE(e.trace.steps.empty());
    CHECK(std::string(e.what()).find("A2=YES") != std::string::npos);
  }
}

TEST_CASE("assumptions must target a measurement with a definite value") {
  auto inst = build_instance(kThird);
  CHECK_THROWS_AS(evaluate(inst, {E::A1, V::YES}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(inst, {E::A2, V::UNKNOWN}), std::invalid_argument);
}

TEST_CASE("admissibility uses values forced by the first actions") {
  auto inst = build_instance(make(DecisionRule::Same, DecisionRule::Same, V::NO, V::NO));
  auto forced = forced_values(inst);
  CHECK(forced[E::A2p] == V::NO);
  CHECK(forced[E::B2] == V::NO);
  CHECK_FALSE(admissible(inst, {E::A2p, V::YES}));
  CHECK(admissible(inst, {E::A2p, V::NO}));
  for (const auto& a : all_assumptions()) CHECK(admissible(build_instance(kThird), a));
}

TEST_CASE("episodic fixed points agree with unique ephemeral assignments") {
  for (const auto& c : all_ideal_configs()) {
    auto inst = build_instance(c);
    auto v = enumerate_consistent(inst);
    if (v.consistent_assignments.size() != 1) continue;
    for (const auto& r : run_all_variants(inst)) {
      if (!r.admissible) continue;
      CAPTURE(describe(c));
      CAPTURE(r.assumption.str());
      CHECK(r.trace.final_assignment == v.consistent_assignments[0]);
    }
  }
}

TEST_CASE("predict") {
  auto p3 = predict(kThird);
  CHECK(p3.basis == PredictionBasis::AutonomousDecoherence);
  CHECK(p3.unique());
  CHECK(p3.all_measurements_no());

  for (auto rules : {std::pair{DecisionRule::Same, DecisionRule::Same},
                     std::pair{DecisionRule::Opposite, DecisionRule::Opposite}}) {
    auto c = make(rules.first, rules.second, V::YES, V::YES);
    c.mode = Stochastic{0.01};
    auto p = predict(c);
    CHECK(p.basis == PredictionBasis::CertainDecoherence);
    for (const auto& a : p.outcomes) {
      CHECK(a[E::A2p] == V::NO);
      CHECK(a[E::B2] == V::NO);
    }
  }

  auto quiet = make(DecisionRule::Same, DecisionRule::Opposite, V::NO, V::YES);
  auto pq = predict(quiet);
  CHECK(pq.basis == PredictionBasis::EphemeralPropagation);
  CHECK(pq.outcomes == enumerate_consistent(build_instance(quiet)).consistent_assignments);
}
