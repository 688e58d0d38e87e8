#include <doctest.h>

#include <algorithm>
#include <optional>

#include "looplab/ephemeral.hpp"

using namespace looplab;
using E = EventId;
using V = EventValue;

namespace {

V yes_if(bool b) { return b ? V::YES : V::NO; }
bool is_yes(V v) { return v == V::YES; }

// Brute force over the six cycle values with the value algebra written out
// directly. Only decoherence off the between-arc is modelled here: it leaves
// the pair demolished for both of its measurements. A decoherence interrupts a
// running history, so a config with no ideal history has none under any schedule.
std::vector<Assignment> oracle(const ScenarioConfig& c, bool kill_s, bool kill_sp) {
  std::vector<Assignment> out;
  for (int mask = 0; mask < 64; ++mask) {
    Assignment a;
    a[E::A1p] = c.first_A;
    a[E::B1] = c.first_B;
    for (int i = 0; i < 6; ++i) a[kCycle[i]] = yes_if(mask >> i & 1);
    bool a1p = is_yes(c.first_A), b1 = is_yes(c.first_B);
    bool ok = a[E::A1] == (c.rule_A == DecisionRule::Same ? a[E::A2p] : yes_if(!is_yes(a[E::A2p]))) &&
              a[E::B1p] == (c.rule_B == DecisionRule::Same ? a[E::B2] : yes_if(!is_yes(a[E::B2])));
    bool a1 = is_yes(a[E::A1]), b1p = is_yes(a[E::B1p]);
    ok = ok && a[E::A2] == yes_if(!kill_s && a1);
    ok = ok && a[E::B2] == yes_if(!kill_s && a1 && b1);
    ok = ok && a[E::B2p] == yes_if(!kill_sp && b1p);
    ok = ok && a[E::A2p] == yes_if(!kill_sp && b1p && a1p);
    if (ok) out.push_back(a);
  }
  if ((kill_s || kill_sp) && oracle(c, false, false).empty()) return {};
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::optional<Arc>> non_between(Pair p) {
  std::vector<std::optional<Arc>> out{std::nullopt};
  for (Arc a : cycle_arcs())
    if (!is_between(p, a)) out.push_back(a);
  return out;
}

ScenarioConfig make(DecisionRule ra, DecisionRule rb, V fa, V fb) {
  ScenarioConfig c;
  c.rule_A = ra;
  c.rule_B = rb;
  c.first_A = fa;
  c.first_B = fb;
  return c;
}

const auto Same = DecisionRule::Same;
const auto Opp = DecisionRule::Opposite;

}  // namespace

TEST_CASE("ideal configs match the brute-force oracle") {
  for (const auto& c : all_ideal_configs()) {
    CAPTURE(describe(c));
    auto v = enumerate_consistent(build_instance(c));
    CHECK(v.consistent_assignments == oracle(c, false, false));
    CHECK(v.causal_loop == v.consistent_assignments.empty());
    CHECK(v.witness.has_value() == v.causal_loop);
  }
}

TEST_CASE("non-between decoherence matches the brute-force oracle") {
  for (const auto& c : all_ideal_configs()) {
    for (auto s : non_between(Pair::S)) {
      for (auto sp : non_between(Pair::Sp)) {
        DecoherenceSchedule sched;
        if (s) sched.add({Pair::S, *s});
        if (sp) sched.add({Pair::Sp, *sp});
        CAPTURE(describe(c));
        CAPTURE(sched.str());
        auto inst = build_instance(c).with_schedule(sched);
        CHECK(enumerate_consistent(inst).consistent_assignments == oracle(c, s.has_value(), sp.has_value()));
      }
    }
  }
}

TEST_CASE("the table loops only for mixed rules with both first actions YES") {
  auto table = scenario_table();
  REQUIRE(table.size() == 16);
  for (const auto& row : table) {
    bool mixed = row.config.rule_A != row.config.rule_B;
    bool both_yes = both_first_yes(row.config);
    CAPTURE(describe(row.config));
    CHECK(row.verdict.causal_loop == (mixed && both_yes));
  }
}

TEST_CASE("first and second cases of scenario #3 reproduce the printed chains") {
  // A's first action NO: A2p, A1, A2, B2 all NO; B1p and B2p YES.
  for (V fb : {V::YES, V::NO}) {
    auto v = enumerate_consistent(build_instance(make(Same, Opp, V::NO, fb)));
    REQUIRE(v.consistent_assignments.size() == 1);
    CHECK(v.consistent_assignments[0].str() == "A2p=NO A1=NO A2=NO B2=NO B1p=YES B2p=YES");
  }
  // B's first action NO with A's YES: B2 NO, everything else YES.
  auto v = enumerate_consistent(build_instance(make(Same, Opp, V::YES, V::NO)));
  REQUIRE(v.consistent_assignments.size() == 1);
  CHECK(v.consistent_assignments[0].str() == "A2p=YES A1=YES A2=YES B2=NO B1p=YES B2p=YES");
}

TEST_CASE("scenario #3 witness") {
  auto v = enumerate_consistent(build_instance(make(Same, Opp, V::YES, V::YES)));
  REQUIRE(v.witness);
  CHECK(v.witness->symbolic == "A2p = B1p = ¬B2 = ¬A1 = ¬A2p");
  CHECK(v.witness->cycle == std::vector<E>{E::A2p, E::A1, E::B2, E::B1p, E::A2p});
  REQUIRE(v.witness->refutations.size() == 2);
  for (const auto& r : v.witness->refutations) {
    CHECK(r.conflict_at == E::A2p);
    CHECK(r.chain.front().first == E::A2p);
    CHECK(r.chain.front().second == r.seed);
    CHECK(r.chain.back().second == negate(r.seed));
  }
  auto w = enumerate_consistent(build_instance(make(Opp, Same, V::YES, V::YES)));
  REQUIRE(w.witness);
  CHECK(w.witness->symbolic == "A2p = B1p = B2 = A1 = ¬A2p");
}

TEST_CASE("swapping frames maps consistent sets onto each other") {
  for (const auto& c : all_ideal_configs()) {
    for (Arc arc : cycle_arcs()) {
      DecoherenceSchedule sched{{Pair::S, arc}};
      auto inst = build_instance(c).with_schedule(sched);
      auto swapped = build_instance(swap_frames(c)).with_schedule(swap_frames(sched));
      auto mine = enumerate_consistent(inst);
      auto theirs = enumerate_consistent(swapped);
      std::vector<Assignment> mapped;
      for (const auto& a : mine.consistent_assignments) mapped.push_back(swap_frames(a));
      std::sort(mapped.begin(), mapped.end());
      CAPTURE(describe(c));
      CAPTURE(arc_name(arc));
      CHECK(mapped == theirs.consistent_assignments);
      CHECK(mine.causal_loop == theirs.causal_loop);
    }
  }
}

TEST_CASE("ideal assignments replay to themselves from every entry point") {
  for (const auto& c : all_ideal_configs()) {
    auto inst = build_instance(c);
    for (const auto& a : enumerate_consistent(inst).consistent_assignments) {
      for (E entry : kCycle) {
        for (E e : cycle_order(entry)) {
          PairStates ps;
          if (is_measurement(e)) {
            auto st = induced_pair_state(inst, a, e);
            if (!st.intact()) ps.demolish(pair_of(e), st.provenance);
          }
          CHECK(local_rule(inst, e, a, ps) == a[e]);
        }
      }
      CHECK(satisfies_rules(inst, a));
      CHECK(decisions_follow_rules(c, a));
    }
  }
}

TEST_CASE("consistent assignments are rule-consistent") {
  for (const auto& c : all_ideal_configs()) {
    for (Arc arc : cycle_arcs()) {
      auto inst = build_instance(c).with_schedule({{Pair::Sp, arc}});
      auto rules = rule_consistent(inst);
      for (const auto& a : enumerate_consistent(inst).consistent_assignments)
        CHECK(std::find(rules.begin(), rules.end(), a) != rules.end());
    }
  }
}

TEST_CASE("between-arc decoherence on scenario #1 loops") {
  auto c = make(Same, Same, V::YES, V::YES);
  auto inst = build_instance(c).with_schedule({{Pair::S, {E::A2, E::B2}}});
  CHECK_FALSE(kept_values(inst).definable);
  auto v = loop_with_schedule(inst);
  CHECK(v.causal_loop);
  CHECK(v.consistent_assignments.empty());
  CHECK_THROWS_AS(loop_with_schedule(build_instance(c)), std::invalid_argument);
  CHECK_FALSE(enumerate_consistent(build_instance(c)).causal_loop);
}

TEST_CASE("between-arc decoherence keeps a first value that all ideal histories agree on") {
  // Scenario #1 with B first NO has a single ideal history, which fixes A2.
  auto c = make(Same, Same, V::YES, V::NO);
  auto inst = build_instance(c).with_schedule({{Pair::S, {E::A2, E::B2}}});
  auto kept = kept_values(inst);
  REQUIRE(kept.definable);
  auto ideal = enumerate_consistent(build_instance(c)).consistent_assignments;
  REQUIRE(ideal.size() == 1);
  for (const auto& [e, v] : kept.values) CHECK(ideal[0][e] == v);
}

namespace {

std::vector<DecoherenceSchedule> every_schedule() {
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

bool yes_subset(const Assignment& a, const Assignment& b) {
  for (E m : kMeasurements)
    if (a[m] == V::YES && b[m] != V::YES) return false;
  return true;
}

bool covered(const Assignment& a, const std::vector<Assignment>& base) {
  return std::any_of(base.begin(), base.end(), [&](const Assignment& b) { return yes_subset(a, b); });
}

}  // namespace

TEST_CASE("decoherence never resolves a loop") {
  for (const auto& c : all_ideal_configs()) {
    if (!enumerate_consistent(build_instance(c)).causal_loop) continue;
    for (const auto& s : every_schedule()) CHECK(enumerate_consistent(build_instance(c).with_schedule(s)).causal_loop);
  }
}

TEST_CASE("with a SAME rule, decoherence only removes YES measurements") {
  for (const auto& c : all_ideal_configs()) {
    if (c.rule_A == Opp && c.rule_B == Opp) continue;
    auto base = enumerate_consistent(build_instance(c)).consistent_assignments;
    for (const auto& s : every_schedule()) {
      CAPTURE(describe(c));
      CAPTURE(s.str());
      for (const auto& a : enumerate_consistent(build_instance(c).with_schedule(s)).consistent_assignments)
        CHECK(covered(a, base));
    }
  }
}

TEST_CASE("a demolished pair never raises a measurement value") {
  for (const auto& c : all_ideal_configs()) {
    auto inst = build_instance(c);
    for (const auto& a : rule_consistent(inst)) {
      for (E m : kMeasurements) {
        PairStates intact, broken;
        broken.demolish(pair_of(m), {Provenance::Source::Decoherence, E::A1p, cycle_arcs()[0]});
        CHECK((local_rule(inst, m, a, broken) == V::NO || local_rule(inst, m, a, intact) == V::YES));
      }
    }
  }
}

TEST_CASE("double OPPOSITE rules can gain a YES under decoherence") {
  auto c = make(Opp, Opp, V::NO, V::YES);
  auto base = enumerate_consistent(build_instance(c)).consistent_assignments;
  bool found = false;
  for (Arc arc : cycle_arcs())
    for (const auto& a : enumerate_consistent(build_instance(c).with_schedule({{Pair::S, arc}})).consistent_assignments)
      found = found || !covered(a, base);
  CHECK(found);
}
