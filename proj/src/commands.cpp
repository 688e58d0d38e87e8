#include "looplab/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "looplab/decoherence_mc.hpp"
#include "looplab/ephemeral.hpp"
#include "looplab/episodic.hpp"
#include "looplab/optics.hpp"
#include "looplab/rng.hpp"

namespace looplab {

using json = nlohmann::ordered_json;

const Artifact* CommandResult::find(std::string_view name) const {
  for (const auto& a : artifacts)
    if (a.name == name) return &a;
  return nullptr;
}

namespace {

constexpr std::string_view kHeaderTag = "# looplab ";
constexpr std::string_view kConfigIndent = "#   ";

std::string embedded_yaml(const RunConfig& c) { return to_yaml(c, false); }

std::string csv_header(std::string_view command, const RunConfig& c) {
  std::ostringstream out;
  out << kHeaderTag << command << "\n";
  out << "# seed: " << c.seed << "\n";
  out << "# rng: " << kRngAlgorithm << "\n";
  out << "# config:\n";
  std::istringstream yaml(embedded_yaml(c));
  for (std::string line; std::getline(yaml, line);) out << kConfigIndent << line << "\n";
  return out.str();
}

json json_header(std::string_view command, const RunConfig& c) {
  json h;
  h["command"] = command;
  h["seed"] = c.seed;
  h["rng"] = kRngAlgorithm;
  h["config"] = embedded_yaml(c);
  return h;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string num(double v) { return format_double(v); }

std::string assignment_csv(const Assignment& a) {
  std::string out;
  for (EventId e : kCycle) {
    if (!out.empty()) out += ' ';
    out += std::string(name(e)) + "=" + std::string(name(a[e]));
  }
  return out;
}

json assignment_json(const Assignment& a) {
  json j = json::object();
  for (EventId e : kCycle) j[std::string(name(e))] = name(a[e]);
  return j;
}

json pairs_json(const PairStates& ps) {
  json j = json::object();
  for (Pair p : kPairs) {
    const auto& s = ps[p];
    j[std::string(name(p))] = {{"status", s.intact() ? "INTACT" : "DEMOLISHED"},
                               {"by", s.provenance.str()}};
  }
  return j;
}

json witness_json(const Witness& w) {
  json cycle = json::array();
  for (EventId e : w.cycle) cycle.push_back(name(e));
  json refs = json::array();
  for (const auto& r : w.refutations) {
    json chain = json::array();
    for (const auto& [e, v] : r.chain) chain.push_back(std::string(name(e)) + "=" + std::string(name(v)));
    refs.push_back({{"seed", name(r.seed)},
                    {"chain", chain},
                    {"conflict_at", name(r.conflict_at)},
                    {"reason", r.reason}});
  }
  return {{"cycle", cycle}, {"symbolic", w.symbolic}, {"refutations", refs}};
}

json verdict_json(const ConsistencyVerdict& v) {
  json list = json::array();
  for (const auto& a : v.consistent_assignments) list.push_back(assignment_json(a));
  json j = {{"causal_loop", v.causal_loop}, {"consistent_assignments", list}};
  j["witness"] = v.witness ? witness_json(*v.witness) : json();
  return j;
}

std::string mode_name(const Mode& m) {
  if (std::holds_alternative<Scheduled>(m)) return "scheduled";
  if (std::holds_alternative<Stochastic>(m)) return "stochastic";
  return "ideal";
}

struct VariantOutcome {
  TestAssumption assumption;
  bool admissible = true;
  bool terminated = true;
  RevisionTrace trace;
};

std::string ints(const std::vector<int>& v) {
  std::string out;
  for (int x : v) out += (out.empty() ? "" : " ") + std::to_string(x);
  return out;
}

}  // namespace

CommandResult cmd_scenario(const RunConfig& c) {
  const auto& so = c.scenario;
  ProtocolInstance inst = build_instance(so.config);
  if (const auto* st = std::get_if<Stochastic>(&so.config.mode)) {
    auto rng = make_stream(c.seed, 0);
    inst = inst.with_schedule(sample_schedule(st->p, rng));
  }
  const ConsistencyVerdict verdict = enumerate_consistent(inst);

  std::ostringstream table;
  table << csv_header("scenario", c);
  table << "rule_A,rule_B,first_A,first_B,causal_loop,n_consistent,consistent_assignments,witness\n";
  for (const auto& row : scenario_table()) {
    std::string assignments;
    for (const auto& a : row.verdict.consistent_assignments)
      assignments += (assignments.empty() ? "" : "; ") + assignment_csv(a);
    table << name(row.config.rule_A) << ',' << name(row.config.rule_B) << ','
          << name(row.config.first_A) << ',' << name(row.config.first_B) << ','
          << (row.verdict.causal_loop ? "true" : "false") << ','
          << row.verdict.consistent_assignments.size() << ",\"" << assignments << "\",\""
          << (row.verdict.witness ? row.verdict.witness->symbolic : "") << "\"\n";
  }

  EvaluateOptions opt{so.entry, so.cycle_limit};
  std::vector<VariantOutcome> variants;
  bool nonterminating = false;
  for (const auto& a : all_assumptions()) {
    VariantOutcome v{a, admissible(inst, a), true, {}};
    try {
      v.trace = evaluate(inst, a, opt);
    } catch (const NonterminationError& e) {
      v.terminated = false;
      v.trace = e.trace;
      nonterminating = true;
    }
    variants.push_back(std::move(v));
  }

  std::ostringstream episodic;
  episodic << csv_header("scenario", c);
  episodic << "assumption,class,admissible,terminated,restarts,cycle_count,cycles_per_run";
  for (EventId e : kCycle) episodic << ',' << name(e);
  episodic << '\n';
  for (const auto& v : variants) {
    episodic << v.assumption.str() << ','
             << (v.assumption.variant_class() == VariantClass::First ? "first" : "alternate") << ','
             << (v.admissible ? "true" : "false") << ',' << (v.terminated ? "true" : "false") << ','
             << v.trace.restarts << ',' << v.trace.cycle_count << ',' << ints(v.trace.cycles_per_run);
    for (EventId e : kCycle) episodic << ',' << name(v.trace.final_assignment[e]);
    episodic << '\n';
  }

  const Prediction prediction = predict(so.config);
  const bool assertion_failed = so.assert_no_loop && verdict.causal_loop;

  json doc = json_header("scenario", c);
  doc["scenario"] = describe(so.config);
  doc["mode"] = mode_name(so.config.mode);
  doc["schedule"] = inst.schedule().str();
  doc["ephemeral"] = verdict_json(verdict);
  json vs = json::array();
  for (const auto& v : variants)
    vs.push_back({{"assumption", v.assumption.str()},
                  {"admissible", v.admissible},
                  {"terminated", v.terminated},
                  {"restarts", v.trace.restarts},
                  {"cycle_count", v.trace.cycle_count},
                  {"final", assignment_json(v.trace.final_assignment)}});
  doc["episodic"] = {{"entry", so.entry ? std::string(name(*so.entry)) : "target"},
                     {"cycle_limit", so.cycle_limit},
                     {"variants", vs}};
  json outcomes = json::array();
  for (const auto& a : prediction.outcomes) outcomes.push_back(assignment_json(a));
  doc["prediction"] = {{"basis", name(prediction.basis)},
                       {"unique", prediction.unique()},
                       {"all_measurements_no", prediction.all_measurements_no()},
                       {"outcomes", outcomes}};
  doc["assertion"] = {{"assert_no_loop", so.assert_no_loop}, {"failed", assertion_failed}};

  CommandResult r;
  r.artifacts.push_back({"ephemeral_table.csv", table.str()});
  r.artifacts.push_back({"episodic_variants.csv", episodic.str()});
  r.artifacts.push_back({"verdict.json", dump(doc)});

  if (c.emit_trace) {
    std::string lines = json_header("scenario", c).dump() + "\n";
    for (const auto& v : variants) {
      for (const auto& s : v.trace.steps) {
        json step = {{"variant", v.assumption.str()},
                     {"run", s.run},
                     {"cycle", s.cycle},
                     {"kind", name(s.kind)},
                     {"event", name(s.event)},
                     {"value", name(s.value)}};
        step["pair"] = s.pair ? json(name(*s.pair)) : json();
        step["pairs"] = pairs_json(s.pairs);
        lines += step.dump() + "\n";
      }
    }
    r.artifacts.push_back({"trace.jsonl", lines});
  }

  std::ostringstream sum;
  sum << describe(so.config) << " mode=" << mode_name(so.config.mode);
  if (!inst.schedule().empty()) sum << " schedule=" << inst.schedule().str();
  sum << "\n  ephemeral: " << (verdict.causal_loop ? "CAUSAL LOOP" : "consistent") << " ("
      << verdict.consistent_assignments.size() << " assignments)";
  if (verdict.witness && !verdict.witness->symbolic.empty()) sum << "  " << verdict.witness->symbolic;
  sum << "\n  episodic prediction: " << name(prediction.basis);
  for (const auto& a : prediction.outcomes) sum << "\n    " << a.str();
  sum << "\n";
  r.summary = sum.str();

  if (nonterminating) {
    r.exit_code = kExitNontermination;
    r.summary += "  episodic evaluation exceeded the cycle limit of " + std::to_string(so.cycle_limit) + "\n";
  } else if (assertion_failed) {
    r.exit_code = kExitAssertion;
    r.summary += "  assertion failed: causal loop detected\n";
  }
  return r;
}

CommandResult cmd_mc(const RunConfig& c) {
  const auto& mc = c.mc;
  if (mc.p.empty()) throw ConfigError("mc needs at least one decoherence probability p");
  if (mc.trials == 0) throw ConfigError("mc needs trials > 0");
  const ScenarioConfig& sc = c.scenario.config;
  if (!both_first_yes(sc)) throw ConfigError("mc needs both first actions YES");

  std::ostringstream csv;
  csv << csv_header("mc", c);
  csv << "p,n_trials,loops,loop_fraction,ci_low,ci_high,exact,seed\n";
  json rows = json::array();
  bool monotone = true;
  double previous = -1.0;
  std::ostringstream sum;
  sum << describe(sc) << " trials=" << mc.trials << " seed=" << c.seed << "\n";
  for (double p : mc.p) {
    StochasticRun run = loop_probability(sc, p, mc.trials, c.seed, mc.confidence);
    double exact = schedule_space_loop_probability(sc, p);
    csv << num(p) << ',' << run.n_trials << ',' << run.loops << ',' << num(run.loop_fraction) << ','
        << num(run.ci_low) << ',' << num(run.ci_high) << ',' << num(exact) << ',' << run.seed << '\n';
    rows.push_back({{"p", p},
                    {"loops", run.loops},
                    {"loop_fraction", run.loop_fraction},
                    {"ci_low", run.ci_low},
                    {"ci_high", run.ci_high},
                    {"exact", exact}});
    if (run.loop_fraction < previous) monotone = false;
    previous = run.loop_fraction;
    sum << "  p=" << num(p) << " loop_fraction=" << num(run.loop_fraction) << " ["
        << num(run.ci_low) << ", " << num(run.ci_high) << "] exact=" << num(exact) << "\n";
  }
  json doc = json_header("mc", c);
  doc["scenario"] = describe(sc);
  doc["trials"] = mc.trials;
  doc["confidence"] = mc.confidence;
  doc["rows"] = rows;
  doc["monotone_in_listed_order"] = monotone;

  CommandResult r;
  r.artifacts.push_back({"mc.csv", csv.str()});
  r.artifacts.push_back({"mc_summary.json", dump(doc)});
  r.summary = sum.str();
  return r;
}

CommandResult cmd_optics(const RunConfig& c) {
  const auto& o = c.optics;
  DetectorGeometry g = o.geometry;
  if (o.auto_distance) g.distance = destructive_geometry(g.wavelength, g.separation);
  if (o.photons == 0) throw ConfigError("optics needs photons > 0");
  if (o.trials == 0) throw ConfigError("optics needs trials > 0");
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (o.profile_points < 2) throw ConfigError("profile_points must be at least 2");
  {
    DetectorGeometry probe = g;
    if (o.auto_aperture) probe.aperture = 0.0;
    validate(probe);
  }

  const auto ent = entangled_screen_state();
  const auto unent = unentangled_screen_state();

  std::optional<ApertureScan> scan;
  if (o.auto_aperture) {
    scan = optimize_aperture(g, o.photons, o.grid);
    g.aperture = scan->d_star;
  }
  const bool degenerate = g.aperture == 0.0;

  std::ostringstream profile;
  profile << csv_header("optics", c);
  profile << "x,entangled,unentangled\n";
  double peak = 0.0;
  const double n_steps = static_cast<double>(o.profile_points - 1);
  for (std::uint64_t i = 0; i < o.profile_points; ++i) {
    double x = g.separation * (-2.0 + 4.0 * static_cast<double>(i) / n_steps);
    double ie = intensity_profile(ent, g, x);
    double iu = intensity_profile(unent, g, x);
    peak = std::max(peak, ie);
    profile << num(x) << ',' << num(ie) << ',' << num(iu) << '\n';
  }

  const auto pe = detection_probability(ent, g);
  const auto pu = detection_probability(unent, g);

  std::vector<Outcome> photons_e, photons_u;
  const std::uint64_t seed_e = make_stream(c.seed, 0)();
  const std::uint64_t seed_u = make_stream(c.seed, 1)();
  auto* trace_e = c.emit_trace ? &photons_e : nullptr;
  auto* trace_u = c.emit_trace ? &photons_u : nullptr;
  const CountRecord rec_e = monte_carlo_counts(pe, o.photons, seed_e, trace_e);
  const CountRecord rec_u = monte_carlo_counts(pu, o.photons, seed_u, trace_u);
  const auto dec_e = decide_entanglement(rec_e, pe.combined(), pu.combined(), o.alpha);
  const auto dec_u = decide_entanglement(rec_u, pe.combined(), pu.combined(), o.alpha);
  const Calibration cal = calibrate_decision(g, o.photons, o.trials, o.alpha, make_stream(c.seed, 2)());

  std::ostringstream counts;
  counts << csv_header("optics", c);
  counts << "source,det1,det2,missed,total,seed,verdict,p_value,log_likelihood_ratio\n";
  auto count_row = [&](const char* source, const CountRecord& rec, const EntanglementDecision& d) {
    counts << source << ',' << rec.det1 << ',' << rec.det2 << ',' << rec.total - rec.combined() << ','
           << rec.total << ',' << rec.seed << ',' << name(d.verdict) << ',' << num(d.p_value) << ','
           << num(d.log_likelihood_ratio) << '\n';
  };
  count_row("entangled", rec_e, dec_e);
  count_row("unentangled", rec_u, dec_u);

  CommandResult r;
  r.artifacts.push_back({"profile.csv", profile.str()});
  if (scan) {
    std::ostringstream s;
    s << csv_header("optics", c);
    s << "d,statistic\n";
    for (std::size_t j = 0; j < scan->d.size(); ++j) s << num(scan->d[j]) << ',' << num(scan->statistic[j]) << '\n';
    r.artifacts.push_back({"aperture_scan.csv", s.str()});
  }
  r.artifacts.push_back({"counts.csv", counts.str()});

  const double residual = std::abs(path_excess(g.distance, g.separation) - g.wavelength / 2);
  json doc = json_header("optics", c);
  doc["geometry"] = {{"wavelength", g.wavelength}, {"separation", g.separation},
                     {"distance", g.distance},     {"aperture", g.aperture},
                     {"aux_phase", g.aux_phase},   {"waist", g.waist}};
  doc["warnings"] = regime_warnings(g);
  doc["degenerate"] = degenerate;
  doc["path_residual"] = residual;
  doc["entangled_at_positions"] = {intensity_profile(ent, g, detector_position(1, g)) / peak,
                                   intensity_profile(ent, g, detector_position(2, g)) / peak};
  doc["visibility"] = {{"entangled", fringe_visibility(ent, g)},
                       {"unentangled", fringe_visibility(unent, g)}};
  doc["detection"] = {{"entangled", {pe.p1, pe.p2}}, {"unentangled", {pu.p1, pu.p2}}};
  if (scan)
    doc["aperture"] = {{"d_star", scan->d_star},
                       {"statistic", scan->statistic_star},
                       {"expected_total_llr", scan->expected_total_llr}};
  doc["decisions"] = {{"entangled", name(dec_e.verdict)}, {"unentangled", name(dec_u.verdict)}};
  doc["calibration"] = {{"trials", cal.trials},       {"photons", o.photons},
                        {"alpha", o.alpha},           {"type1", cal.type1},
                        {"type2", cal.type2},         {"combined", cal.combined()}};
  r.artifacts.push_back({"optics_summary.json", dump(doc)});

  if (c.emit_trace) {
    std::string lines = json_header("optics", c).dump() + "\n";
    auto emit = [&](const char* source, const std::vector<Outcome>& outs) {
      for (std::size_t i = 0; i < outs.size(); ++i)
        lines += json{{"source", source}, {"index", i}, {"outcome", name(outs[i])}}.dump() + "\n";
    };
    emit("entangled", photons_e);
    emit("unentangled", photons_u);
    r.artifacts.push_back({"photons.jsonl", lines});
  }

  std::ostringstream sum;
  sum << "L=" << num(g.distance) << " m  d=" << num(g.aperture) << " m"
      << (degenerate ? "  (degenerate aperture)" : "") << "\n";
  for (const auto& w : regime_warnings(g)) sum << "  warning: " << w << "\n";
  sum << "  detection entangled=" << num(pe.combined()) << " unentangled=" << num(pu.combined()) << "\n";
  sum << "  calibration type1=" << num(cal.type1) << " type2=" << num(cal.type2)
      << " combined=" << num(cal.combined()) << "\n";
  r.summary = sum.str();
  return r;
}

CommandResult run_command(std::string_view command, const RunConfig& c) {
  if (command == "scenario") return cmd_scenario(c);
  if (command == "mc") return cmd_mc(c);
  if (command == "optics") return cmd_optics(c);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

void write_artifacts(const CommandResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : r.artifacts) {
    std::ofstream out(std::filesystem::path(dir) / a.name, std::ios::binary);
    out << a.bytes;
    if (!out) throw std::runtime_error("cannot write " + a.name + " in " + dir);
  }
}

std::pair<std::string, RunConfig> read_provenance(const std::string& bytes) {
  if (bytes.rfind(kHeaderTag, 0) == 0) {
    std::istringstream in(bytes);
    std::string line;
    std::getline(in, line);
    std::string command = line.substr(kHeaderTag.size());
    std::string yaml;
    bool in_config = false;
    while (std::getline(in, line)) {
      if (line == "# config:") {
        in_config = true;
      } else if (in_config && line.rfind(kConfigIndent, 0) == 0) {
        yaml += line.substr(kConfigIndent.size()) + "\n";
      } else if (in_config) {
        break;
      }
    }
    if (!in_config) throw ConfigError("artifact header has no embedded config");
    return {command, parse_config(yaml)};
  }
  json doc = json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) doc = json::parse(bytes.substr(0, bytes.find('\n')), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("command") || !doc.contains("config"))
    throw ConfigError("not a looplab artifact: no embedded config header");
  return {doc["command"].get<std::string>(), parse_config(doc["config"].get<std::string>())};
}

ReplayResult replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  auto [command, config] = read_provenance(bytes);
  ReplayResult out;
  out.command = command;
  out.artifact = std::filesystem::path(path).filename().string();
  CommandResult again = run_command(command, config);
  const Artifact* match = again.find(out.artifact);
  if (!match) {
    out.detail = "regenerated bundle has no artifact named " + out.artifact;
    return out;
  }
  out.identical = match->bytes == bytes;
  if (!out.identical) {
    std::size_t i = 0;
    while (i < bytes.size() && i < match->bytes.size() && bytes[i] == match->bytes[i]) ++i;
    out.detail = "first difference at byte " + std::to_string(i);
  }
  return out;
}

}  // namespace looplab
