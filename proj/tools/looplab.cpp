#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "looplab/commands.hpp"
#include "looplab/episodic.hpp"
#include "looplab/optics.hpp"

using namespace looplab;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool emit_trace = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "YAML config file; flags override it");
  app->add_option("--out", c.out, "output directory (default: $LOOPLAB_OUT_DIR, then ./looplab_out)");
  c.seed_opt = app->add_option("--seed", c.seed, "RNG seed");
  app->add_flag("--emit-trace", c.emit_trace, "also write a JSON-lines trace");
}

RunConfig base_config(const Common& c) {
  RunConfig rc = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (!c.out.empty()) rc.output_dir = c.out;
  if (c.seed_opt->count()) rc.seed = c.seed;
  if (c.emit_trace) rc.emit_trace = true;
  return rc;
}

struct ScenarioFlags {
  std::string rules, first, mode, entry;
  double p = 0.0;
  std::vector<std::string> schedule;
  int cycle_limit = 16;
  bool assert_no_loop = false;
  CLI::Option *p_opt = nullptr, *limit_opt = nullptr;
};

void apply(const ScenarioFlags& f, ScenarioOptions& s) {
  if (!f.rules.empty()) std::tie(s.config.rule_A, s.config.rule_B) = parse_rule_pair(f.rules);
  if (!f.first.empty()) std::tie(s.config.first_A, s.config.first_B) = parse_first_pair(f.first);
  std::string mode = f.mode;
  if (mode.empty() && f.p_opt && f.p_opt->count()) mode = "stochastic";
  if (mode.empty() && !f.schedule.empty()) mode = "scheduled";
  if (mode == "ideal") {
    s.config.mode = Ideal{};
  } else if (mode == "stochastic") {
    if (!f.p_opt->count() && !std::holds_alternative<Stochastic>(s.config.mode))
      throw ConfigError("stochastic mode needs --p");
    if (f.p_opt->count()) s.config.mode = Stochastic{f.p};
  } else if (mode == "scheduled") {
    Scheduled sch;
    if (f.schedule.empty()) {
      if (const auto* old = std::get_if<Scheduled>(&s.config.mode)) sch = *old;
    }
    for (const auto& e : f.schedule) sch.schedule.add(parse_schedule_entry(e));
    s.config.mode = sch;
  } else if (!mode.empty()) {
    throw ConfigError("--mode must be ideal, scheduled or stochastic");
  }
  if (!f.entry.empty()) {
    if (f.entry == "target") {
      s.entry.reset();
    } else {
      auto e = parse_event(f.entry);
      if (!e || (e == EventId::A1p || e == EventId::B1)) throw ConfigError("--entry must be a cycle event or target");
      s.entry = *e;
    }
  }
  if (f.limit_opt->count()) {
    if (f.cycle_limit < 2) throw ConfigError("--cycle-limit must be at least 2");
    s.cycle_limit = f.cycle_limit;
  }
  if (f.assert_no_loop) s.assert_no_loop = true;
}

int emit(const CommandResult& r, const RunConfig& c) {
  std::string dir = resolve_output_dir(c);
  write_artifacts(r, dir);
  std::cout << r.summary;
  std::cout << "artifacts written to " << dir << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"looplab: causal-loop protocol simulator"};
  app.require_subcommand(1);

  Common sc_common, mc_common, op_common;
  ScenarioFlags sf;
  auto* scenario = app.add_subcommand("scenario", "ephemeral table, episodic variants and verdicts");
  add_common(scenario, sc_common);
  scenario->add_option("--rules", sf.rules, "decision rules A,B: same|opposite");
  scenario->add_option("--first", sf.first, "first actions A1p,B1: yes|no");
  scenario->add_option("--mode", sf.mode, "ideal | scheduled | stochastic");
  sf.p_opt = scenario->add_option("--p", sf.p, "per-slot decoherence probability (stochastic)");
  scenario->add_option("--schedule", sf.schedule, "decoherence entries like S:A2->B2 (repeatable)");
  scenario->add_option("--entry", sf.entry, "episodic entry event, or target");
  sf.limit_opt = scenario->add_option("--cycle-limit", sf.cycle_limit, "episodic safety bound");
  scenario->add_flag("--assert-no-loop", sf.assert_no_loop, "exit 2 if a causal loop is found");

  std::string mc_rules, mc_first, mc_p;
  std::uint64_t mc_trials = 0;
  double mc_conf = 0.95;
  auto* mc = app.add_subcommand("mc", "stochastic decoherence loop-probability sweep");
  add_common(mc, mc_common);
  mc->add_option("--rules", mc_rules, "decision rules A,B");
  mc->add_option("--first", mc_first, "first actions A1p,B1 (both yes)");
  auto* mc_p_opt = mc->add_option("--p", mc_p, "comma-separated p grid");
  auto* mc_trials_opt = mc->add_option("--trials", mc_trials, "trials per p");
  auto* mc_conf_opt = mc->add_option("--confidence", mc_conf, "CI confidence level");

  DetectorGeometry gflags;
  std::string distance;
  std::uint64_t photons = 0, trials = 0, grid = 0;
  double alpha = 0.0;
  auto* optics = app.add_subcommand("optics", "interference profiles, aperture and decision calibration");
  add_common(optics, op_common);
  auto* o_wl = optics->add_option("--wavelength", gflags.wavelength, "m");
  auto* o_sep = optics->add_option("--separation", gflags.separation, "emitter separation a, m");
  auto* o_dist = optics->add_option("--distance", distance, "screen distance L in m, or auto");
  auto* o_d = optics->add_option("--d,--aperture", gflags.aperture, "detector aperture width, m");
  auto* o_phase = optics->add_option("--aux-phase", gflags.aux_phase, "rad");
  auto* o_waist = optics->add_option("--waist", gflags.waist, "beam waist, m");
  auto* o_photons = optics->add_option("--photons", photons, "photons per record");
  auto* o_trials = optics->add_option("--trials", trials, "calibration trials");
  auto* o_alpha = optics->add_option("--alpha", alpha, "decision significance level");
  auto* o_grid = optics->add_option("--grid", grid, "aperture scan points");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "regenerate an artifact from its header and compare bytes");
  replay->add_option("file", replay_path, "artifact written by a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*scenario) {
      RunConfig c = base_config(sc_common);
      apply(sf, c.scenario);
      return emit(cmd_scenario(c), c);
    }
    if (*mc) {
      RunConfig c = base_config(mc_common);
      if (!mc_rules.empty()) std::tie(c.scenario.config.rule_A, c.scenario.config.rule_B) = parse_rule_pair(mc_rules);
      if (!mc_first.empty()) std::tie(c.scenario.config.first_A, c.scenario.config.first_B) = parse_first_pair(mc_first);
      if (mc_p_opt->count()) c.mc.p = parse_double_list(mc_p);
      if (mc_trials_opt->count()) c.mc.trials = mc_trials;
      if (mc_conf_opt->count()) c.mc.confidence = mc_conf;
      return emit(cmd_mc(c), c);
    }
    if (*optics) {
      RunConfig c = base_config(op_common);
      auto& o = c.optics;
      if (o_wl->count()) o.geometry.wavelength = gflags.wavelength;
      if (o_sep->count()) o.geometry.separation = gflags.separation;
      if (o_dist->count()) {
        o.auto_distance = distance == "auto";
        if (!o.auto_distance) o.geometry.distance = parse_double_list(distance).at(0);
      }
      if (o_d->count()) {
        o.auto_aperture = false;
        o.geometry.aperture = gflags.aperture;
      }
      if (o_phase->count()) o.geometry.aux_phase = gflags.aux_phase;
      if (o_waist->count()) o.geometry.waist = gflags.waist;
      if (o_photons->count()) o.photons = photons;
      if (o_trials->count()) o.trials = trials;
      if (o_alpha->count()) o.alpha = alpha;
      if (o_grid->count()) o.grid = grid;
      return emit(cmd_optics(c), c);
    }
    if (*replay) {
      ReplayResult r = replay_file(replay_path);
      std::cout << r.command << " " << r.artifact << ": " << (r.identical ? "identical" : "MISMATCH");
      if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
      std::cout << "\n";
      return r.identical ? kExitOk : kExitAssertion;
    }
  } catch (const NonterminationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNontermination;
  } catch (const EvaluationOrderError& e) {
    std::cerr << "error: entry point cannot start evaluation: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GeometryError& e) {
    std::cerr << "error: geometry field " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
