#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "looplab/commands.hpp"
#include "looplab/decoherence_mc.hpp"
#include "looplab/ephemeral.hpp"
#include "looplab/episodic.hpp"
#include "looplab/optics.hpp"

namespace py = pybind11;
using namespace looplab;

namespace {

ScenarioConfig make_config(const std::string& rules, const std::string& first, double p,
                           const std::vector<std::string>& schedule) {
  ScenarioConfig c;
  std::tie(c.rule_A, c.rule_B) = parse_rule_pair(rules);
  std::tie(c.first_A, c.first_B) = parse_first_pair(first);
  if (p >= 0.0) {
    c.mode = Stochastic{p};
  } else if (!schedule.empty()) {
    Scheduled s;
    for (const auto& e : schedule) s.schedule.add(parse_schedule_entry(e));
    c.mode = s;
  }
  return c;
}

py::dict assignment_dict(const Assignment& a) {
  py::dict d;
  for (EventId e : kCycle) d[py::str(std::string(name(e)))] = std::string(name(a[e]));
  return d;
}

py::list assignments(const std::vector<Assignment>& v) {
  py::list out;
  for (const auto& a : v) out.append(assignment_dict(a));
  return out;
}

DetectorGeometry geometry(double wavelength, double separation, double distance, double aperture,
                          double aux_phase, double waist) {
  DetectorGeometry g{wavelength, separation, distance, aperture, aux_phase, waist};
  if (g.distance <= 0.0) g.distance = destructive_geometry(wavelength, separation);
  return g;
}

TwoPhotonState state_named(const std::string& s) {
  if (s == "entangled") return entangled_screen_state();
  if (s == "unentangled") return unentangled_screen_state();
  throw std::invalid_argument("state must be 'entangled' or 'unentangled'");
}

}  // namespace

PYBIND11_MODULE(_looplab, m) {
  m.doc() = "Causal-loop protocol engines, decoherence Monte Carlo and interference optics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonterminationError>(m, "NonterminationError", PyExc_RuntimeError);

  m.def(
      "enumerate_consistent",
      [](const std::string& rules, const std::string& first, const std::vector<std::string>& schedule) {
        auto v = enumerate_consistent(build_instance(make_config(rules, first, -1.0, schedule)));
        py::dict d;
        d["causal_loop"] = v.causal_loop;
        d["assignments"] = assignments(v.consistent_assignments);
        d["witness"] = v.witness ? py::object(py::str(v.witness->symbolic)) : py::object(py::none());
        return d;
      },
      py::arg("rules"), py::arg("first"), py::arg("schedule") = std::vector<std::string>{});

  m.def("scenario_table", [] {
    py::list rows;
    for (const auto& r : scenario_table()) {
      py::dict d;
      d["config"] = describe(r.config);
      d["causal_loop"] = r.verdict.causal_loop;
      d["n_consistent"] = r.verdict.consistent_assignments.size();
      rows.append(d);
    }
    return rows;
  });

  m.def(
      "run_variants",
      [](const std::string& rules, const std::string& first, int cycle_limit) {
        py::list rows;
        EvaluateOptions opt;
        opt.cycle_limit = cycle_limit;
        for (const auto& r : run_all_variants(build_instance(make_config(rules, first, -1.0, {})), opt)) {
          py::dict d;
          d["assumption"] = r.assumption.str();
          d["admissible"] = r.admissible;
          d["restarts"] = r.trace.restarts;
          d["cycle_count"] = r.trace.cycle_count;
          d["final"] = assignment_dict(r.trace.final_assignment);
          rows.append(d);
        }
        return rows;
      },
      py::arg("rules"), py::arg("first"), py::arg("cycle_limit") = 16);

  m.def(
      "predict",
      [](const std::string& rules, const std::string& first, double p) {
        auto pr = predict(make_config(rules, first, p, {}));
        py::dict d;
        d["basis"] = std::string(name(pr.basis));
        d["outcomes"] = assignments(pr.outcomes);
        return d;
      },
      py::arg("rules"), py::arg("first"), py::arg("p") = -1.0);

  m.def(
      "loop_probability",
      [](const std::string& rules, const std::string& first, double p, std::uint64_t n_trials,
         std::uint64_t seed) {
        auto r = loop_probability(make_config(rules, first, -1.0, {}), p, n_trials, seed);
        py::dict d;
        d["loops"] = r.loops;
        d["loop_fraction"] = r.loop_fraction;
        d["ci"] = py::make_tuple(r.ci_low, r.ci_high);
        d["exact"] = schedule_space_loop_probability(r.config, p);
        return d;
      },
      py::arg("rules"), py::arg("first"), py::arg("p"), py::arg("n_trials"), py::arg("seed") = 1);

  m.def("repeated_cycle_survival", &repeated_cycle_survival, py::arg("p"), py::arg("n_cycles"),
        py::arg("slots") = kSlots);

  m.def("destructive_geometry", &destructive_geometry, py::arg("wavelength"), py::arg("separation"));

  m.def(
      "intensity",
      [](const std::string& state, const std::vector<double>& xs, double wavelength, double separation,
         double distance, double waist) {
        auto g = geometry(wavelength, separation, distance, 0.0, 0.0, waist);
        auto s = state_named(state);
        std::vector<double> out;
        for (double x : xs) out.push_back(intensity_profile(s, g, x));
        return out;
      },
      py::arg("state"), py::arg("xs"), py::arg("wavelength") = 700e-9, py::arg("separation") = 1e-3,
      py::arg("distance") = 0.0, py::arg("waist") = 5e-6);

  m.def(
      "detection_probability",
      [](const std::string& state, double aperture, double wavelength, double separation,
         double distance, double waist) {
        auto p = detection_probability(state_named(state),
                                       geometry(wavelength, separation, distance, aperture, 0.0, waist));
        return py::make_tuple(p.p1, p.p2);
      },
      py::arg("state"), py::arg("aperture"), py::arg("wavelength") = 700e-9,
      py::arg("separation") = 1e-3, py::arg("distance") = 0.0, py::arg("waist") = 5e-6);

  m.def(
      "fringe_visibility",
      [](const std::string& state, double wavelength, double separation, double distance, double waist) {
        return fringe_visibility(state_named(state), geometry(wavelength, separation, distance, 0.0, 0.0, waist));
      },
      py::arg("state"), py::arg("wavelength") = 700e-9, py::arg("separation") = 1e-3,
      py::arg("distance") = 0.0, py::arg("waist") = 5e-6);

  m.def(
      "run",
      [](const std::string& command, const std::string& config_yaml) {
        auto r = run_command(command, parse_config(config_yaml));
        py::dict files;
        for (const auto& a : r.artifacts) files[py::str(a.name)] = py::bytes(a.bytes);
        return py::make_tuple(r.exit_code, files);
      },
      py::arg("command"), py::arg("config_yaml") = "",
      "Run a CLI command in-process; returns (exit_code, {artifact name: bytes}).");
}
