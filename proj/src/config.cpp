#include "looplab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace looplab {

ConfigParseError::ConfigParseError(int line, int column, const std::string& what)
    : ConfigError(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                 ": " + what
                           : what),
      line_(line),
      column_(column) {}

bool operator==(const DetectorGeometry& a, const DetectorGeometry& b) {
  return a.wavelength == b.wavelength && a.separation == b.separation && a.distance == b.distance &&
         a.aperture == b.aperture && a.aux_phase == b.aux_phase && a.waist == b.waist;
}

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  auto m = n.Mark();
  throw ConfigParseError(m.line + 1, m.column + 1, msg);
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& section) {
  if (!map.IsMap()) fail(map, section + " must be a mapping");
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, key + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(n, key + " has the wrong type");
  }
}

std::vector<std::string> string_list(const YAML::Node& n, const std::string& key) {
  std::vector<std::string> out;
  if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(scalar<std::string>(item, key));
  } else {
    std::stringstream ss(scalar<std::string>(n, key));
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(part);
  }
  return out;
}

template <class F>
auto wrap(const YAML::Node& n, F&& f) {
  try {
    return f();
  } catch (const ConfigParseError&) {
    throw;
  } catch (const ConfigError& e) {
    fail(n, e.what());
  }
}

void parse_scenario(const YAML::Node& n, ScenarioOptions& out) {
  check_keys(n, {"rules", "first", "mode", "p", "schedule", "entry", "cycle_limit", "assert_no_loop"},
             "scenario");
  auto& c = out.config;
  if (auto r = n["rules"]) {
    auto parts = string_list(r, "rules");
    if (parts.size() != 2) fail(r, "rules needs two values (rule_A, rule_B)");
    std::tie(c.rule_A, c.rule_B) = wrap(r, [&] { return parse_rule_pair(parts[0] + "," + parts[1]); });
  }
  if (auto f = n["first"]) {
    auto parts = string_list(f, "first");
    if (parts.size() != 2) fail(f, "first needs two values (A1p, B1)");
    std::tie(c.first_A, c.first_B) = wrap(f, [&] { return parse_first_pair(parts[0] + "," + parts[1]); });
  }
  std::string mode = n["mode"] ? scalar<std::string>(n["mode"], "mode") : "ideal";
  if (mode == "ideal") {
    c.mode = Ideal{};
  } else if (mode == "scheduled") {
    Scheduled s;
    if (auto sch = n["schedule"]) {
      if (!sch.IsSequence()) fail(sch, "schedule must be a list of PAIR:FROM->TO entries");
      for (const auto& item : sch)
        wrap(item, [&] {
          s.schedule.add(parse_schedule_entry(scalar<std::string>(item, "schedule")));
          return 0;
        });
    }
    c.mode = s;
  } else if (mode == "stochastic") {
    if (!n["p"]) fail(n, "stochastic mode needs p");
    double p = scalar<double>(n["p"], "p");
    if (!(p >= 0.0 && p <= 1.0)) fail(n["p"], "p must lie in [0,1]");
    c.mode = Stochastic{p};
  } else {
    fail(n["mode"], "mode must be ideal, scheduled or stochastic");
  }
  if (n["p"] && mode != "stochastic") fail(n["p"], "p is only valid in stochastic mode");
  if (n["schedule"] && mode != "scheduled") fail(n["schedule"], "schedule is only valid in scheduled mode");
  if (auto e = n["entry"]) {
    auto s = scalar<std::string>(e, "entry");
    if (s == "target") {
      out.entry.reset();
    } else {
      auto ev = parse_event(s);
      if (!ev || *ev == EventId::A1p || *ev == EventId::B1)
        fail(e, "entry must be a cycle event or 'target'");
      out.entry = *ev;
    }
  }
  if (auto l = n["cycle_limit"]) {
    out.cycle_limit = scalar<int>(l, "cycle_limit");
    if (out.cycle_limit < 2) fail(l, "cycle_limit must be at least 2");
  }
  if (auto a = n["assert_no_loop"]) out.assert_no_loop = scalar<bool>(a, "assert_no_loop");
}

void parse_mc(const YAML::Node& n, McOptions& out) {
  check_keys(n, {"p", "trials", "confidence"}, "mc");
  if (auto p = n["p"]) {
    out.p.clear();
    if (p.IsSequence()) {
      for (const auto& item : p) out.p.push_back(scalar<double>(item, "p"));
    } else {
      out.p.push_back(scalar<double>(p, "p"));
    }
    for (double v : out.p)
      if (!(v >= 0.0 && v <= 1.0)) fail(p, "p values must lie in [0,1]");
  }
  if (auto t = n["trials"]) out.trials = scalar<std::uint64_t>(t, "trials");
  if (auto c = n["confidence"]) {
    out.confidence = scalar<double>(c, "confidence");
    if (!(out.confidence > 0.0 && out.confidence < 1.0)) fail(c, "confidence must lie in (0,1)");
  }
}

void parse_optics(const YAML::Node& n, OpticsOptions& out) {
  check_keys(n, {"wavelength", "separation", "distance", "aperture", "aux_phase", "waist", "photons",
                 "trials", "alpha", "grid", "profile_points"},
             "optics");
  auto& g = out.geometry;
  if (auto v = n["wavelength"]) g.wavelength = scalar<double>(v, "wavelength");
  if (auto v = n["separation"]) g.separation = scalar<double>(v, "separation");
  if (auto v = n["distance"]) {
    out.auto_distance = v.IsScalar() && v.Scalar() == "auto";
    if (!out.auto_distance) g.distance = scalar<double>(v, "distance");
  }
  if (auto v = n["aperture"]) {
    out.auto_aperture = v.IsScalar() && v.Scalar() == "auto";
    if (!out.auto_aperture) g.aperture = scalar<double>(v, "aperture");
  }
  if (auto v = n["aux_phase"]) g.aux_phase = scalar<double>(v, "aux_phase");
  if (auto v = n["waist"]) g.waist = scalar<double>(v, "waist");
  if (auto v = n["photons"]) out.photons = scalar<std::uint64_t>(v, "photons");
  if (auto v = n["trials"]) out.trials = scalar<std::uint64_t>(v, "trials");
  if (auto v = n["alpha"]) out.alpha = scalar<double>(v, "alpha");
  if (auto v = n["grid"]) out.grid = scalar<std::uint64_t>(v, "grid");
  if (auto v = n["profile_points"]) out.profile_points = scalar<std::uint64_t>(v, "profile_points");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  RunConfig c;
  if (root.IsNull()) return c;
  check_keys(root, {"seed", "output_dir", "emit_trace", "scenario", "mc", "optics"}, "config");
  if (auto v = root["seed"]) c.seed = scalar<std::uint64_t>(v, "seed");
  if (auto v = root["output_dir"]) c.output_dir = scalar<std::string>(v, "output_dir");
  if (auto v = root["emit_trace"]) c.emit_trace = scalar<bool>(v, "emit_trace");
  if (auto v = root["scenario"]) parse_scenario(v, c.scenario);
  if (auto v = root["mc"]) parse_mc(v, c.mc);
  if (auto v = root["optics"]) parse_optics(v, c.optics);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(0, 0, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const RunConfig& c, bool with_output_dir) {
  YAML::Emitter out;
  auto num = [](double v) { return format_double(v); };
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  if (with_output_dir) out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  out << YAML::Key << "emit_trace" << YAML::Value << c.emit_trace;

  const auto& sc = c.scenario;
  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rules" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << std::string(name(sc.config.rule_A)) << std::string(name(sc.config.rule_B)) << YAML::EndSeq;
  out << YAML::Key << "first" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << std::string(name(sc.config.first_A)) << std::string(name(sc.config.first_B)) << YAML::EndSeq;
  if (const auto* s = std::get_if<Scheduled>(&sc.config.mode)) {
    out << YAML::Key << "mode" << YAML::Value << "scheduled";
    out << YAML::Key << "schedule" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& e : s->schedule.entries()) out << schedule_entry_str(e);
    out << YAML::EndSeq;
  } else if (const auto* st = std::get_if<Stochastic>(&sc.config.mode)) {
    out << YAML::Key << "mode" << YAML::Value << "stochastic";
    out << YAML::Key << "p" << YAML::Value << num(st->p);
  } else {
    out << YAML::Key << "mode" << YAML::Value << "ideal";
  }
  out << YAML::Key << "entry" << YAML::Value
      << (sc.entry ? std::string(name(*sc.entry)) : std::string("target"));
  out << YAML::Key << "cycle_limit" << YAML::Value << sc.cycle_limit;
  out << YAML::Key << "assert_no_loop" << YAML::Value << sc.assert_no_loop;
  out << YAML::EndMap;

  out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "p" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double p : c.mc.p) out << num(p);
  out << YAML::EndSeq;
  out << YAML::Key << "trials" << YAML::Value << c.mc.trials;
  out << YAML::Key << "confidence" << YAML::Value << num(c.mc.confidence);
  out << YAML::EndMap;

  const auto& o = c.optics;
  out << YAML::Key << "optics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "wavelength" << YAML::Value << num(o.geometry.wavelength);
  out << YAML::Key << "separation" << YAML::Value << num(o.geometry.separation);
  out << YAML::Key << "distance" << YAML::Value
      << (o.auto_distance ? std::string("auto") : num(o.geometry.distance));
  out << YAML::Key << "aperture" << YAML::Value
      << (o.auto_aperture ? std::string("auto") : num(o.geometry.aperture));
  out << YAML::Key << "aux_phase" << YAML::Value << num(o.geometry.aux_phase);
  out << YAML::Key << "waist" << YAML::Value << num(o.geometry.waist);
  out << YAML::Key << "photons" << YAML::Value << o.photons;
  out << YAML::Key << "trials" << YAML::Value << o.trials;
  out << YAML::Key << "alpha" << YAML::Value << num(o.alpha);
  out << YAML::Key << "grid" << YAML::Value << o.grid;
  out << YAML::Key << "profile_points" << YAML::Value << o.profile_points;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::pair<DecisionRule, DecisionRule> parse_rule_pair(const std::string& s) {
  auto cut = s.find(',');
  if (cut == std::string::npos) throw ConfigError("rules must be two values like same,opposite: '" + s + "'");
  auto a = parse_rule(s.substr(0, cut));
  auto b = parse_rule(s.substr(cut + 1));
  if (!a || !b) throw ConfigError("rules must be same or opposite: '" + s + "'");
  return {*a, *b};
}

std::pair<EventValue, EventValue> parse_first_pair(const std::string& s) {
  auto cut = s.find(',');
  if (cut == std::string::npos) throw ConfigError("first actions must be two values like yes,no: '" + s + "'");
  auto a = parse_value(s.substr(0, cut));
  auto b = parse_value(s.substr(cut + 1));
  if (!a || !b) throw ConfigError("first actions must be yes or no: '" + s + "'");
  return {*a, *b};
}

ScheduleEntry parse_schedule_entry(const std::string& s) {
  auto cut = s.find(':');
  if (cut == std::string::npos) throw ConfigError("schedule entry must look like S:A2->B2, got '" + s + "'");
  auto pair = parse_pair(s.substr(0, cut));
  auto arc = parse_arc(s.substr(cut + 1));
  if (!pair) throw ConfigError("unknown pair in schedule entry '" + s + "'");
  if (!arc) throw ConfigError("unknown arc in schedule entry '" + s + "'");
  if (!on_cycle(*arc)) throw ConfigError("decoherence arc " + arc_name(*arc) + " is not on the measurement cycle");
  return {*pair, *arc};
}

std::string schedule_entry_str(const ScheduleEntry& e) {
  return std::string(name(e.pair)) + ":" + arc_name(e.arc);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    double v = 0.0;
    auto first = part.data();
    auto last = part.data() + part.size();
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr != last) throw ConfigError("not a number: '" + part + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::string resolve_output_dir(const RunConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("LOOPLAB_OUT_DIR"); env && *env) return env;
  return "looplab_out";
}

}  // namespace looplab
