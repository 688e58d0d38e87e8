#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "looplab/commands.hpp"

using namespace looplab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig scenario_config(DecisionRule a, DecisionRule b, bool emit_trace = false) {
  RunConfig c;
  c.scenario.config.rule_A = a;
  c.scenario.config.rule_B = b;
  c.emit_trace = emit_trace;
  return c;
}

RunConfig small_optics(std::uint64_t seed = 5) {
  RunConfig c;
  c.seed = seed;
  c.emit_trace = true;
  c.optics.photons = 500;
  c.optics.trials = 10;
  c.optics.grid = 8;
  c.optics.profile_points = 41;
  return c;
}

RunConfig small_mc() {
  RunConfig c;
  c.seed = 9;
  c.mc.p = {0.0, 0.1, 0.5};
  c.mc.trials = 2000;
  return c;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("looplab_cmd_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string(LOOPLAB_CLI_PATH) + " " + args;
  if (!out.empty()) cmd += " --out '" + out.string() + "'";
  cmd += " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check_identical(const CommandResult& a, const CommandResult& b) {
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].bytes == b.artifacts[i].bytes);
  }
}

}  // namespace

TEST_CASE("scenario report for the third case") {
  auto r = cmd_scenario(scenario_config(DecisionRule::Same, DecisionRule::Opposite, true));
  CHECK(r.exit_code == kExitOk);
  auto* v = r.find("verdict.json");
  REQUIRE(v);
  auto doc = json::parse(v->bytes);
  CHECK(doc["command"] == "scenario");
  CHECK(doc["seed"] == 1);
  CHECK(doc["ephemeral"]["causal_loop"] == true);
  CHECK(doc["ephemeral"]["witness"]["symbolic"] == "A2p = B1p = ¬B2 = ¬A1 = ¬A2p");
  CHECK(r.summary.find("autonomous_decoherence") != std::string::npos);

  auto* table = r.find("ephemeral_table.csv");
  REQUIRE(table);
  std::istringstream lines(table->bytes);
  std::string line;
  int comments = 0, rows = 0;
  while (std::getline(lines, line)) (line.rfind("#", 0) == 0 ? comments : rows)++;
  CHECK(rows == 17);  // column header plus 16 configurations
  CHECK(comments > 4);
  CHECK(table->bytes.rfind("# looplab scenario\n# seed: 1\n", 0) == 0);

  auto* trace = r.find("trace.jsonl");
  REQUIRE(trace);
  std::istringstream tl(trace->bytes);
  std::getline(tl, line);
  CHECK(json::parse(line)["command"] == "scenario");
  int records = 0;
  while (std::getline(tl, line)) {
    auto j = json::parse(line);
    CHECK(j.contains("variant"));
    CHECK(j.contains("event"));
    ++records;
  }
  CHECK(records > 8);
}

TEST_CASE("scenario with no loop and the assertion flag") {
  auto c = scenario_config(DecisionRule::Same, DecisionRule::Same);
  c.scenario.config.first_A = EventValue::NO;
  c.scenario.config.first_B = EventValue::NO;
  c.scenario.assert_no_loop = true;
  auto r = cmd_scenario(c);
  CHECK(r.exit_code == kExitOk);
  CHECK(json::parse(r.find("verdict.json")->bytes)["ephemeral"]["causal_loop"] == false);
  CHECK(r.find("trace.jsonl") == nullptr);

  auto loop = scenario_config(DecisionRule::Same, DecisionRule::Opposite);
  loop.scenario.assert_no_loop = true;
  CHECK(cmd_scenario(loop).exit_code == kExitAssertion);
}

TEST_CASE("episodic safety bound gives exit 3") {
  auto c = scenario_config(DecisionRule::Same, DecisionRule::Opposite);
  c.scenario.cycle_limit = 2;
  CHECK(cmd_scenario(c).exit_code == kExitNontermination);
}

TEST_CASE("mc report") {
  auto r = cmd_mc(small_mc());
  CHECK(r.exit_code == kExitOk);
  auto* csv = r.find("mc.csv");
  REQUIRE(csv);
  std::istringstream in(csv->bytes);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (line.rfind("#", 0) != 0) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("p,n_trials,loops,loop_fraction,ci_low,ci_high", 0) == 0);
  CHECK(rows[1].rfind("0,2000,0,0,", 0) == 0);

  auto missing = small_mc();
  missing.mc.p.clear();
  CHECK_THROWS_AS(cmd_mc(missing), ConfigError);
  auto zero = small_mc();
  zero.mc.trials = 0;
  CHECK_THROWS_AS(cmd_mc(zero), ConfigError);
}

TEST_CASE("optics report") {
  auto r = cmd_optics(small_optics());
  CHECK(r.exit_code == kExitOk);
  for (auto n : {"profile.csv", "aperture_scan.csv", "counts.csv", "optics_summary.json", "photons.jsonl"})
    CHECK(r.find(n) != nullptr);
  auto doc = json::parse(r.find("optics_summary.json")->bytes);
  CHECK(doc["degenerate"] == false);

  auto zero = small_optics();
  zero.optics.auto_aperture = false;
  zero.optics.geometry.aperture = 0.0;
  auto z = cmd_optics(zero);
  CHECK(json::parse(z.find("optics_summary.json")->bytes)["degenerate"] == true);

  auto bad = small_optics();
  bad.optics.auto_aperture = false;
  bad.optics.geometry.aperture = 2e-3;
  CHECK_THROWS_AS(cmd_optics(bad), GeometryError);
}

TEST_CASE("identical config and seed give identical bytes") {
  check_identical(cmd_scenario(scenario_config(DecisionRule::Opposite, DecisionRule::Opposite, true)),
                  cmd_scenario(scenario_config(DecisionRule::Opposite, DecisionRule::Opposite, true)));
  check_identical(cmd_mc(small_mc()), cmd_mc(small_mc()));
  check_identical(cmd_optics(small_optics()), cmd_optics(small_optics()));
  auto other = cmd_optics(small_optics(6));
  CHECK(other.find("counts.csv")->bytes != cmd_optics(small_optics()).find("counts.csv")->bytes);
}

TEST_CASE("provenance and replay") {
  auto dir = scratch("replay");
  auto c = small_mc();
  auto r = cmd_mc(c);
  write_artifacts(r, dir.string());
  for (const auto& a : r.artifacts) {
    CHECK(slurp(dir / a.name) == a.bytes);
    auto [command, back] = read_provenance(a.bytes);
    CHECK(command == "mc");
    CHECK(back == c);
    auto rep = replay_file((dir / a.name).string());
    CHECK(rep.identical);
    CHECK(rep.artifact == a.name);
  }
  std::string tampered = r.find("mc.csv")->bytes;
  tampered[tampered.size() - 3] ^= 1;
  std::ofstream(dir / "mc.csv", std::ios::binary) << tampered;
  auto rep = replay_file((dir / "mc.csv").string());
  CHECK_FALSE(rep.identical);
  CHECK(rep.detail.find("byte") != std::string::npos);
  CHECK_THROWS(read_provenance("no header here"));
  fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  auto dir = scratch("cli");
  CHECK(cli("scenario --rules same,opposite --first yes,yes", dir / "s3") == 0);
  CHECK(fs::exists(dir / "s3" / "verdict.json"));
  CHECK(cli("scenario --rules same,same --first no,no --assert-no-loop", dir / "s1") == 0);
  CHECK(cli("scenario --rules same,opposite --first yes,yes --assert-no-loop", dir / "s3b") == 2);
  CHECK(cli("scenario --rules same,sideways", dir / "bad") == 1);
  CHECK(cli("scenario --rules same,opposite --cycle-limit 2", dir / "nt") == 3);
  CHECK(cli("scenario --entry A1p", dir / "e") == 1);
  CHECK(cli("mc --rules same,same --first yes,yes --p 0.1 --trials 0", dir / "m") == 1);
  CHECK(cli("mc --rules same,same --first yes,yes --trials 10", dir / "m") == 1);
  CHECK(cli("mc --rules same,same --first yes,yes --p 0,0.1,0.5 --trials 500 --seed 4", dir / "m") == 0);
  CHECK(cli("optics --separation 2e-7", dir / "o") == 1);
  CHECK(cli("optics --d 2e-3 --photons 100 --trials 2", dir / "o") == 1);
  CHECK(cli("nonsense") == 1);
  CHECK(cli("scenario --no-such-flag", dir / "x") == 1);

  CHECK(cli("replay '" + (dir / "m" / "mc.csv").string() + "'") == 0);
  std::string bytes = slurp(dir / "m" / "mc.csv");
  bytes.back() = bytes.back() == '0' ? '1' : '0';
  bytes += "\n";
  std::ofstream(dir / "m" / "mc.csv", std::ios::binary) << bytes;
  CHECK(cli("replay '" + (dir / "m" / "mc.csv").string() + "'") == 2);
  CHECK(cli("replay '" + (dir / "missing.csv").string() + "'") == 1);

  SUBCASE("config file with flag override") {
    RunConfig c = scenario_config(DecisionRule::Same, DecisionRule::Same);
    std::ofstream(dir / "cfg.yaml") << to_yaml(c);
    auto cfg = (dir / "cfg.yaml").string();
    CHECK(cli("scenario --config '" + cfg + "' --rules same,opposite", dir / "ov") == 0);
    auto doc = json::parse(slurp(dir / "ov" / "verdict.json"));
    CHECK(doc["scenario"] == "(SAME,OPPOSITE,YES,YES)");
    std::ofstream(dir / "broken.yaml") << "scenario:\n  colour: red\n";
    CHECK(cli("scenario --config '" + (dir / "broken.yaml").string() + "'", dir / "br") == 1);
  }
  SUBCASE("output directory from the environment") {
    auto env_dir = dir / "from_env";
    ::setenv("LOOPLAB_OUT_DIR", env_dir.c_str(), 1);
    CHECK(cli("scenario --rules same,same --first no,no") == 0);
    ::unsetenv("LOOPLAB_OUT_DIR");
    CHECK(fs::exists(env_dir / "ephemeral_table.csv"));
  }
  fs::remove_all(dir);
}
