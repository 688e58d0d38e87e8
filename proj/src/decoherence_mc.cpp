#include "looplab/decoherence_mc.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <stdexcept>

namespace looplab {

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
}

int arc_index(const std::optional<Arc>& a, EventId entry) {
  if (!a) return 0;
  auto arcs = cycle_arcs(entry);
  for (int i = 0; i < 6; ++i)
    if (arcs[i] == *a) return i + 1;
  return 0;
}

}  // namespace

DecoherenceSchedule sample_schedule(double p, std::mt19937_64& rng, EventId entry) {
  check_p(p);
  DecoherenceSchedule s;
  for (Pair pair : kPairs) {
    bool taken = false;
    for (const Arc& arc : cycle_arcs(entry)) {
      bool hit = unit_uniform(rng) < p;
      if (hit && !taken) {
        s.add({pair, arc});
        taken = true;
      }
    }
  }
  return s;
}

StochasticRun loop_probability(const ScenarioConfig& config, double p, std::uint64_t n_trials,
                               std::uint64_t seed, double confidence, bool keep_trials) {
  check_p(p);
  if (n_trials == 0) throw std::invalid_argument("n_trials must be positive");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0,1)");
  if (!both_first_yes(config))
    throw ConfigError("loop_probability needs both first actions YES, got " + describe(config));
  const ProtocolInstance base = build_instance(config).ideal();

  StochasticRun run;
  run.config = config;
  run.seed = seed;
  run.p = p;
  run.n_trials = n_trials;
  run.confidence = confidence;
  std::array<signed char, 49> memo;
  memo.fill(-1);
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    auto rng = make_stream(seed, t);
    DecoherenceSchedule s = sample_schedule(p, rng);
    int key = arc_index(s.for_pair(Pair::S), EventId::A2p) * 7 +
              arc_index(s.for_pair(Pair::Sp), EventId::A2p);
    if (memo[key] < 0) memo[key] = enumerate_consistent(base.with_schedule(s)).causal_loop ? 1 : 0;
    bool loop = memo[key] == 1;
    run.loops += loop;
    if (keep_trials) run.trials.push_back({s, loop});
  }
  run.loop_fraction = static_cast<double>(run.loops) / static_cast<double>(n_trials);
  double tail = (1.0 - confidence) / 2.0;
  using boost::math::binomial_distribution;
  run.ci_low = binomial_distribution<double>::find_lower_bound_on_p(
      static_cast<double>(n_trials), static_cast<double>(run.loops), tail);
  run.ci_high = binomial_distribution<double>::find_upper_bound_on_p(
      static_cast<double>(n_trials), static_cast<double>(run.loops), tail);
  return run;
}

double schedule_space_loop_probability(const ScenarioConfig& config, double p, EventId entry) {
  check_p(p);
  const ProtocolInstance base = build_instance(config).ideal();
  auto arcs = cycle_arcs(entry);
  std::vector<std::pair<std::optional<Arc>, double>> options;
  options.push_back({std::nullopt, std::pow(1.0 - p, 6)});
  for (int i = 0; i < 6; ++i) options.push_back({arcs[i], std::pow(1.0 - p, i) * p});
  double total = 0.0;
  for (const auto& [sa, ws] : options) {
    for (const auto& [spa, wsp] : options) {
      DecoherenceSchedule s;
      if (sa) s.add({Pair::S, *sa});
      if (spa) s.add({Pair::Sp, *spa});
      if (enumerate_consistent(base.with_schedule(s)).causal_loop) total += ws * wsp;
    }
  }
  return total;
}

double repeated_cycle_survival(double p, std::uint64_t n_cycles, std::uint64_t slots) {
  check_p(p);
  if (p == 0.0 || n_cycles == 0 || slots == 0) return 0.0;
  double draws = static_cast<double>(n_cycles) * static_cast<double>(slots);
  return -std::expm1(draws * std::log1p(-p));
}

SurvivalEstimate simulate_cycle_survival(double p, std::uint64_t n_cycles, std::uint64_t slots,
                                         std::uint64_t n_trials, std::uint64_t seed) {
  check_p(p);
  if (n_trials == 0) throw std::invalid_argument("n_trials must be positive");
  SurvivalEstimate out;
  out.n_trials = n_trials;
  const double draws = static_cast<double>(n_cycles) * static_cast<double>(slots);
  const double log_q = std::log1p(-p);
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    auto rng = make_stream(seed, t);
    // Index of the first decoherence among the draws, by inversion of the geometric law.
    double u = 1.0 - unit_uniform(rng);
    double first = p == 0.0 ? INFINITY : std::floor(std::log(u) / log_q);
    if (p == 1.0) first = 0.0;
    out.hits += first < draws;
  }
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(n_trials);
  double q = repeated_cycle_survival(p, n_cycles, slots);
  out.sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(n_trials));
  return out;
}

}  // namespace looplab
