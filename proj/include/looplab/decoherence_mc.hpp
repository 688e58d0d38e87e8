#pragma once

#include <cstdint>
#include <vector>

#include "looplab/ephemeral.hpp"
#include "looplab/protocol.hpp"
#include "looplab/rng.hpp"

namespace looplab {

inline constexpr std::uint64_t kArcsPerPair = 6;
inline constexpr std::uint64_t kSlots = 12;  // 6 cycle arcs x 2 pairs

// Draws all 12 slots; keeps the earliest hit per pair in cycle order from entry.
DecoherenceSchedule sample_schedule(double p, std::mt19937_64& rng, EventId entry = EventId::A2p);

struct StochasticTrial {
  DecoherenceSchedule schedule;
  bool causal_loop = false;
};

struct StochasticRun {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  double p = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t loops = 0;
  double loop_fraction = 0.0;
  double ci_low = 0.0;  // Clopper-Pearson
  double ci_high = 0.0;
  double confidence = 0.95;
  std::vector<StochasticTrial> trials;  // filled when requested
};

StochasticRun loop_probability(const ScenarioConfig& config, double p, std::uint64_t n_trials,
                               std::uint64_t seed, double confidence = 0.95,
                               bool keep_trials = false);

// Exact loop probability: sum over the 49 earliest-arc schedules weighted by
// their sampling probability.
double schedule_space_loop_probability(const ScenarioConfig& config, double p,
                                       EventId entry = EventId::A2p);

double repeated_cycle_survival(double p, std::uint64_t n_cycles, std::uint64_t slots = kSlots);

struct SurvivalEstimate {
  std::uint64_t n_trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double sigma = 0.0;  // binomial standard error at the closed-form value
};

SurvivalEstimate simulate_cycle_survival(double p, std::uint64_t n_cycles, std::uint64_t slots,
                                         std::uint64_t n_trials, std::uint64_t seed);

}  // namespace looplab
