#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "looplab/optics_state.hpp"

namespace looplab {

class GeometryError : public std::invalid_argument {
 public:
  GeometryError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// SI units throughout. Emitter/detector i sits at x = -a/2 (i=1), +a/2 (i=2).
struct DetectorGeometry {
  double wavelength = 700e-9;
  double separation = 1e-3;
  double distance = 0.0;
  double aperture = 0.0;
  double aux_phase = 0.0;
  double waist = 5e-6;
};

void validate(const DetectorGeometry& g);  // throws GeometryError naming the field
std::vector<std::string> regime_warnings(const DetectorGeometry& g);

double destructive_geometry(double wavelength, double separation);
// sqrt(L^2 + a^2) - L without cancellation.
double path_excess(double distance, double separation);
double detector_position(int i, const DetectorGeometry& g);
double envelope_width(const DetectorGeometry& g);  // beam radius at the screen

double intensity_profile(const TwoPhotonState& state, const DetectorGeometry& g, double x);

// Adaptive Gauss-Kronrod over [lo, hi] cut into pieces no longer than `piece`.
double integrate(const std::function<double(double)>& f, double lo, double hi, double piece);

double screen_flux(const TwoPhotonState& state, const DetectorGeometry& g);

struct DetectionProbability {
  double p1 = 0.0;
  double p2 = 0.0;
  bool degenerate = false;  // d == 0
  double combined() const { return p1 + p2; }
};

DetectionProbability detection_probability(const TwoPhotonState& state, const DetectorGeometry& g);
// Same, reusing a screen_flux computed for this state and geometry.
DetectionProbability detection_probability(const TwoPhotonState& state, const DetectorGeometry& g,
                                           double flux);

// Fringe contrast of I/U near the screen center, U being the path-unknown
// profile; raw_visibility skips the envelope normalization.
double fringe_visibility(const TwoPhotonState& state, const DetectorGeometry& g);
double raw_visibility(const TwoPhotonState& state, const DetectorGeometry& g);

enum class Outcome : std::uint8_t { Det1, Det2, Missed };
std::string_view name(Outcome o);

struct CountRecord {
  std::uint64_t det1 = 0;
  std::uint64_t det2 = 0;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;
  std::uint64_t combined() const { return det1 + det2; }
  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

inline constexpr std::uint64_t kPhotonChunk = 4096;

CountRecord monte_carlo_counts(const DetectionProbability& probs, std::uint64_t n_photons,
                               std::uint64_t seed, std::vector<Outcome>* per_photon = nullptr);
CountRecord monte_carlo_counts(const TwoPhotonState& state, const DetectorGeometry& g,
                               std::uint64_t n_photons, std::uint64_t seed,
                               std::vector<Outcome>* per_photon = nullptr);

enum class Verdict : std::uint8_t { Present, Absent, Inconclusive };
std::string_view name(Verdict v);

struct EntanglementDecision {
  Verdict verdict = Verdict::Inconclusive;
  double p_value = 1.0;
  double log_likelihood_ratio = 0.0;  // log L(entangled) - log L(unentangled)
  double rate_entangled = 0.0;
  double rate_unentangled = 0.0;
};

// Null hypothesis: unentangled rate. One-sided toward the entangled rate.
EntanglementDecision decide_entanglement(const CountRecord& record, double rate_entangled,
                                         double rate_unentangled, double alpha);
EntanglementDecision decide_entanglement(const CountRecord& record, const DetectorGeometry& g,
                                         double alpha);

// Half the J-divergence between the outcome laws {det1, det2, missed}.
double separation_statistic(const DetectionProbability& entangled,
                            const DetectionProbability& unentangled);

struct ApertureScan {
  std::vector<double> d;
  std::vector<double> statistic;
  std::size_t best = 0;
  double d_star = 0.0;
  double statistic_star = 0.0;
  double expected_total_llr = 0.0;  // n_photons * statistic_star
};

ApertureScan optimize_aperture(const DetectorGeometry& g, std::uint64_t n_photons,
                               std::size_t grid = 64);

struct Calibration {
  std::uint64_t trials = 0;
  std::uint64_t false_present = 0;  // unentangled records judged PRESENT
  std::uint64_t missed_present = 0;  // entangled records not judged PRESENT
  double type1 = 0.0;
  double type2 = 0.0;
  double combined() const { return type1 + type2; }
};

Calibration calibrate_decision(const DetectorGeometry& g, std::uint64_t n_photons,
                               std::uint64_t n_trials, double alpha, std::uint64_t seed);

}  // namespace looplab
