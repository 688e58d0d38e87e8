#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <limits>

#include "looplab/optics.hpp"
#include "looplab/rng.hpp"

namespace looplab {

std::string_view name(Outcome o) {
  switch (o) {
    case Outcome::Det1: return "det1";
    case Outcome::Det2: return "det2";
    case Outcome::Missed: return "missed";
  }
  return "?";
}

std::string_view name(Verdict v) {
  switch (v) {
    case Verdict::Present: return "PRESENT";
    case Verdict::Absent: return "ABSENT";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

CountRecord monte_carlo_counts(const DetectionProbability& probs, std::uint64_t n_photons,
                               std::uint64_t seed, std::vector<Outcome>* per_photon) {
  if (n_photons == 0) throw std::invalid_argument("n_photons must be at least 1");
  CountRecord rec;
  rec.total = n_photons;
  rec.seed = seed;
  if (per_photon) per_photon->clear();
  const double c1 = probs.p1;
  const double c12 = probs.p1 + probs.p2;
  for (std::uint64_t chunk = 0; chunk * kPhotonChunk < n_photons; ++chunk) {
    auto rng = make_stream(seed, chunk);
    std::uint64_t end = std::min(n_photons, (chunk + 1) * kPhotonChunk);
    for (std::uint64_t i = chunk * kPhotonChunk; i < end; ++i) {
      double u = unit_uniform(rng);
      Outcome o = u < c1 ? Outcome::Det1 : u < c12 ? Outcome::Det2 : Outcome::Missed;
      rec.det1 += o == Outcome::Det1;
      rec.det2 += o == Outcome::Det2;
      if (per_photon) per_photon->push_back(o);
    }
  }
  return rec;
}

CountRecord monte_carlo_counts(const TwoPhotonState& state, const DetectorGeometry& g,
                               std::uint64_t n_photons, std::uint64_t seed,
                               std::vector<Outcome>* per_photon) {
  return monte_carlo_counts(detection_probability(state, g), n_photons, seed, per_photon);
}

namespace {

double xlogy_diff(double k, double a, double b) {
  if (k == 0.0) return 0.0;
  return k * (std::log(a) - std::log(b));
}

}  // namespace

EntanglementDecision decide_entanglement(const CountRecord& record, double rate_entangled,
                                         double rate_unentangled, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (record.combined() > record.total) throw std::invalid_argument("counts exceed total photons");
  EntanglementDecision out;
  out.rate_entangled = rate_entangled;
  out.rate_unentangled = rate_unentangled;
  const double scale = std::max(rate_entangled, rate_unentangled);
  if (std::abs(rate_entangled - rate_unentangled) <=
      64.0 * std::numeric_limits<double>::epsilon() * scale) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  const double k = static_cast<double>(record.combined());
  const double n = static_cast<double>(record.total);
  out.log_likelihood_ratio = xlogy_diff(k, rate_entangled, rate_unentangled) +
                             xlogy_diff(n - k, 1.0 - rate_entangled, 1.0 - rate_unentangled);
  boost::math::binomial_distribution<double> null_law(n, rate_unentangled);
  if (rate_entangled < rate_unentangled)
    out.p_value = boost::math::cdf(null_law, k);
  else
    out.p_value = k == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(null_law, k - 1.0));
  out.verdict = out.p_value < alpha ? Verdict::Present : Verdict::Absent;
  return out;
}

EntanglementDecision decide_entanglement(const CountRecord& record, const DetectorGeometry& g,
                                         double alpha) {
  double re = detection_probability(entangled_screen_state(), g).combined();
  double ru = detection_probability(unentangled_screen_state(), g).combined();
  return decide_entanglement(record, re, ru, alpha);
}

double separation_statistic(const DetectionProbability& e, const DetectionProbability& u) {
  const double pe[3] = {e.p1, e.p2, 1.0 - e.p1 - e.p2};
  const double pu[3] = {u.p1, u.p2, 1.0 - u.p1 - u.p2};
  double j = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (pe[i] == pu[i]) continue;
    if (pe[i] <= 0.0 || pu[i] <= 0.0) return INFINITY;
    j += (pe[i] - pu[i]) * (std::log(pe[i]) - std::log(pu[i]));
  }
  return 0.5 * j;
}

ApertureScan optimize_aperture(const DetectorGeometry& g, std::uint64_t n_photons, std::size_t grid) {
  if (grid < 3) throw std::invalid_argument("aperture grid needs at least 3 points");
  DetectorGeometry probe = g;
  probe.aperture = 0.0;
  validate(probe);
  const auto ent = entangled_screen_state();
  const auto unent = unentangled_screen_state();
  const double fe = screen_flux(ent, probe);
  const double fu = screen_flux(unent, probe);
  ApertureScan scan;
  for (std::size_t j = 1; j <= grid; ++j) {
    probe.aperture = g.separation * static_cast<double>(j) / static_cast<double>(grid + 1);
    double s = separation_statistic(detection_probability(ent, probe, fe),
                                    detection_probability(unent, probe, fu));
    scan.d.push_back(probe.aperture);
    scan.statistic.push_back(s);
    if (s > scan.statistic[scan.best]) scan.best = scan.d.size() - 1;
  }
  scan.d_star = scan.d[scan.best];
  scan.statistic_star = scan.statistic[scan.best];
  scan.expected_total_llr = static_cast<double>(n_photons) * scan.statistic_star;
  return scan;
}

Calibration calibrate_decision(const DetectorGeometry& g, std::uint64_t n_photons,
                               std::uint64_t n_trials, double alpha, std::uint64_t seed) {
  if (n_trials == 0) throw std::invalid_argument("n_trials must be positive");
  const auto pe = detection_probability(entangled_screen_state(), g);
  const auto pu = detection_probability(unentangled_screen_state(), g);
  Calibration cal;
  cal.trials = n_trials;
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    std::uint64_t seed_e = make_stream(seed, 2 * t)();
    std::uint64_t seed_u = make_stream(seed, 2 * t + 1)();
    auto de = decide_entanglement(monte_carlo_counts(pe, n_photons, seed_e), pe.combined(),
                                  pu.combined(), alpha);
    auto du = decide_entanglement(monte_carlo_counts(pu, n_photons, seed_u), pe.combined(),
                                  pu.combined(), alpha);
    cal.missed_present += de.verdict != Verdict::Present;
    cal.false_present += du.verdict == Verdict::Present;
  }
  cal.type1 = static_cast<double>(cal.false_present) / static_cast<double>(n_trials);
  cal.type2 = static_cast<double>(cal.missed_present) / static_cast<double>(n_trials);
  return cal;
}

}  // namespace looplab
