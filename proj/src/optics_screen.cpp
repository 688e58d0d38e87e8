#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <complex>

#include "looplab/optics.hpp"

namespace looplab {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kTailWidths = 12.0;
// Absolute quadrature error allowed per metre of screen, in units of the profile peak.
constexpr double kToleranceDensity = 1e-9;

double gaussian(double x, double center, double w) {
  double t = (x - center) / w;
  return std::exp(-t * t);
}

// Path-unknown mixture profile before normalization.
double mixture_profile(const DetectorGeometry& g, double w, double x) {
  double a1 = gaussian(x, -g.separation / 2, w);
  double a2 = gaussian(x, g.separation / 2, w);
  return 0.5 * (a1 * a1 + a2 * a2);
}

double peak_scale(const DetectorGeometry& g, double w) {
  if (g.separation <= w) return 1.0 / mixture_profile(g, w, 0.0);
  auto neg = [&](double x) { return -mixture_profile(g, w, x); };
  auto best = boost::math::tools::brent_find_minima(neg, 0.0, g.separation, 52);
  return 1.0 / std::max(-best.second, mixture_profile(g, w, 0.0));
}

double unscaled_intensity(const TwoPhotonState& state, const DetectorGeometry& g, double w, double x) {
  if (!state.routed()) throw StateError("intensity needs a routed photon");
  const double a = g.separation;
  const double k = 2.0 * kPi / g.wavelength;
  const double r1 = std::hypot(g.distance, x + a / 2);
  const double r2 = std::hypot(g.distance, x - a / 2);
  const double delta = k * (-2.0 * a * x / (r1 + r2)) + g.aux_phase;
  const std::complex<double> phase = std::polar(1.0, delta);
  const double e1 = gaussian(x, -a / 2, w);
  const double e2 = gaussian(x, a / 2, w);
  double total = 0.0;
  for (const auto& c : state.components()) {
    double sum = 0.0;
    for (Pol l : {Pol::v, Pol::h}) {
      for (Pol s : {Pol::v, Pol::h}) {
        auto field = c.amp[basis_index(l, s, Path::One)] * e1 +
                     c.amp[basis_index(l, s, Path::Two)] * e2 * phase;
        sum += std::norm(field);
      }
    }
    total += c.weight * sum;
  }
  return total;
}

double fringe_period(const DetectorGeometry& g) {
  return g.wavelength * g.distance / g.separation;
}

double quadrature_piece(const DetectorGeometry& g) {
  return std::min(fringe_period(g), envelope_width(g)) / 4.0;
}

double flux_with(const TwoPhotonState& state, const DetectorGeometry& g) {
  const double w = envelope_width(g);
  const double reach = g.separation / 2 + kTailWidths * w;
  const double scale = peak_scale(g, w);
  return integrate([&](double x) { return scale * unscaled_intensity(state, g, w, x); }, -reach,
                   reach, quadrature_piece(g));
}

DetectionProbability capture(const TwoPhotonState& state, const DetectorGeometry& g, double flux) {
  if (g.aperture == 0.0) return {0.0, 0.0, true};
  const double w = envelope_width(g);
  const double scale = peak_scale(g, w);
  auto f = [&](double x) { return scale * unscaled_intensity(state, g, w, x); };
  DetectionProbability out;
  double c1 = detector_position(1, g);
  double c2 = detector_position(2, g);
  double h = g.aperture / 2;
  out.p1 = integrate(f, c1 - h, c1 + h, quadrature_piece(g)) / flux;
  out.p2 = integrate(f, c2 - h, c2 + h, quadrature_piece(g)) / flux;
  return out;
}

double contrast(const std::function<double(double)>& f, double half_width) {
  constexpr int n = 4096;
  const double step = 2.0 * half_width / n;
  int imax = 0, imin = 0;
  double vmax = -INFINITY, vmin = INFINITY;
  for (int i = 0; i <= n; ++i) {
    double v = f(-half_width + i * step);
    if (v > vmax) vmax = v, imax = i;
    if (v < vmin) vmin = v, imin = i;
  }
  auto refine = [&](int i, double sign) {
    double lo = -half_width + std::max(0, i - 1) * step;
    double hi = -half_width + std::min(n, i + 1) * step;
    auto r = boost::math::tools::brent_find_minima([&](double x) { return sign * f(x); }, lo, hi, 52);
    return sign * r.second;
  };
  vmax = std::max(vmax, refine(imax, -1.0));
  vmin = std::min(vmin, refine(imin, 1.0));
  return (vmax - vmin) / (vmax + vmin);
}

}  // namespace

void validate(const DetectorGeometry& g) {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw GeometryError(field, "must be a positive length");
  };
  positive(g.wavelength, "wavelength");
  positive(g.separation, "separation");
  positive(g.distance, "distance");
  positive(g.waist, "waist");
  if (!(g.aperture >= 0.0) || !std::isfinite(g.aperture))
    throw GeometryError("aperture", "must be nonnegative");
  if (g.aperture >= g.separation) throw GeometryError("aperture", "must be smaller than the separation");
  if (!std::isfinite(g.aux_phase)) throw GeometryError("aux_phase", "must be finite");
}

std::vector<std::string> regime_warnings(const DetectorGeometry& g) {
  std::vector<std::string> out;
  if (g.separation < 10.0 * g.wavelength) out.push_back("separation is not much larger than the wavelength");
  if (g.distance < 10.0 * g.separation) out.push_back("distance is not much larger than the separation");
  return out;
}

double destructive_geometry(double wavelength, double separation) {
  if (!(wavelength > 0.0)) throw GeometryError("wavelength", "must be a positive length");
  if (!(separation > wavelength / 2))
    throw GeometryError("separation", "must exceed half a wavelength for a destructive geometry");
  return separation * separation / wavelength - wavelength / 4;
}

double path_excess(double distance, double separation) {
  return separation * separation / (std::hypot(distance, separation) + distance);
}

double detector_position(int i, const DetectorGeometry& g) {
  if (i == 1) return -g.separation / 2;
  if (i == 2) return g.separation / 2;
  throw std::invalid_argument("detector index must be 1 or 2");
}

double envelope_width(const DetectorGeometry& g) {
  const double zr = kPi * g.waist * g.waist / g.wavelength;
  return g.waist * std::sqrt(1.0 + (g.distance / zr) * (g.distance / zr));
}

double intensity_profile(const TwoPhotonState& state, const DetectorGeometry& g, double x) {
  const double w = envelope_width(g);
  return peak_scale(g, w) * unscaled_intensity(state, g, w, x);
}

namespace {

// Bisects until the Gauss-Kronrod error estimate meets an absolute tolerance.
double adaptive_piece(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || depth == 0) return v;
  double m = 0.5 * (a + b);
  return adaptive_piece(f, a, m, tol / 2, depth - 1) + adaptive_piece(f, m, b, tol / 2, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double piece) {
  if (hi <= lo) return 0.0;
  const auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / piece));
  const double h = (hi - lo) / static_cast<double>(pieces);
  double total = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    double a = lo + static_cast<double>(i) * h;
    double b = i + 1 == pieces ? hi : a + h;
    total += adaptive_piece(f, a, b, kToleranceDensity * (b - a), 12);
  }
  return total;
}

double screen_flux(const TwoPhotonState& state, const DetectorGeometry& g) {
  validate(g);
  return flux_with(state, g);
}

DetectionProbability detection_probability(const TwoPhotonState& state, const DetectorGeometry& g) {
  validate(g);
  if (g.aperture == 0.0) return {0.0, 0.0, true};
  return capture(state, g, flux_with(state, g));
}

double fringe_visibility(const TwoPhotonState& state, const DetectorGeometry& g) {
  validate(g);
  const double w = envelope_width(g);
  return contrast(
      [&](double x) { return unscaled_intensity(state, g, w, x) / mixture_profile(g, w, x); },
      fringe_period(g));
}

double raw_visibility(const TwoPhotonState& state, const DetectorGeometry& g) {
  validate(g);
  const double w = envelope_width(g);
  return contrast([&](double x) { return unscaled_intensity(state, g, w, x); }, fringe_period(g));
}

DetectionProbability detection_probability(const TwoPhotonState& state, const DetectorGeometry& g,
                                           double flux) {
  validate(g);
  if (!(flux > 0.0)) throw std::invalid_argument("screen flux must be positive");
  return capture(state, g, flux);
}

}  // namespace looplab
