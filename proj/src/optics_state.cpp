#include "looplab/optics_state.hpp"

#include <cmath>

namespace looplab {

namespace {

constexpr double kNormTol = 1e-9;

Pol flip(Pol p) { return p == Pol::v ? Pol::h : Pol::v; }

Path path_from_int(int path) {
  if (path == 1) return Path::One;
  if (path == 2) return Path::Two;
  throw StateError("path must be 1 or 2, got " + std::to_string(path));
}

}  // namespace

double squared_norm(const Amplitudes& a) {
  double s = 0.0;
  for (const auto& c : a) s += std::norm(c);
  return s;
}

TwoPhotonState TwoPhotonState::pure(const Amplitudes& amp, std::optional<Photon> routed) {
  return mixture({{1.0, amp}}, routed);
}

TwoPhotonState TwoPhotonState::mixture(std::vector<Component> parts, std::optional<Photon> routed) {
  if (parts.empty()) throw StateError("empty mixture");
  double total = 0.0;
  for (const auto& c : parts) {
    if (!(c.weight >= 0.0)) throw StateError("mixture weights must be nonnegative");
    if (std::abs(squared_norm(c.amp) - 1.0) > kNormTol) throw StateError("component is not normalized");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kNormTol) throw StateError("mixture weights must sum to 1");
  TwoPhotonState s;
  s.parts_ = std::move(parts);
  s.routed_ = routed;
  return s;
}

const Amplitudes& TwoPhotonState::amplitudes() const {
  if (!is_pure()) throw StateError("amplitudes requested from a mixed state");
  return parts_.front().amp;
}

double TwoPhotonState::norm() const {
  if (is_pure()) return std::sqrt(squared_norm(parts_.front().amp));
  double w = 0.0;
  for (const auto& c : parts_) w += c.weight;
  return w;
}

TwoPhotonState bell_psi_plus() {
  Amplitudes a{};
  const double r = 1.0 / std::sqrt(2.0);
  a[basis_index(Pol::v, Pol::h, Path::None)] = r;
  a[basis_index(Pol::h, Pol::v, Path::None)] = r;
  return TwoPhotonState::pure(a);
}

TwoPhotonState birefringent_split(const TwoPhotonState& state, Photon which) {
  if (state.routed()) throw StateError("photon already routed");
  std::vector<Component> out;
  for (const auto& c : state.components()) {
    Amplitudes n{};
    for (Pol l : {Pol::v, Pol::h}) {
      for (Pol s : {Pol::v, Pol::h}) {
        for (Path p : {Path::One, Path::Two})
          if (c.amp[basis_index(l, s, p)] != 0.0) throw StateError("photon already routed");
        Pol own = which == Photon::L ? l : s;
        Path to = own == Pol::h ? Path::One : Path::Two;
        n[basis_index(l, s, to)] = c.amp[basis_index(l, s, Path::None)];
      }
    }
    out.push_back({c.weight, n});
  }
  return TwoPhotonState::mixture(std::move(out), which);
}

TwoPhotonState half_wave_plate(const TwoPhotonState& state, int path) {
  Path target = path_from_int(path);
  if (!state.routed()) throw StateError("half-wave plate needs a routed photon");
  // Relabels both polarizations on the target path.
  std::vector<Component> out;
  for (const auto& c : state.components()) {
    Amplitudes n = c.amp;
    for (Pol l : {Pol::v, Pol::h})
      for (Pol s : {Pol::v, Pol::h})
        n[basis_index(flip(l), flip(s), target)] = c.amp[basis_index(l, s, target)];
    out.push_back({c.weight, n});
  }
  return TwoPhotonState::mixture(std::move(out), state.routed());
}

TwoPhotonState measure_polarization(const TwoPhotonState& state, Photon measured) {
  std::vector<Component> out;
  for (const auto& c : state.components()) {
    for (Pol outcome : {Pol::v, Pol::h}) {
      Amplitudes n{};
      for (Pol l : {Pol::v, Pol::h})
        for (Pol s : {Pol::v, Pol::h})
          if ((measured == Photon::L ? l : s) == outcome)
            for (Path p : {Path::None, Path::One, Path::Two})
              n[basis_index(l, s, p)] = c.amp[basis_index(l, s, p)];
      double prob = squared_norm(n);
      if (prob <= 0.0) continue;
      for (auto& a : n) a /= std::sqrt(prob);
      out.push_back({c.weight * prob, n});
    }
  }
  return TwoPhotonState::mixture(std::move(out), state.routed());
}

TwoPhotonState entangled_screen_state() {
  return half_wave_plate(birefringent_split(bell_psi_plus(), Photon::L), 1);
}

TwoPhotonState unentangled_screen_state() {
  auto collapsed = measure_polarization(bell_psi_plus(), Photon::S);
  return half_wave_plate(birefringent_split(collapsed, Photon::L), 1);
}

TwoPhotonState known_path_state(int path) {
  Amplitudes a{};
  a[basis_index(Pol::v, Pol::h, path_from_int(path))] = 1.0;
  return TwoPhotonState::pure(a, Photon::L);
}

}  // namespace looplab
