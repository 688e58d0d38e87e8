#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab {

enum class Pol : std::uint8_t { v, h };
enum class Photon : std::uint8_t { L, S };
enum class Path : std::uint8_t { None, One, Two };

using Amplitudes = std::array<std::complex<double>, 12>;

constexpr std::size_t basis_index(Pol l, Pol s, Path path) {
  return (static_cast<std::size_t>(l) * 2 + static_cast<std::size_t>(s)) * 3 +
         static_cast<std::size_t>(path);
}

class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Component {
  double weight = 1.0;
  Amplitudes amp{};
};

// |pol>_L (x) |pol>_S (x) |path>, pure or a classical mixture of pure states.
// The path register belongs to the routed photon, if any.
class TwoPhotonState {
 public:
  static TwoPhotonState pure(const Amplitudes& amp, std::optional<Photon> routed = std::nullopt);
  static TwoPhotonState mixture(std::vector<Component> parts,
                                std::optional<Photon> routed = std::nullopt);

  const std::vector<Component>& components() const { return parts_; }
  std::optional<Photon> routed() const { return routed_; }
  bool is_pure() const { return parts_.size() == 1; }
  const Amplitudes& amplitudes() const;  // pure states only
  std::complex<double> amplitude(Pol l, Pol s, Path path) const { return amplitudes()[basis_index(l, s, path)]; }
  double norm() const;  // pure: sqrt(sum |a|^2); mixture: sum of weights

 private:
  std::vector<Component> parts_;
  std::optional<Photon> routed_;
};

double squared_norm(const Amplitudes& a);

TwoPhotonState bell_psi_plus();
TwoPhotonState birefringent_split(const TwoPhotonState& state, Photon which);
TwoPhotonState half_wave_plate(const TwoPhotonState& state, int path);
// Polarization measurement on `measured`; leaves a mixture over its outcomes.
TwoPhotonState measure_polarization(const TwoPhotonState& state, Photon measured);

TwoPhotonState entangled_screen_state();
TwoPhotonState unentangled_screen_state();  // path unknown
TwoPhotonState known_path_state(int path);

}  // namespace looplab
