#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacmix/medium.hpp"
#include "vacmix/units.hpp"

namespace vacmix {

/// Two-tone Gaussian-windowed modulation of one resonance frequency:
///   Omega_m^2(t) = Omega_m^2 [1 + f(t)],
///   f(t) = eps (cos nu1 t + cos nu2 t) exp(-t^2 / 2 tau^2).
/// Every other resonance is left static.
struct ModulationSpec {
  double eps = 0.0;
  std::size_t target_m = 0;
  double nu1 = 1.0; ///< rad/um
  double nu2 = 1.0; ///< rad/um
  double tau = 1.0; ///< field-envelope width, um of light-time

  /// Amplitude applied to resonance i.
  double eps_of(std::size_t i) const { return i == target_m ? eps : 0.0; }

  std::vector<double> eps_vector(std::size_t n_resonances) const {
    std::vector<double> v(n_resonances, 0.0);
    v.at(target_m) = eps;
    return v;
  }

  /// The four signed tones {+nu1, -nu1, +nu2, -nu2} of the spectrum.
  std::array<double, 4> tones() const { return {nu1, -nu1, nu2, -nu2}; }

  /// Non-fatal problems: large amplitude or too short a window for the
  /// large-tau treatment.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (std::abs(eps) > 0.3)
      w.push_back("|eps| = " + std::to_string(std::abs(eps)) + " exceeds 0.3; not perturbative");
    if (tau * std::min(nu1, nu2) < 10.0)
      w.push_back("tau * min(nu) = " + std::to_string(tau * std::min(nu1, nu2)) +
                  " < 10; large-tau formulas are unreliable");
    return w;
  }

  void validate(const MediumSpec &medium) const {
    if (!(nu1 > 0.0) || !(nu2 > 0.0))
      throw std::invalid_argument("modulation frequencies must be > 0");
    if (!(tau > 0.0))
      throw std::invalid_argument("modulation window tau must be > 0");
    if (target_m >= medium.size())
      throw std::invalid_argument("target resonance " + std::to_string(target_m) +
                                  " does not exist");
  }

  bool operator==(const ModulationSpec &) const = default;
};

/// f(t) for the modulated resonance.
inline double f_time(const ModulationSpec &spec, double t) {
  return spec.eps * (std::cos(spec.nu1 * t) + std::cos(spec.nu2 * t)) *
         std::exp(-t * t / (2.0 * spec.tau * spec.tau));
}

/// Fourier transform of the homogeneous modulation divided by the
/// quantization volume:
///   f~(0, omega) / V = eps tau sqrt(pi/2) sum_{a = +-nu1, +-nu2} exp(-tau^2 (omega - a)^2 / 2).
inline double f_spectrum_per_volume(const ModulationSpec &spec, double omega) {
  double s = 0.0;
  for (double a : spec.tones()) {
    const double d = spec.tau * (omega - a);
    s += std::exp(-0.5 * d * d);
  }
  return spec.eps * spec.tau * std::sqrt(units::pi / 2.0) * s;
}

/// Frequency windows, `half_width_sigmas` / tau wide on each side, that hold the
/// support of f~ at every tone.
inline std::vector<std::pair<double, double>>
spectral_support(const ModulationSpec &spec, double half_width_sigmas = 8.0) {
  std::vector<std::pair<double, double>> w;
  const double h = half_width_sigmas / spec.tau;
  for (double a : spec.tones())
    w.emplace_back(a - h, a + h);
  return w;
}

} // namespace vacmix
