#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vacmix/errors.hpp"
#include "vacmix/units.hpp"

namespace vacmix {

/// One Lorentz resonance of the medium.
struct Resonance {
  double omega_res; ///< resonance frequency, rad/um
  double g;         ///< plasma frequency, g^2 = (density) * (dipole charge)^2

  /// Builds a resonance from a Sellmeier pair B * lambda^2 / (lambda^2 - lambda_i^2).
  static Resonance from_sellmeier(double B, double lambda_um) {
    const double omega = units::omega_from_lambda(lambda_um);
    return {omega, std::sqrt(B) * omega};
  }

  double sellmeier_B() const { return (g * g) / (omega_res * omega_res); }
  double sellmeier_lambda_um() const { return units::lambda_from_omega(omega_res); }

  bool operator==(const Resonance &) const = default;
};

/// Frequencies closer than this to a resonance are treated as poles.
inline constexpr double kPoleTolerance = 1e-9;

/// Static, lossless dispersive medium with Sellmeier dispersion.
/// Resonances are kept strictly ascending in frequency.
class MediumSpec {
public:
  MediumSpec(std::string name, std::vector<Resonance> resonances)
      : name_(std::move(name)), resonances_(std::move(resonances)) {
    if (resonances_.empty())
      throw std::invalid_argument("medium '" + name_ + "' has no resonances");
    for (std::size_t i = 0; i < resonances_.size(); ++i) {
      const auto &r = resonances_[i];
      if (!(r.omega_res > 0.0) || !(r.g >= 0.0) || !std::isfinite(r.omega_res) ||
          !std::isfinite(r.g))
        throw std::invalid_argument("medium '" + name_ + "': resonance " + std::to_string(i) +
                                    " needs omega_res > 0 and g >= 0");
      if (i > 0 && !(r.omega_res > resonances_[i - 1].omega_res))
        throw std::invalid_argument("medium '" + name_ +
                                    "': resonances must be strictly ascending in omega_res");
    }
  }

  /// Sorts the given resonances by frequency before validating.
  static MediumSpec sorted(std::string name, std::vector<Resonance> resonances) {
    std::sort(resonances.begin(), resonances.end(),
              [](const Resonance &a, const Resonance &b) { return a.omega_res < b.omega_res; });
    return MediumSpec(std::move(name), std::move(resonances));
  }

  const std::string &name() const noexcept { return name_; }
  std::span<const Resonance> resonances() const noexcept { return resonances_; }
  std::size_t size() const noexcept { return resonances_.size(); }
  const Resonance &operator[](std::size_t i) const { return resonances_.at(i); }

  /// Number of polariton branches the dispersion relation supports.
  std::size_t branch_count() const noexcept { return resonances_.size() + 1; }

  bool operator==(const MediumSpec &) const = default;

private:
  std::string name_;
  std::vector<Resonance> resonances_;
};

/// Three-term fused-silica Sellmeier table (Malitson), ascending in frequency:
/// index 0 is the infrared resonance, index 1 the first ultraviolet one.
inline MediumSpec fused_silica() {
  return MediumSpec::sorted("fused-silica", {
                                                Resonance::from_sellmeier(0.6961663, 0.0684043),
                                                Resonance::from_sellmeier(0.4079426, 0.1162414),
                                                Resonance::from_sellmeier(0.8974794, 9.896161),
                                            });
}

namespace detail {

inline void check_off_pole(const MediumSpec &medium, double omega) {
  for (std::size_t i = 0; i < medium.size(); ++i) {
    if (std::abs(std::abs(omega) - medium[i].omega_res) < kPoleTolerance) {
      std::ostringstream msg;
      msg << "omega = " << omega << " sits on resonance " << i << " (Omega = "
          << medium[i].omega_res << ")";
      throw PoleAtResonance(msg.str());
    }
  }
}

} // namespace detail

/// n^2(omega) = 1 - sum_i g_i^2 / (omega^2 - Omega_i^2). Negative inside
/// stop bands.
inline double n_squared(const MediumSpec &medium, double omega) {
  detail::check_off_pole(medium, omega);
  double n2 = 1.0;
  for (const auto &r : medium.resonances())
    n2 -= r.g * r.g / (omega * omega - r.omega_res * r.omega_res);
  return n2;
}

inline double refractive_index(const MediumSpec &medium, double omega) {
  const double n2 = n_squared(medium, omega);
  if (n2 < 0.0)
    throw NumericError("refractive index is imaginary at omega = " + std::to_string(omega));
  return std::sqrt(n2);
}

/// D(k, omega) = -k^2 + omega^2 n^2(omega); vanishes on polariton shells.
inline double dispersion_D(const MediumSpec &medium, double k, double omega) {
  return -k * k + omega * omega * n_squared(medium, omega);
}

/// Permittivity shift from modulating resonance frequencies by
/// Omega_i^2 -> Omega_i^2 (1 + eps_i):
///   delta_eps(omega) = sum_i g_i^2 Omega_i^2 eps_i / (omega^2 - Omega_i^2)^2.
inline double delta_epsilon(const MediumSpec &medium, double omega, std::span<const double> eps) {
  if (eps.size() != medium.size())
    throw std::invalid_argument("delta_epsilon: need one amplitude per resonance");
  detail::check_off_pole(medium, omega);
  double de = 0.0;
  for (std::size_t i = 0; i < medium.size(); ++i) {
    const double O2 = medium[i].omega_res * medium[i].omega_res;
    const double d = omega * omega - O2;
    de += medium[i].g * medium[i].g * O2 * eps[i] / (d * d);
  }
  return de;
}

/// delta_eps contributed by resonance m per unit eps_m.
inline double delta_epsilon_per_eps(const MediumSpec &medium, std::size_t m, double omega) {
  detail::check_off_pole(medium, omega);
  const double O2 = medium[m].omega_res * medium[m].omega_res;
  const double d = omega * omega - O2;
  return medium[m].g * medium[m].g * O2 / (d * d);
}

/// Index shift delta_n = -delta_eps / (2 n).
inline double delta_n(const MediumSpec &medium, double omega, std::span<const double> eps) {
  return -delta_epsilon(medium, omega, eps) / (2.0 * refractive_index(medium, omega));
}

/// Modulation amplitude of resonance m that produces the signed index shift
/// `target_delta_n` at vacuum wavelength `lambda_um`.
inline double eps_for_delta_n(const MediumSpec &medium, std::size_t m, double lambda_um,
                              double target_delta_n) {
  const double omega = units::omega_from_lambda(lambda_um);
  const double n = refractive_index(medium, omega);
  const double per_eps = delta_epsilon_per_eps(medium, m, omega);
  if (per_eps == 0.0)
    throw NumericError("resonance " + std::to_string(m) + " is uncoupled (g = 0)");
  return -2.0 * n * target_delta_n / per_eps;
}

} // namespace vacmix
