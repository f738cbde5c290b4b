#pragma once

#include <numbers>

// Natural units with c = hbar = eps0 = 1. Lengths and light-times are in
// micrometres, angular frequencies and wavenumbers in rad/um.
namespace vacmix::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Light travels 0.299792458 um in one femtosecond.
inline constexpr double um_per_fs = 0.299792458;

constexpr double fs_to_um(double fs) { return fs * um_per_fs; }
constexpr double um_to_fs(double um) { return um / um_per_fs; }

/// Angular frequency of a vacuum wavelength.
constexpr double omega_from_lambda(double lambda_um) { return two_pi / lambda_um; }
constexpr double lambda_from_omega(double omega) { return two_pi / omega; }

/// A Gaussian field envelope exp(-t^2 / 2 tau^2) has amplitude FWHM
/// 2 sqrt(2 ln 2) tau. The 100 fs quoted for the default pulse matches
/// tau = 42.5 fs under this convention.
inline constexpr double fwhm_per_tau = 2.3548200450309493;

} // namespace vacmix::units
