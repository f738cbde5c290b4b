#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "vacmix/branches.hpp"
#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/modulation.hpp"
#include "vacmix/quadrature.hpp"

namespace vacmix {

/// Zeroth-order oscillator propagator 1 / (omega^2 - Omega_i^2). The
/// 2 pi delta(omega + omega') that accompanies it is left to callers.
inline double delta0(const MediumSpec &medium, std::size_t i, double omega) {
  const double O = medium[i].omega_res;
  if (std::abs(std::abs(omega) - O) < kPoleTolerance) {
    std::ostringstream msg;
    msg << "delta0: omega = " << omega << " on resonance " << i;
    throw PoleAtResonance(msg.str());
  }
  return 1.0 / (omega * omega - O * O);
}

/// First-order propagator per unit volume:
///   Omega_i^2 F_i(omega + omega') / ((omega^2 - Omega_i^2)(omega'^2 - Omega_i^2)),
/// with F_i = f~_i / V.
inline double delta1_reduced(const MediumSpec &medium, const ModulationSpec &spec, std::size_t i,
                             double omega, double omega_p) {
  const double e = spec.eps_of(i);
  const double d = delta0(medium, i, omega) * delta0(medium, i, omega_p);
  if (e == 0.0)
    return 0.0;
  const double O2 = medium[i].omega_res * medium[i].omega_res;
  ModulationSpec s = spec;
  s.eps = e;
  return O2 * f_spectrum_per_volume(s, omega + omega_p) * d;
}

/// Quadrature controls for the second-order propagator.
struct Delta2Options {
  double rel_tol = 1e-8;
  double half_width_sigmas = 8.0;
};

/// Second-order propagator per unit volume squared:
///   Omega_i^4 / ((omega^2 - Omega_i^2)(omega'^2 - Omega_i^2))
///     * int domega''/2pi F(omega'') F(omega + omega' - omega'') / ((omega - omega'')^2 - Omega_i^2).
/// The omega'' integral runs over the Gaussian supports of F. A denominator
/// pole inside that band is an error.
inline double delta2_reduced(const MediumSpec &medium, const ModulationSpec &spec, std::size_t i,
                             double omega, double omega_p, const Delta2Options &opt = {}) {
  const double outer = delta0(medium, i, omega) * delta0(medium, i, omega_p);
  const double e = spec.eps_of(i);
  if (e == 0.0)
    return 0.0;
  ModulationSpec s = spec;
  s.eps = e;
  const double O = medium[i].omega_res;
  const double O2 = O * O;
  const double sum = omega + omega_p;

  const auto windows =
      quadrature::merge_intervals(spectral_support(s, opt.half_width_sigmas));
  for (double pole : {omega - O, omega + O}) {
    for (const auto &[a, b] : windows) {
      if (pole >= a && pole <= b) {
        std::ostringstream msg;
        msg << "delta2: inner pole omega'' = " << pole << " lies inside the modulation band ["
            << a << ", " << b << "]";
        throw PoleAtResonance(msg.str());
      }
    }
  }

  auto den = [&](double x) {
    const double d = omega - x;
    return d * d - O2;
  };
  auto integrand = [&](double x) {
    return f_spectrum_per_volume(s, x) * f_spectrum_per_volume(s, sum - x) / den(x);
  };

  // Magnitude bound for the absolute floor: max|F| * int|F| * max 1/|den|.
  const double fmax = 4.0 * std::abs(e) * s.tau * std::sqrt(units::pi / 2.0);
  const double fint = 4.0 * std::abs(e) * units::pi; // int |F| domega
  double inv_den = 0.0;
  for (const auto &[a, b] : windows)
    for (double x : {a, b, 0.5 * (a + b)})
      inv_den = std::max(inv_den, 1.0 / std::abs(den(x)));
  const double floor = 1e-13 * fmax * fint * inv_den / units::two_pi;

  const auto est = quadrature::adaptive_over_windows(integrand, windows, opt.rel_tol, floor,
                                                     "delta2 inner integral");
  return O2 * O2 * outer * est.value / units::two_pi;
}

/// Large-tau evaluation of delta2_reduced: each Gaussian pair is integrated
/// exactly with the denominator frozen at the product centre.
inline double delta2_reduced_large_tau(const MediumSpec &medium, const ModulationSpec &spec,
                                       std::size_t i, double omega, double omega_p) {
  const double outer = delta0(medium, i, omega) * delta0(medium, i, omega_p);
  const double e = spec.eps_of(i);
  if (e == 0.0)
    return 0.0;
  const double O2 = medium[i].omega_res * medium[i].omega_res;
  const double tau = spec.tau;
  const double amp = e * tau * std::sqrt(units::pi / 2.0);
  double acc = 0.0;
  for (double a : spec.tones()) {
    for (double b : spec.tones()) {
      const double c = omega + omega_p - b;
      const double gap = c - a;
      const double centre = 0.5 * (a + c);
      const double d = omega - centre;
      acc += std::exp(-0.25 * tau * tau * gap * gap) / (d * d - O2);
    }
  }
  const double pair = amp * amp * std::sqrt(units::pi) / tau;
  return O2 * O2 * outer * pair * acc / units::two_pi;
}

/// First- and second-order parts of a projected auxiliary propagator.
struct SigmaTerms {
  double first = 0.0;
  double second = 0.0;
  double total() const { return first + second; }
};

/// On-shell polariton-projected auxiliary propagator per unit volume,
///   sqrt(C_a C_a') sum_i g_i^2 (s w_a)(s' w_a') [Delta1 + Delta2](s w_a, s' w_a'),
/// with s, s' = +1 or -1 picking the frequency signs.
inline SigmaTerms sigma_projected_onshell(const MediumSpec &medium,
                                          std::span<const BranchPoint> branches,
                                          const ModulationSpec &spec, std::size_t alpha,
                                          std::size_t alpha_p, int s_omega, int s_omega_p,
                                          const Delta2Options &opt = {}) {
  const BranchPoint &p = branches[alpha];
  const BranchPoint &q = branches[alpha_p];
  const double w = s_omega * p.omega;
  const double wp = s_omega_p * q.omega;
  const double proj = std::sqrt(p.C * q.C);
  SigmaTerms out;
  for (std::size_t i = 0; i < medium.size(); ++i) {
    if (spec.eps_of(i) == 0.0 || medium[i].g == 0.0)
      continue;
    const double wt = medium[i].g * medium[i].g * w * wp;
    out.first += wt * delta1_reduced(medium, spec, i, w, wp);
    out.second += wt * delta2_reduced(medium, spec, i, w, wp, opt);
  }
  out.first *= proj;
  out.second *= proj;
  return out;
}

} // namespace vacmix
