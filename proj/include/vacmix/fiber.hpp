#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacmix/branches.hpp"
#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"

namespace vacmix {

/// Medium with a weak parabolic transverse profile Omega_i^2(rho) = Omega_i^2 + delta r^2.
struct FiberSpec {
  MediumSpec medium;
  double delta = 0.0;
};

/// Sum_i g_i^2 omega^2 / (omega^2 - Omega_i^2)^2.
inline double fiber_weight(const MediumSpec &medium, double omega) {
  detail::check_off_pole(medium, omega);
  double s = 0.0;
  for (const auto &r : medium.resonances()) {
    const double d = omega * omega - r.omega_res * r.omega_res;
    s += r.g * r.g * omega * omega / (d * d);
  }
  return s;
}

/// Transverse harmonic strength alpha_k = (delta / 2) sum_i g_i^2 omega^2 / (omega^2 - Omega_i^2)^2.
inline double fiber_alpha(const FiberSpec &fiber, double omega) {
  return 0.5 * fiber.delta * fiber_weight(fiber.medium, omega);
}

/// D[k, n, m, omega] = D(k, omega) - (n + m + 1/2) delta sum_i g_i^2 omega^2 / (omega^2 - Omega_i^2)^2.
inline double fiber_dispersion(const FiberSpec &fiber, double k, int n, int m, double omega) {
  return dispersion_D(fiber.medium, k, omega) -
         (n + m + 0.5) * fiber.delta * fiber_weight(fiber.medium, omega);
}

/// Transverse Hermite-Gaussian mode
///   u_nm = (alpha / (2^(n+m) n! m! pi))^(1/2) exp(-alpha rho^2 / 2) H_n(sqrt(alpha) x) H_m(sqrt(alpha) y).
inline double hermite_gaussian_mode(const FiberSpec &fiber, int n, int m, double x, double y,
                                    double omega) {
  const double a = fiber_alpha(fiber, omega);
  if (!(a > 0.0))
    throw DegenerateProfile("alpha_k = " + std::to_string(a) + " is not positive");
  const double s = std::sqrt(a);
  const double lognorm = 0.5 * (std::log(a / units::pi) - (n + m) * std::log(2.0) -
                                std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
  return std::exp(lognorm - 0.5 * a * (x * x + y * y)) * std::hermite(n, s * x) *
         std::hermite(m, s * y);
}

/// One fiber polariton: a root of fiber_dispersion for branch `branch`.
struct FiberBranchPoint {
  double k = 0.0;
  int n = 0;
  int m = 0;
  std::size_t branch = 0;
  double omega = 0.0;
  double alpha_k = 0.0;
  int iterations = 0;
};

/// Fiber branch `alpha` at (k, n, m). With alpha_k frozen the fiber relation
/// is the bulk one at k_eff^2 = k^2 + (2(n+m)+1) alpha_k, so the branch is
/// found by the bulk solver and alpha_k is updated at the new root until it
/// settles. Near a resonance alpha_k diverges and the iteration can run onto
/// the pole; that surfaces as BranchSolveError.
inline FiberBranchPoint solve_fiber_branch(const FiberSpec &fiber, double k, int n, int m,
                                           std::size_t alpha, int max_iter = 100) {
  if (n < 0 || m < 0)
    throw std::invalid_argument("mode orders must be nonnegative");
  const auto bulk = solve_branches(fiber.medium, k);
  const auto &b = bulk.at(alpha);
  FiberBranchPoint p;
  p.k = k;
  p.n = n;
  p.m = m;
  p.branch = alpha;
  p.omega = b.omega;
  if (b.pinned || fiber.delta == 0.0 || b.omega == 0.0) {
    p.alpha_k = b.omega > 0.0 && !b.pinned ? fiber_alpha(fiber, b.omega) : 0.0;
    return p;
  }
  const double order = 2.0 * (n + m) + 1.0;
  auto fail = [&](const std::string &why) {
    return BranchSolveError("fiber branch " + std::to_string(alpha) + " at k = " +
                            std::to_string(k) + ", (n, m) = (" + std::to_string(n) + ", " +
                            std::to_string(m) + "): " + why);
  };
  double omega = b.omega;
  int it = 0;
  try {
    for (; it < max_iter; ++it) {
      const double a = fiber_alpha(fiber, omega);
      const double k_eff2 = k * k + order * a;
      if (k_eff2 < 0.0)
        throw fail("k_eff^2 turned negative");
      const double next = solve_branches(fiber.medium, std::sqrt(k_eff2))[alpha].omega;
      const bool done = std::abs(next - omega) <= 1e-14 * omega;
      omega = next;
      if (done)
        break;
    }
  } catch (const PoleAtResonance &e) {
    throw fail(std::string("iteration reached a resonance; ") + e.what());
  }
  if (it == max_iter)
    throw fail("fixed point did not settle");
  p.omega = omega;
  p.alpha_k = fiber_alpha(fiber, omega);
  p.iterations = it + 1;
  return p;
}

/// Every fiber branch at (k, n, m).
inline std::vector<FiberBranchPoint> solve_fiber_branches(const FiberSpec &fiber, double k, int n,
                                                          int m, int max_iter = 100) {
  std::vector<FiberBranchPoint> out;
  for (std::size_t a = 0; a < fiber.medium.branch_count(); ++a)
    out.push_back(solve_fiber_branch(fiber, k, n, m, a, max_iter));
  return out;
}

} // namespace vacmix
