#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/parallel.hpp"

namespace vacmix {

/// One polariton mode: a positive root of D(k, .) and its Hopfield weight.
struct BranchPoint {
  double k = 0.0;
  std::size_t alpha = 0; ///< 0 is the lowest-frequency branch
  double omega = 0.0;
  double C = 0.0; ///< photon content in [0, 1]
  bool pinned = false; ///< root of an uncoupled (g = 0) resonance, omega = Omega_i
};

/// Branches sampled over a wavenumber grid; `points[j]` holds every branch at k_grid[j].
struct BranchTable {
  std::vector<double> k_grid;
  std::vector<std::vector<BranchPoint>> points;
};

/// Relative spacing below which two roots count as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-8;

namespace detail {

// D(k, omega) written in x = omega^2 and restricted to coupled resonances:
//   h(x) = x - sum_i g_i^2 x / (x - Omega_i^2) - k^2.
// h is strictly increasing between consecutive poles, running from -inf to +inf.
struct ShellFunction {
  std::vector<double> O2; // Omega_i^2 of coupled resonances
  std::vector<double> g2;
  double k2 = 0.0;

  ShellFunction(const MediumSpec &medium, double k) : k2(k * k) {
    for (const auto &r : medium.resonances()) {
      if (r.g > 0.0) {
        O2.push_back(r.omega_res * r.omega_res);
        g2.push_back(r.g * r.g);
      }
    }
  }

  double operator()(double x) const {
    double v = x - k2;
    for (std::size_t i = 0; i < O2.size(); ++i)
      v -= g2[i] * x / (x - O2[i]);
    return v;
  }

  /// dh/dx = 1 + sum_i g_i^2 Omega_i^2 / (x - Omega_i^2)^2, always >= 1.
  double slope(double x) const {
    double v = 1.0;
    for (std::size_t i = 0; i < O2.size(); ++i) {
      const double d = x - O2[i];
      v += g2[i] * O2[i] / (d * d);
    }
    return v;
  }
};

// Root of an increasing function on the open interval (lo, hi). The function
// is negative just above lo and positive just below hi; the endpoints may be
// poles, so they are never evaluated.
template <class F>
double bracketed_root(const F &h, double lo, double hi) {
  double f_lo = std::numeric_limits<double>::quiet_NaN();
  double f_hi = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double f = h(mid);
    if (f == 0.0)
      return mid;
    if (f < 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
    if (hi - lo <= 1e-9 * hi && std::isfinite(f_lo) && std::isfinite(f_hi))
      break;
  }
  // Secant polish, kept inside the bracket.
  for (int it = 0; it < 50 && std::isfinite(f_lo) && std::isfinite(f_hi); ++it) {
    double x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi))
      x = 0.5 * (lo + hi);
    const double f = h(x);
    if (f == 0.0)
      return x;
    if (f < 0.0) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
      f_hi = f;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      break;
  }
  return std::isfinite(f_lo) && std::isfinite(f_hi) ? lo - f_lo * (hi - lo) / (f_hi - f_lo)
                                                    : 0.5 * (lo + hi);
}

} // namespace detail

/// Exact pair of branches for a single resonance:
///   omega_pm^2 = ((k^2 + Omega^2 + g^2) +- sqrt((k^2 + Omega^2 + g^2)^2 - 4 k^2 Omega^2)) / 2.
/// The lower root uses omega_-^2 omega_+^2 = k^2 Omega^2 to avoid cancellation.
inline std::pair<double, double> single_resonance_closed_form(double k, double Omega, double g) {
  const double s = k * k + Omega * Omega + g * g;
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * k * k * Omega * Omega));
  const double x_plus = 0.5 * (s + disc);
  const double x_minus = x_plus > 0.0 ? (k * k * Omega * Omega) / x_plus : 0.0;
  return {std::sqrt(x_minus), std::sqrt(x_plus)};
}

/// Hopfield weight as the on-shell limit (omega^2 - omega_a^2) / D(k, omega),
/// i.e. the inverse slope of D in omega^2. Throws DegenerateBranches when
/// another root of the set lies within the degeneracy tolerance.
inline double hopfield_C(const MediumSpec &medium, std::span<const BranchPoint> branches,
                         std::size_t alpha) {
  const BranchPoint &p = branches[alpha];
  for (const auto &q : branches) {
    if (q.alpha != p.alpha &&
        std::abs(q.omega - p.omega) <= kDegeneracyTolerance * std::max(p.omega, q.omega)) {
      std::ostringstream msg;
      msg << "branches " << p.alpha << " and " << q.alpha << " coincide at k = " << p.k
          << " (omega = " << p.omega << ")";
      throw DegenerateBranches(msg.str());
    }
  }
  if (p.pinned)
    return 0.0;
  return 1.0 / detail::ShellFunction(medium, p.k).slope(p.omega * p.omega);
}

/// Product form prod_i (w_a^2 - Omega_i^2) / prod_{c != a} (w_a^2 - w_c^2) over
/// coupled resonances and unpinned roots. Equals hopfield_C on shell.
inline double hopfield_C_product(const MediumSpec &medium, std::span<const BranchPoint> branches,
                                 std::size_t alpha) {
  const BranchPoint &p = branches[alpha];
  if (p.pinned)
    return 0.0;
  const double x = p.omega * p.omega;
  double v = 1.0;
  for (const auto &r : medium.resonances())
    if (r.g > 0.0)
      v *= x - r.omega_res * r.omega_res;
  for (const auto &q : branches)
    if (q.alpha != p.alpha && !q.pinned)
      v /= x - q.omega * q.omega;
  return v;
}

/// All N + 1 nonnegative roots of D(k, .), ascending, with Hopfield weights.
inline std::vector<BranchPoint> solve_branches(const MediumSpec &medium, double k) {
  if (!(k >= 0.0) || !std::isfinite(k))
    throw std::invalid_argument("solve_branches: k must be finite and >= 0");

  const detail::ShellFunction h(medium, k);
  std::vector<BranchPoint> out;
  out.reserve(medium.branch_count());

  // Uncoupled resonances leave a root pinned at Omega_i.
  for (const auto &r : medium.resonances())
    if (r.g == 0.0)
      out.push_back({k, 0, r.omega_res, 0.0, true});

  std::vector<double> edges{0.0};
  edges.insert(edges.end(), h.O2.begin(), h.O2.end());

  for (std::size_t j = 0; j < edges.size(); ++j) {
    const double lo = edges[j];
    double x = 0.0;
    if (j == 0 && k == 0.0) {
      x = 0.0; // h(0) = -k^2 = 0: the uniform mode at rest
    } else if (j + 1 < edges.size()) {
      x = detail::bracketed_root(h, lo, edges[j + 1]);
    } else {
      // Above the top resonance n -> 1, so omega ~ k; grow until h > 0.
      double hi = std::max(lo, h.k2) + 1.0;
      for (double g2 : h.g2)
        hi += g2;
      int guard = 0;
      while (!(h(hi) > 0.0)) {
        hi *= 2.0;
        if (++guard > 200)
          throw BranchSolveError("no sign change above the top resonance");
      }
      x = detail::bracketed_root(h, lo, hi);
    }
    const double fx = h(x);
    if (!std::isfinite(x) || !std::isfinite(fx) || x < 0.0) {
      std::ostringstream msg;
      msg << "root search failed in interval " << j << " at k = " << k;
      throw BranchSolveError(msg.str());
    }
    out.push_back({k, 0, std::sqrt(x), 0.0, false});
  }

  std::sort(out.begin(), out.end(),
            [](const BranchPoint &a, const BranchPoint &b) { return a.omega < b.omega; });
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a].alpha = a;
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a].C = hopfield_C(medium, out, a);
  return out;
}

/// Squared generalized Hopfield coefficient off shell,
///   P^2(omega) = (omega^2 - omega_a^2) / D(k, omega),
/// written as prod_i (omega^2 - Omega_i^2) / prod_{c != a} (omega^2 - omega_c^2),
/// which is finite at omega = omega_a where it equals C.
inline double projection_P_squared(const MediumSpec &medium, std::span<const BranchPoint> branches,
                                   std::size_t alpha, double omega) {
  const BranchPoint &p = branches[alpha];
  if (p.pinned)
    return 0.0;
  const double x = omega * omega;
  double v = 1.0;
  for (const auto &r : medium.resonances())
    if (r.g > 0.0)
      v *= x - r.omega_res * r.omega_res;
  for (const auto &q : branches) {
    if (q.alpha == p.alpha || q.pinned)
      continue;
    if (std::abs(std::abs(omega) - q.omega) < kPoleTolerance) {
      std::ostringstream msg;
      msg << "omega = " << omega << " lies on the shell of branch " << q.alpha;
      throw PoleAtResonance(msg.str());
    }
    v /= x - q.omega * q.omega;
  }
  return v;
}

/// Generalized Hopfield coefficient P_ka(omega); imaginary where D and
/// omega^2 - omega_a^2 differ in sign.
inline std::complex<double> projection_P(const MediumSpec &medium,
                                         std::span<const BranchPoint> branches, std::size_t alpha,
                                         double omega) {
  return std::sqrt(std::complex<double>(projection_P_squared(medium, branches, alpha, omega)));
}

/// Solves every k of the grid, spread over `threads` workers. Output order
/// follows the grid regardless of thread count.
inline BranchTable build_branch_table(const MediumSpec &medium, std::vector<double> k_grid,
                                      unsigned threads = 1) {
  BranchTable table;
  table.points.resize(k_grid.size());
  parallel_for(k_grid.size(), threads,
               [&](std::size_t j) { table.points[j] = solve_branches(medium, k_grid[j]); });
  table.k_grid = std::move(k_grid);
  return table;
}

/// Wavenumber at which branch `alpha` reaches frequency `omega`. The branch
/// frequency is increasing in k, so this is a one-dimensional bracket search.
inline double k_for_branch_omega(const MediumSpec &medium, std::size_t alpha, double omega) {
  // On shell k^2 = omega^2 n^2(omega); valid when omega lies inside the band of alpha.
  const double k2 = omega * omega * n_squared(medium, omega);
  if (k2 < 0.0)
    throw NumericError("omega = " + std::to_string(omega) + " is inside a stop band");
  const double k = std::sqrt(k2);
  const auto pts = solve_branches(medium, k);
  if (std::abs(pts[alpha].omega - omega) > 1e-8 * omega)
    throw NumericError("omega = " + std::to_string(omega) + " is not on branch " +
                       std::to_string(alpha));
  return k;
}

} // namespace vacmix
