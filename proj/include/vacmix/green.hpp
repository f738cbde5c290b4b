#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/quadrature.hpp"

namespace vacmix {

/// Boundary-value problem [d_t^2 + Omega0^2 + q(t)] Delta(t, t') = -delta(t - t'),
/// Delta(t_i, t') = Delta(t_f, t') = 0.
struct GreenProblem {
  double Omega0 = 1.0;
  std::function<double(double)> q; ///< Omega^2(t) - Omega0^2
  double t_i = 0.0;
  double t_f = 1.0;
};

/// Single-tone problem Omega^2(t) = Omega0^2 [1 + eps cos(nu t) exp(-t^2 / 2 tau^2)].
inline GreenProblem single_tone_problem(double Omega0, double eps, double nu, double tau,
                                        double t_i, double t_f) {
  return {Omega0,
          [=](double t) {
            return Omega0 * Omega0 * eps * std::cos(nu * t) * std::exp(-t * t / (2.0 * tau * tau));
          },
          t_i, t_f};
}

/// Unperturbed boundary Green's function,
///   sin Omega(t_f - t>) sin Omega(t< - t_i) / (Omega sin Omega (t_f - t_i)).
inline double green_static(double Omega, double t_i, double t_f, double t, double tp) {
  const double lo = std::min(t, tp);
  const double hi = std::max(t, tp);
  const double s = std::sin(Omega * (t_f - t_i));
  if (std::abs(s) < 1e-12)
    throw WronskianSingular("Omega (t_f - t_i) is a multiple of pi");
  return std::sin(Omega * (t_f - hi)) * std::sin(Omega * (lo - t_i)) / (Omega * s);
}

/// Exact Green's function at one sample, and its departure from the static one.
struct GreenSample {
  double t = 0.0;
  double exact = 0.0;
  double deviation = 0.0; ///< exact - green_static, computed without cancellation
};

/// Settings for the homogeneous-solution integrations.
struct OracleOptions {
  double rel_tol = 1e-12;
  double abs_tol_scale = 1e-13; ///< absolute tolerance per unit of max|q| / Omega0^2
};

namespace detail {

// Departure (du, du') of a homogeneous solution from its static reference
// r(t), where r'' + Omega0^2 r = 0. Integrated from `start` through `times`.
inline std::vector<std::array<double, 2>>
homogeneous_departure(const GreenProblem &p, bool forward, const std::vector<double> &times,
                      double abs_tol, double rel_tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double O = p.Omega0;
  auto ref = [&](double t) {
    return forward ? std::sin(O * (t - p.t_i)) / O : std::sin(O * (p.t_f - t)) / O;
  };
  auto rhs = [&](const State &x, State &dx, double t) {
    dx[0] = x[1];
    dx[1] = -O * O * x[0] - p.q(t) * (ref(t) + x[0]);
  };

  std::vector<double> grid;
  grid.push_back(forward ? p.t_i : p.t_f);
  grid.insert(grid.end(), times.begin(), times.end());
  if (forward)
    std::sort(grid.begin() + 1, grid.end());
  else
    std::sort(grid.begin() + 1, grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::map<double, State> seen;
  State x{0.0, 0.0};
  const double period = 2.0 * units::pi / O;
  const double dt = (forward ? 1.0 : -1.0) * period * 1e-3;
  auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_fehlberg78<State>());
  ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt,
                       [&](const State &s, double t) { seen[t] = s; });

  std::vector<State> out;
  out.reserve(times.size());
  for (double t : times)
    out.push_back(seen.at(t));
  return out;
}

} // namespace detail

/// Exact boundary Green's function Delta(t, t') at each t of `t_grid`, built
/// from the solution vanishing at t_i and the one vanishing at t_f, joined by
/// their Wronskian. Both are integrated as departures from the static
/// solutions so the deviation keeps full relative precision for small q.
inline std::vector<GreenSample> exact_green_oracle(const GreenProblem &p, double t_prime,
                                                   const std::vector<double> &t_grid,
                                                   const OracleOptions &opt = {}) {
  if (!(t_prime > p.t_i && t_prime < p.t_f))
    throw std::invalid_argument("exact_green_oracle: t' must lie strictly inside (t_i, t_f)");
  const double O = p.Omega0;

  double qmax = 0.0;
  const int probes = 2000;
  for (int j = 0; j <= probes; ++j)
    qmax = std::max(qmax, std::abs(p.q(p.t_i + (p.t_f - p.t_i) * j / probes)));
  const double abs_tol = std::max(opt.abs_tol_scale * qmax / (O * O), 1e-300);

  std::vector<double> times(t_grid);
  times.push_back(t_prime);
  const auto du = detail::homogeneous_departure(p, true, times, abs_tol, opt.rel_tol);
  const auto dv = detail::homogeneous_departure(p, false, times, abs_tol, opt.rel_tol);

  auto u0 = [&](double t) { return std::sin(O * (t - p.t_i)) / O; };
  auto u0d = [&](double t) { return std::cos(O * (t - p.t_i)); };
  auto v0 = [&](double t) { return std::sin(O * (p.t_f - t)) / O; };
  auto v0d = [&](double t) { return -std::cos(O * (p.t_f - t)); };

  // Wronskian W = u v' - u' v at t', split as W0 + dW.
  const std::size_t k = times.size() - 1;
  const double W0 = -std::sin(O * (p.t_f - p.t_i)) / O;
  const double a = u0(t_prime), ad = u0d(t_prime), b = v0(t_prime), bd = v0d(t_prime);
  const double dU = du[k][0], dUd = du[k][1], dV = dv[k][0], dVd = dv[k][1];
  const double dW = a * dVd + dU * bd + dU * dVd - (ad * dV + dUd * b + dUd * dV);
  const double W = W0 + dW;
  if (std::abs(W) * O < 1e-9) {
    std::ostringstream msg;
    msg << "Wronskian " << W << " vanishes; t_f - t_i is close to a half-period";
    throw WronskianSingular(msg.str());
  }

  std::vector<GreenSample> out;
  out.reserve(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    // Delta = -u(t<) v(t>) / W.
    double U0, dUl, V0, dVr;
    if (t <= t_prime) {
      U0 = u0(t), dUl = du[j][0], V0 = b, dVr = dV;
    } else {
      U0 = a, dUl = dU, V0 = v0(t), dVr = dv[j][0];
    }
    const double cross = (U0 * dVr + dUl * V0 + dUl * dVr) * W0 - U0 * V0 * dW;
    GreenSample s;
    s.t = t;
    s.deviation = -cross / (W * W0);
    s.exact = -U0 * V0 / W0 + s.deviation;
    out.push_back(s);
  }
  return out;
}

/// Convenience form taking Omega^2(t) directly; the static reference is Omega^2(t_i).
inline std::vector<GreenSample>
exact_green_oracle(const std::function<double(double)> &Omega2_of_t, double t_i, double t_f,
                   double t_prime, const std::vector<double> &t_grid,
                   const OracleOptions &opt = {}) {
  const double O2 = Omega2_of_t(t_i);
  if (!(O2 > 0.0))
    throw std::invalid_argument("exact_green_oracle: Omega^2(t_i) must be > 0");
  GreenProblem p{std::sqrt(O2), [=](double t) { return Omega2_of_t(t) - O2; }, t_i, t_f};
  return exact_green_oracle(p, t_prime, t_grid, opt);
}

/// Orders of the perturbative series at one sample.
struct SeriesSample {
  double t = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double total() const { return d0 + d1 + d2; }
};

struct SeriesOptions {
  double panel_width = 0.5; ///< in units of 1 / Omega0
  int order = 20;
};

namespace detail {

// Composite Gauss-Legendre over [a, b] with forced panel edges at `breaks`.
template <class F>
double piecewise_gl(F &&f, double a, double b, std::vector<double> breaks, double h_max,
                    int order) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double lo = std::max(a, breaks[j]);
    const double hi = std::min(b, breaks[j + 1]);
    if (!(hi > lo))
      continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / h_max)));
    sum += quadrature::composite_gauss_legendre(f, lo, hi, panels, order);
  }
  return sum;
}

} // namespace detail

/// Born series of the boundary Green's function through second order:
///   Delta1(t, t') = int ds G0(t, s) q(s) G0(s, t'),
///   Delta2(t, t') = int ds G0(t, s) q(s) Delta1(s, t').
/// Delta1 is tabulated once on a node set whose panel edges include every
/// sample time and t', where the integrands have their kinks.
inline std::vector<SeriesSample> green_series(const GreenProblem &p, double t_prime,
                                              const std::vector<double> &t_grid,
                                              const SeriesOptions &opt = {}) {
  const double O = p.Omega0;
  const double h = opt.panel_width / O;
  auto G0 = [&](double t, double s) { return green_static(O, p.t_i, p.t_f, t, s); };
  auto d1 = [&](double t) {
    return detail::piecewise_gl([&](double s) { return G0(t, s) * p.q(s) * G0(s, t_prime); },
                                p.t_i, p.t_f, {t, t_prime}, h, opt.order);
  };

  std::vector<double> edges{p.t_i, p.t_f, t_prime};
  for (double t : t_grid)
    if (t > p.t_i && t < p.t_f)
      edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto &rule = quadrature::gauss_legendre(opt.order);
  std::vector<double> nodes, weights;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    const double lo = edges[j], hi = edges[j + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
    const double w = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k)
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        nodes.push_back(lo + w * (k + 0.5 * (1.0 + rule.nodes[i])));
        weights.push_back(0.5 * w * rule.weights[i]);
      }
  }
  std::vector<double> qd1(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    qd1[i] = weights[i] * p.q(nodes[i]) * d1(nodes[i]);

  std::vector<SeriesSample> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    SeriesSample s;
    s.t = t;
    s.d0 = G0(t, t_prime);
    s.d1 = d1(t);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      s.d2 += G0(t, nodes[i]) * qd1[i];
    out.push_back(s);
  }
  return out;
}

/// Retarded response kernel chi(t) = sum_i g_i^2 d_t^2 Delta_i^R(t, 0) of the
/// static medium, with Delta_i^R(t, 0) = -theta(t) sin(Omega_i t) / Omega_i,
/// differentiated by a centred second difference. Diagnostic only.
inline std::vector<double> susceptibility_chi(const MediumSpec &medium,
                                              const std::vector<double> &t_grid) {
  double omax = 0.0;
  for (const auto &r : medium.resonances())
    omax = std::max(omax, r.omega_res);
  const double h = 1e-3 / omax;
  auto retarded = [&](double t) {
    double v = 0.0;
    if (t <= 0.0)
      return v;
    for (const auto &r : medium.resonances())
      v -= r.g * r.g * std::sin(r.omega_res * t) / r.omega_res;
    return v;
  };
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid)
    out.push_back((retarded(t + h) - 2.0 * retarded(t) + retarded(t - h)) / (h * h));
  return out;
}

} // namespace vacmix
