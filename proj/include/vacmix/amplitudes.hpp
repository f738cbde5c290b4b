#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vacmix/branches.hpp"
#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/modulation.hpp"
#include "vacmix/parallel.hpp"
#include "vacmix/quadrature.hpp"

namespace vacmix {

using cplx = std::complex<double>;

enum class MixingMode { analytic, quadrature };

inline std::string to_string(MixingMode m) {
  return m == MixingMode::analytic ? "analytic" : "quadrature";
}

/// Pair-emission channel: both quanta in branch alpha, or one in alpha and
/// one in alpha_p.
struct Process {
  enum class Kind { intra, inter };
  Kind kind = Kind::intra;
  std::size_t alpha = 1;
  std::size_t alpha_p = 1;

  static Process intra(std::size_t a) { return {Kind::intra, a, a}; }
  static Process inter(std::size_t a, std::size_t b) { return {Kind::inter, a, b}; }

  std::string name() const {
    return kind == Kind::intra ? "intra(" + std::to_string(alpha) + ")"
                               : "inter(" + std::to_string(alpha) + "," +
                                     std::to_string(alpha_p) + ")";
  }

  /// Total pair frequency the modulation must supply.
  double sum_frequency(std::span<const BranchPoint> b) const {
    return b[alpha].omega + b[alpha_p].omega;
  }

  bool operator==(const Process &) const = default;
};

struct AmplitudeOptions {
  MixingMode mode = MixingMode::analytic;
  bool include_subleading = false;
  double rel_tol = 1e-8;
};

/// Pair-creation amplitude G_{11<-00} split by perturbative order.
struct PairAmplitude {
  double k = 0.0;
  Process process;
  cplx first{};
  cplx second{};

  cplx value() const { return first + second; }
  double probability() const { return std::norm(value()); }
  bool perturbative() const { return probability() <= 1.0; }
};

namespace detail {

inline void check_inner_pole(double omega, double Omega, double lo, double hi) {
  for (double pole : {omega - Omega, omega + Omega}) {
    if (pole >= lo && pole <= hi) {
      std::ostringstream msg;
      msg << "mixing integral: pole omega' = " << pole << " inside the modulation band";
      throw PoleAtResonance(msg.str());
    }
  }
}

} // namespace detail

/// Mixing integral per unit volume,
///   sqrt(w_a w_a') int dw'/2pi Omega_m^2 / ((w_a - w')^2 - Omega_m^2) F(w') F(w_a + w_a' - w').
/// The analytic mode is the large-tau sum
///   (pi/2) eps^2 tau sqrt(w_a w_a') sum_ab Omega_m^2 / ((w_a - nu_a)^2 - Omega_m^2)
///     exp(-tau^2 (w_a + w_a' - nu_a - nu_b)^2 / 2).
inline double mixing_integral(const MediumSpec &medium, std::span<const BranchPoint> branches,
                              const ModulationSpec &spec, std::size_t alpha, std::size_t alpha_p,
                              MixingMode mode, double rel_tol = 1e-8) {
  const double w = branches[alpha].omega;
  const double wp = branches[alpha_p].omega;
  const double sum = w + wp;
  if (spec.eps == 0.0)
    return 0.0;
  const double O = medium[spec.target_m].omega_res;
  const double O2 = O * O;
  const double tau = spec.tau;
  const double root = std::sqrt(w * wp);

  if (mode == MixingMode::analytic) {
    double acc = 0.0;
    for (double a : spec.tones()) {
      const double d = w - a;
      const double den = d * d - O2;
      if (std::abs(den) < kPoleTolerance * O2)
        throw PoleAtResonance("mixing integral: w_a - nu_a sits on Omega_m");
      for (double b : spec.tones()) {
        const double gap = sum - a - b;
        acc += O2 / den * std::exp(-0.5 * tau * tau * gap * gap);
      }
    }
    return 0.5 * units::pi * spec.eps * spec.eps * tau * root * acc;
  }

  const auto windows = quadrature::merge_intervals(spectral_support(spec));
  for (const auto &[lo, hi] : windows)
    detail::check_inner_pole(w, O, lo, hi);
  auto den = [&](double x) {
    const double d = w - x;
    return d * d - O2;
  };
  auto integrand = [&](double x) {
    return O2 / den(x) * f_spectrum_per_volume(spec, x) * f_spectrum_per_volume(spec, sum - x);
  };
  double inv_den = 0.0;
  for (const auto &[lo, hi] : windows)
    for (double x : {lo, hi, 0.5 * (lo + hi)})
      inv_den = std::max(inv_den, O2 / std::abs(den(x)));
  const double e = std::abs(spec.eps);
  const double floor =
      1e-13 * (4.0 * e * tau * std::sqrt(units::pi / 2.0)) * (4.0 * e * units::pi) * inv_den;
  const auto est =
      quadrature::adaptive_over_windows(integrand, windows, rel_tol, floor, "mixing integral");
  return root * est.value / units::two_pi;
}

/// Intrabranch amplitude for modulation of resonance m:
///   i C g^2 Omega^2 / (8 (w^2 - Omega^2)^2) [w F(2w) + I_mix],
/// equivalent to the closed form with delta_eps(w) and Gaussians at 2w - nu_a
/// and 2w - nu_a - nu_b. Terms in F(0) are dropped.
inline PairAmplitude g_intra(const MediumSpec &medium, std::span<const BranchPoint> branches,
                             const ModulationSpec &spec, std::size_t alpha,
                             const AmplitudeOptions &opt = {}) {
  const BranchPoint &p = branches[alpha];
  PairAmplitude out;
  out.k = p.k;
  out.process = Process::intra(alpha);
  if (spec.eps == 0.0 || p.C == 0.0)
    return out;
  const auto &r = medium[spec.target_m];
  const double w = p.omega;
  const double d = w * w - r.omega_res * r.omega_res;
  const double pref = p.C * r.g * r.g * r.omega_res * r.omega_res / (8.0 * d * d);
  const cplx I(0.0, 1.0);
  out.first = I * pref * w * f_spectrum_per_volume(spec, 2.0 * w);
  out.second = I * pref * mixing_integral(medium, branches, spec, alpha, alpha, opt.mode,
                                          opt.rel_tol);
  return out;
}

/// Interbranch amplitude:
///   i sqrt(C C') g^2 Omega^2 / (8 (w^2 - Omega^2)(w'^2 - Omega^2)) [sqrt(w w') F(w + w') + I_mix],
/// plus, when requested, the next-order term with Gaussians at w' - w - nu_a and 2w - nu_b.
inline PairAmplitude g_inter(const MediumSpec &medium, std::span<const BranchPoint> branches,
                             const ModulationSpec &spec, std::size_t alpha, std::size_t alpha_p,
                             const AmplitudeOptions &opt = {}) {
  if (alpha == alpha_p)
    throw InvalidProcess("interbranch amplitude needs two distinct branches, got " +
                         std::to_string(alpha) + " twice");
  const BranchPoint &p = branches[alpha];
  const BranchPoint &q = branches[alpha_p];
  PairAmplitude out;
  out.k = p.k;
  out.process = Process::inter(alpha, alpha_p);
  if (spec.eps == 0.0 || p.C == 0.0 || q.C == 0.0)
    return out;
  const auto &r = medium[spec.target_m];
  const double O2 = r.omega_res * r.omega_res;
  const double w = p.omega;
  const double wp = q.omega;
  const double dw = w * w - O2;
  const double dwp = wp * wp - O2;
  const double proj = std::sqrt(p.C * q.C);
  const double pref = proj * r.g * r.g * O2 / (8.0 * dw * dwp);
  const cplx I(0.0, 1.0);
  out.first = I * pref * std::sqrt(w * wp) * f_spectrum_per_volume(spec, w + wp);
  out.second = I * pref * mixing_integral(medium, branches, spec, alpha, alpha_p, opt.mode,
                                          opt.rel_tol);
  if (opt.include_subleading) {
    const double tau = spec.tau;
    const double de_pair = r.g * r.g * O2 * spec.eps / (dw * dwp); // sqrt(de de') with sign
    const double de_w = r.g * r.g * O2 * spec.eps / (dw * dw);
    double acc = 0.0;
    for (double a : spec.tones()) {
      const double x = wp - w - a;
      for (double b : spec.tones()) {
        const double y = 2.0 * w - b;
        acc += std::exp(-0.5 * tau * tau * (x * x + y * y));
      }
    }
    out.second += std::sqrt(units::pi / 128.0) * std::sqrt(units::pi / 512.0) * proj * de_pair *
                  std::sqrt(w * wp) * tau * tau * p.C * de_w * w * acc;
  }
  return out;
}

inline PairAmplitude amplitude(const MediumSpec &medium, std::span<const BranchPoint> branches,
                               const ModulationSpec &spec, const Process &proc,
                               const AmplitudeOptions &opt = {}) {
  return proc.kind == Process::Kind::intra
             ? g_intra(medium, branches, spec, proc.alpha, opt)
             : g_inter(medium, branches, spec, proc.alpha, proc.alpha_p, opt);
}

// ---------------------------------------------------------------------------
// Resonance conditions and labels

/// A combination of modulation frequencies that a pair frequency can match.
struct Condition {
  std::string name;
  double value;
};

/// Conditions nu1, nu2, 2nu1, 2nu2, nu1+nu2, |nu1-nu2|, with coincident
/// values collapsed onto the first name.
inline std::vector<Condition> resonance_conditions(const ModulationSpec &spec) {
  const std::vector<Condition> all{{"nu1", spec.nu1},
                                   {"nu2", spec.nu2},
                                   {"2nu1", 2.0 * spec.nu1},
                                   {"2nu2", 2.0 * spec.nu2},
                                   {"nu1+nu2", spec.nu1 + spec.nu2},
                                   {"|nu1-nu2|", std::abs(spec.nu1 - spec.nu2)}};
  std::vector<Condition> out;
  const double tol = 1e-12 * std::max(spec.nu1, spec.nu2);
  for (const auto &c : all) {
    if (c.value <= tol)
      continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Condition &o) {
      return std::abs(o.value - c.value) <= tol;
    });
    if (!dup)
      out.push_back(c);
  }
  return out;
}

/// Labels for a pair frequency: the nearest condition within 3 / tau, plus
/// any other within 0.5 / tau of the nearest distance.
inline std::vector<std::string> label_sum_frequency(const ModulationSpec &spec, double sum) {
  const auto conds = resonance_conditions(spec);
  double best = std::numeric_limits<double>::infinity();
  for (const auto &c : conds)
    best = std::min(best, std::abs(sum - c.value));
  std::vector<std::string> out;
  if (!(best <= 3.0 / spec.tau))
    return out;
  for (const auto &c : conds)
    if (std::abs(sum - c.value) <= best + 0.5 / spec.tau)
      out.push_back(c.name);
  return out;
}

// ---------------------------------------------------------------------------
// Spectrum

struct SpectrumOptions {
  std::vector<Process> processes{Process::intra(1), Process::inter(1, 0)};
  std::size_t emission_branch = 1;
  AmplitudeOptions amp;
  unsigned threads = 1;
};

struct ProcessValue {
  cplx first{};
  cplx second{};
  double sum_frequency = 0.0;
  cplx value() const { return first + second; }
  double probability() const { return std::norm(value()); }
};

struct SpectrumRow {
  double k = 0.0;
  double omega = 0.0;     ///< frequency of the emission branch
  double lambda_vac = 0.0; ///< 2 pi / omega, um
  std::vector<ProcessValue> per_process;
  double total_prob = 0.0; ///< |sum of amplitudes|^2
};

struct Spectrum {
  std::vector<Process> processes;
  std::vector<SpectrumRow> rows;
  std::vector<std::string> warnings;
};

inline void validate_processes(const MediumSpec &medium, const SpectrumOptions &opt) {
  const std::size_t nb = medium.branch_count();
  if (opt.emission_branch >= nb)
    throw InvalidProcess("emission branch " + std::to_string(opt.emission_branch) +
                         " does not exist (medium has " + std::to_string(nb) + " branches)");
  for (const auto &p : opt.processes) {
    if (p.alpha >= nb || p.alpha_p >= nb)
      throw InvalidProcess(p.name() + " refers to a missing branch (medium has " +
                           std::to_string(nb) + ")");
    if (p.kind == Process::Kind::inter && p.alpha == p.alpha_p)
      throw InvalidProcess(p.name() + " needs two distinct branches");
  }
}

/// Spectrum over a wavenumber grid. Rows follow the grid order for any
/// thread count. Numeric failures are rethrown with the offending k.
inline Spectrum spectrum(const MediumSpec &medium, const ModulationSpec &spec,
                         const std::vector<double> &k_grid, const SpectrumOptions &opt = {}) {
  validate_processes(medium, opt);
  Spectrum out;
  out.processes = opt.processes;
  out.warnings = spec.warnings();
  out.rows.resize(k_grid.size());
  parallel_for(k_grid.size(), opt.threads, [&](std::size_t j) {
    const double k = k_grid[j];
    try {
      const auto b = solve_branches(medium, k);
      SpectrumRow row;
      row.k = k;
      row.omega = b[opt.emission_branch].omega;
      row.lambda_vac = units::lambda_from_omega(row.omega);
      cplx total{};
      for (const auto &proc : opt.processes) {
        const auto a = amplitude(medium, b, spec, proc, opt.amp);
        row.per_process.push_back({a.first, a.second, proc.sum_frequency(b)});
        total += a.value();
      }
      row.total_prob = std::norm(total);
      out.rows[j] = std::move(row);
    } catch (const NumericError &e) {
      std::ostringstream msg;
      msg << "at k = " << k << ": " << e.what();
      throw NumericError(msg.str());
    }
  });
  for (const auto &row : out.rows)
    for (std::size_t p = 0; p < row.per_process.size(); ++p)
      if (row.per_process[p].probability() > 1.0) {
        out.warnings.push_back(out.processes[p].name() + " exceeds unit probability at k = " +
                               std::to_string(row.k) + "; outside the perturbative regime");
        return out;
      }
  return out;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo))
    throw std::invalid_argument("grid needs hi > lo and at least two points");
  std::vector<double> g(points);
  for (std::size_t j = 0; j < points; ++j)
    g[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
  return g;
}

/// Grid fine enough that every process's pair frequency moves by at most
/// 1 / (4 tau) per step. `refined` reports whether the request was too coarse.
struct GridPlan {
  std::vector<double> k_grid;
  bool refined = false;
  std::size_t requested_points = 0;
};

inline GridPlan resolve_k_grid(const MediumSpec &medium, const ModulationSpec &spec,
                               const SpectrumOptions &opt, double k_min, double k_max,
                               std::size_t points, std::size_t max_points = 2'000'000) {
  validate_processes(medium, opt);
  GridPlan plan;
  plan.requested_points = points;
  const double step_limit = 1.0 / (4.0 * spec.tau);
  for (int pass = 0; pass < 4; ++pass) {
    auto grid = linear_grid(k_min, k_max, points);
    std::vector<std::vector<BranchPoint>> b(grid.size());
    parallel_for(grid.size(), opt.threads,
                 [&](std::size_t j) { b[j] = solve_branches(medium, grid[j]); });
    double worst = 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j)
      for (const auto &p : opt.processes)
        worst = std::max(worst, std::abs(p.sum_frequency(b[j]) - p.sum_frequency(b[j - 1])));
    plan.k_grid = std::move(grid);
    if (worst <= step_limit)
      return plan;
    plan.refined = true;
    const double ratio = worst / step_limit;
    const auto next = static_cast<std::size_t>(std::ceil((points - 1) * ratio * 1.05)) + 1;
    if (next > max_points)
      throw NumericError("grid refinement would exceed " + std::to_string(max_points) +
                         " points");
    points = next;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Peaks

struct Peak {
  std::size_t process_index = 0;
  std::string process;
  double k = 0.0;
  double lambda = 0.0;
  double sum_frequency = 0.0;
  std::vector<std::string> labels;
  double prob_max = 0.0;
  double fwhm = std::numeric_limits<double>::quiet_NaN(); ///< in pair frequency
};

inline std::string condition_text(const Peak &p) {
  if (p.labels.empty())
    return "unlabeled";
  std::string s;
  for (std::size_t j = 0; j < p.labels.size(); ++j)
    s += (j ? " | " : "") + p.labels[j];
  return s;
}

/// Local maxima of each process's probability, at or above `floor_rel`
/// times the largest probability anywhere in the spectrum. Positions are
/// refined by a parabola through the three top samples.
inline std::vector<Peak> find_peaks(const Spectrum &s, const ModulationSpec &spec,
                                    double floor_rel = 0.0) {
  std::vector<Peak> out;
  const std::size_t n = s.rows.size();
  if (n < 3)
    return out;
  double global = 0.0;
  for (const auto &row : s.rows)
    for (const auto &pv : row.per_process)
      global = std::max(global, pv.probability());
  if (global <= 0.0)
    return out;

  for (std::size_t p = 0; p < s.processes.size(); ++p) {
    auto prob = [&](std::size_t j) { return s.rows[j].per_process[p].probability(); };
    auto sumf = [&](std::size_t j) { return s.rows[j].per_process[p].sum_frequency; };
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double y0 = prob(j - 1), y1 = prob(j), y2 = prob(j + 1);
      if (!(y1 > y0 && y1 >= y2) || y1 < floor_rel * global || y1 <= 0.0)
        continue;
      const double curv = y0 - 2.0 * y1 + y2;
      double delta = curv < 0.0 ? 0.5 * (y0 - y2) / curv : 0.0;
      delta = std::clamp(delta, -0.5, 0.5);
      auto lerp = [&](auto get) {
        return delta >= 0.0 ? get(j) + delta * (get(j + 1) - get(j))
                            : get(j) + delta * (get(j) - get(j - 1));
      };
      Peak pk;
      pk.process_index = p;
      pk.process = s.processes[p].name();
      pk.k = lerp([&](std::size_t i) { return s.rows[i].k; });
      pk.lambda = lerp([&](std::size_t i) { return s.rows[i].lambda_vac; });
      pk.sum_frequency = lerp(sumf);
      pk.prob_max = y1 - 0.25 * (y0 - y2) * delta;
      pk.labels = label_sum_frequency(spec, pk.sum_frequency);

      const double half = 0.5 * pk.prob_max;
      double left = std::numeric_limits<double>::quiet_NaN();
      double right = left;
      for (std::size_t i = j; i > 0; --i) {
        if (prob(i - 1) < half) {
          const double f = (half - prob(i - 1)) / (prob(i) - prob(i - 1));
          left = sumf(i - 1) + f * (sumf(i) - sumf(i - 1));
          break;
        }
      }
      for (std::size_t i = j; i + 1 < n; ++i) {
        if (prob(i + 1) < half) {
          const double f = (prob(i) - half) / (prob(i) - prob(i + 1));
          right = sumf(i) + f * (sumf(i + 1) - sumf(i));
          break;
        }
      }
      pk.fwhm = std::abs(right - left);
      out.push_back(std::move(pk));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Peak &a, const Peak &b) { return a.lambda > b.lambda; });
  return out;
}

// ---------------------------------------------------------------------------
// Emission rate

/// Pairs per pulse per unit angle for a thin film,
///   dP/dtheta ~ A_spot (2 pi / tau)(2 pi / lambda_mix) |G|^2(lambda_mix).
inline double emission_rate_per_angle(double prob, double A_spot, double lambda_mix,
                                      double tau) {
  return A_spot * (units::two_pi / tau) * (units::two_pi / lambda_mix) * prob;
}

} // namespace vacmix
