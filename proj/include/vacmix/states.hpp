#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "vacmix/errors.hpp"
#include "vacmix/quadrature.hpp"
#include "vacmix/units.hpp"

namespace vacmix::states {

using cplx = std::complex<double>;

/// Largest Fock index accepted by the polynomial and amplitude routines.
inline constexpr int kMaxOrder = 64;

namespace detail {

inline void check_order(int m, int n) {
  if (m < 0 || n < 0)
    throw std::invalid_argument("Fock orders must be nonnegative");
  if (m > kMaxOrder || n > kMaxOrder)
    throw OrderTooLarge("order (" + std::to_string(m) + ", " + std::to_string(n) +
                        ") exceeds " + std::to_string(kMaxOrder));
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

} // namespace detail

/// Complex Hermite polynomial in independent arguments,
///   H_mn(z1, z2) = sum_k (-1)^k k! C(m,k) C(n,k) z1^(m-k) z2^(n-k).
inline cplx hermite_complex(int m, int n, cplx z1, cplx z2) {
  detail::check_order(m, n);
  const int kmax = std::min(m, n);
  std::vector<cplx> p1(m + 1, 1.0), p2(n + 1, 1.0);
  for (int j = 1; j <= m; ++j)
    p1[j] = p1[j - 1] * z1;
  for (int j = 1; j <= n; ++j)
    p2[j] = p2[j - 1] * z2;
  cplx sum = 0.0;
  double coef = 1.0; // (-1)^k k! C(m,k) C(n,k); ratio -(m-k+1)(n-k+1)/k
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0)
      coef = -coef * static_cast<double>(m - k + 1) * static_cast<double>(n - k + 1) / k;
    sum += coef * p1[m - k] * p2[n - k];
  }
  return sum;
}

/// H_mn(x*, x).
inline cplx hermite_complex(int m, int n, cplx x) {
  return hermite_complex(m, n, std::conj(x), x);
}

/// Fock wavefunctional
///   Psi_mn(A, t) = sqrt(w/2pi) exp(-w|A|^2/2) H_mn(sqrt(w) A*, sqrt(w) A) e^{-i(m+n)wt} / sqrt(m! n!).
inline cplx wavefunctional(int m, int n, cplx A, double t, double omega) {
  detail::check_order(m, n);
  const double s = std::sqrt(omega);
  const double lognorm =
      0.5 * std::log(omega / units::two_pi) - 0.5 * omega * std::norm(A) -
      0.5 * (detail::log_factorial(m) + detail::log_factorial(n));
  const cplx phase = std::exp(cplx(0.0, -(m + n) * omega * t));
  return std::exp(lognorm) * hermite_complex(m, n, s * std::conj(A), s * A) * phase;
}

/// Displaced Gaussian phi_a(A) = sqrt(w/2pi) exp(-w|A - a|^2 / 2).
inline double displaced_gaussian(cplx a, cplx A, double omega) {
  return std::sqrt(omega / units::two_pi) * std::exp(-0.5 * omega * std::norm(A - a));
}

/// Coherent-state coefficient
///   psi_mn(a) = exp(-w|a|^2/4) (w/4)^((m+n)/2) (a*)^m a^n / sqrt(m! n!).
/// It multiplies Psi_nm, i.e. phi_a = sum psi_mn(a) Psi_nm, and pairs with
/// transition_G_J as F(b, a)_J = sum psi_mn(b)* psi_pq(a) G_{mn<-pq}.
inline cplx coherent_expansion_coeff(int m, int n, cplx a, double omega) {
  detail::check_order(m, n);
  if (std::abs(a) == 0.0)
    return (m == 0 && n == 0) ? 1.0 : 0.0;
  const double logmag = -0.25 * omega * std::norm(a) + 0.5 * (m + n) * std::log(omega / 4.0) +
                        (m + n) * std::log(std::abs(a)) -
                        0.5 * (detail::log_factorial(m) + detail::log_factorial(n));
  const double arg = (n - m) * std::arg(a);
  return std::polar(std::exp(logmag), arg);
}

// ---------------------------------------------------------------------------
// Driven oscillator

/// Complex drive J(t) acting on a mode of frequency omega over [t_i, t_f].
struct DriveProfile {
  std::function<cplx(double)> J;
  double omega = 1.0;
  double t_i = 0.0;
  double t_f = 1.0;
  int panels = 64;
  int order = 16;

  double T() const { return t_f - t_i; }
};

inline DriveProfile no_drive(double omega, double t_i, double t_f) {
  return {[](double) { return cplx{}; }, omega, t_i, t_f, 1, 4};
}

namespace detail {

// int_{t_i}^{t_f} g(t) int_{t_i}^{t} h(t') dt' dt by panelled Gauss-Legendre.
template <class G, class H>
cplx nested_integral(const DriveProfile &d, G &&g, H &&h) {
  const auto &rule = quadrature::gauss_legendre(d.order);
  const double width = d.T() / d.panels;
  cplx outer = 0.0, cum = 0.0;
  for (int p = 0; p < d.panels; ++p) {
    const double lo = d.t_i + p * width;
    const double hi = lo + width;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double x = lo + 0.5 * width * (1.0 + rule.nodes[j]);
      cplx part = 0.0;
      const double hw = 0.5 * (x - lo);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        part += rule.weights[i] * h(lo + hw * (1.0 + rule.nodes[i]));
      outer += 0.5 * width * rule.weights[j] * g(x) * (cum + hw * part);
    }
    cum += quadrature::composite_gauss_legendre([&](double s) { return h(s); }, lo, hi, 1,
                                                d.order);
  }
  return outer;
}

template <class F>
cplx drive_integral(const DriveProfile &d, F &&f) {
  return quadrature::composite_gauss_legendre([&](double t) -> cplx { return f(t); }, d.t_i,
                                              d.t_f, d.panels, d.order);
}

inline void check_caustic(const DriveProfile &d) {
  const double s = std::sin(d.omega * d.T());
  if (std::abs(s) < 1e-12)
    throw CausticSingularity("omega T = " + std::to_string(d.omega * d.T()) +
                             " is a multiple of pi");
}

} // namespace detail

/// Drive overlaps beta_pm = (4w)^(-1/2) int e^{+-iw(t - t_i)} J(t) dt.
/// The starred quantities of the generating functional are
/// beta_pm^(*) = conj(beta_mp).
inline std::pair<cplx, cplx> beta_pm(const DriveProfile &d) {
  const double w = d.omega;
  const double norm = 1.0 / std::sqrt(4.0 * w);
  const cplx plus = detail::drive_integral(
      d, [&](double t) { return std::exp(cplx(0.0, w * (t - d.t_i))) * d.J(t); });
  const cplx minus = detail::drive_integral(
      d, [&](double t) { return std::exp(cplx(0.0, -w * (t - d.t_i))) * d.J(t); });
  return {norm * plus, norm * minus};
}

/// Classical action of the driven complex oscillator with A(t_i) = A_i and
/// A(t_f) = A_f: boundary block, block linear in J, and the bilinear block
///   -(1 / (w sin wT)) Re int dt J*(t) sin w(t_f - t) int_{t_i}^{t} dt' sin w(t' - t_i) J(t').
inline cplx classical_action(const DriveProfile &d, cplx A_i, cplx A_f) {
  detail::check_caustic(d);
  const double w = d.omega;
  const double T = d.T();
  const double s = std::sin(w * T);
  const double c = std::cos(w * T);
  auto sf = [&](double t) { return std::sin(w * (d.t_f - t)); };
  auto si = [&](double t) { return std::sin(w * (t - d.t_i)); };

  const double boundary =
      w / (2.0 * s) * ((std::norm(A_f) + std::norm(A_i)) * c - 2.0 * std::real(std::conj(A_f) * A_i));
  const cplx L1 = detail::drive_integral(d, [&](double t) { return si(t) * std::conj(d.J(t)); });
  const cplx L2 = detail::drive_integral(d, [&](double t) { return sf(t) * std::conj(d.J(t)); });
  const double linear = std::real(A_f * L1 + A_i * L2) / s;
  const cplx nested = detail::nested_integral(
      d, [&](double t) { return std::conj(d.J(t)) * sf(t); },
      [&](double t) { return si(t) * d.J(t); });
  const double bilinear = -std::real(nested) / (w * s);
  return boundary + linear + bilinear;
}

/// Transition kernel <A_f, t_f | A_i, t_i>_J = w / (4 pi i sin wT) exp(i S_cl).
inline cplx transition_kernel(const DriveProfile &d, cplx A_i, cplx A_f) {
  detail::check_caustic(d);
  const double w = d.omega;
  const cplx pref = w / (cplx(0.0, 4.0 * units::pi) * std::sin(w * d.T()));
  return pref * std::exp(cplx(0.0, 1.0) * classical_action(d, A_i, A_f));
}

/// Vacuum persistence amplitude G^J_00 = e^{-iwT} exp(E) with
///   E = -(1/4w) int int Re(J(t) J*(t')) e^{-iw|t - t'|} dt dt'.
/// The real part of E equals -(|beta_+|^2 + |beta_-|^2)/2. With
/// `full_phase = false` the imaginary part is dropped, leaving the
/// cos w(t - t') kernel alone.
inline cplx vacuum_persistence(const DriveProfile &d, bool full_phase = true) {
  const double w = d.omega;
  const auto [bp, bm] = beta_pm(d);
  double re = -0.5 * (std::norm(bp) + std::norm(bm));
  double im = 0.0;
  if (full_phase) {
    // Re(J(t) J*(t')) sin w(t - t') for t' < t, separated into sin/cos factors.
    const cplx a = detail::nested_integral(
        d, [&](double t) { return d.J(t) * std::sin(w * (t - d.t_i)); },
        [&](double t) { return std::conj(d.J(t)) * std::cos(w * (t - d.t_i)); });
    const cplx b = detail::nested_integral(
        d, [&](double t) { return d.J(t) * std::cos(w * (t - d.t_i)); },
        [&](double t) { return std::conj(d.J(t)) * std::sin(w * (t - d.t_i)); });
    im = std::real(a - b) / (2.0 * w);
  }
  return std::exp(cplx(re, im - w * d.T()));
}

/// Generating functional F(b, a)_J for displaced-Gaussian boundary states:
///   G^J_00 exp(-w(|b|^2 + |a|^2)/4) exp(g w (b a* + b* a)/4)
///     exp(i g sqrt(w/4)(b beta_+^(*) + b* beta_+)) exp(i sqrt(w/4)(a beta_-^(*) + a* beta_-)),
/// with g = e^{-iwT} and G^J_00 carrying the e^{-iwT} of the vacuum.
inline cplx generating_F_J(cplx b, cplx a, const DriveProfile &d) {
  const double w = d.omega;
  const cplx g = std::exp(cplx(0.0, -w * d.T()));
  const auto [bp, bm] = beta_pm(d);
  const cplx bp_s = std::conj(bm);
  const cplx bm_s = std::conj(bp);
  const double u = std::sqrt(w / 4.0);
  const cplx I(0.0, 1.0);
  const cplx expo = -0.25 * w * (std::norm(b) + std::norm(a)) +
                    g * 0.25 * w * (b * std::conj(a) + std::conj(b) * a) +
                    I * g * u * (b * bp_s + std::conj(b) * bp) +
                    I * u * (a * bm_s + std::conj(a) * bm);
  return vacuum_persistence(d) * std::exp(expo);
}

/// Fock-to-Fock driven amplitude
///   G^J_{mn<-pq} = G^J_00 (-1)^(m+q) e^{-i(m+n)wT} / sqrt(m! n! p! q!)
///     H_nq(i beta_+, -i beta_-^(*)) H_pm(i beta_-, -i beta_+^(*)).
inline cplx transition_G_J(int m, int n, int p, int q, const DriveProfile &d) {
  detail::check_order(m, n);
  detail::check_order(p, q);
  const auto [bp, bm] = beta_pm(d);
  const cplx I(0.0, 1.0);
  const cplx h1 = hermite_complex(n, q, I * bp, -I * std::conj(bp));
  const cplx h2 = hermite_complex(p, m, I * bm, -I * std::conj(bm));
  const double sign = ((m + q) % 2 == 0) ? 1.0 : -1.0;
  const double lognorm = -0.5 * (detail::log_factorial(m) + detail::log_factorial(n) +
                                 detail::log_factorial(p) + detail::log_factorial(q));
  const cplx phase = std::exp(cplx(0.0, -(m + n) * d.omega * d.T()));
  return vacuum_persistence(d) * sign * std::exp(lognorm) * phase * h1 * h2;
}

/// Sum over m, n <= cutoff of |G^J_{mn<-pq}|^2.
inline double fock_probability_sum(int p, int q, const DriveProfile &d, int cutoff = kMaxOrder) {
  const auto [bp, bm] = beta_pm(d);
  const double g00 = std::norm(vacuum_persistence(d, false));
  const cplx I(0.0, 1.0);
  double s = 0.0;
  for (int m = 0; m <= cutoff; ++m) {
    for (int n = 0; n <= cutoff; ++n) {
      const cplx h1 = hermite_complex(n, q, I * bp, -I * std::conj(bp));
      const cplx h2 = hermite_complex(p, m, I * bm, -I * std::conj(bm));
      const double lognorm = -(detail::log_factorial(m) + detail::log_factorial(n) +
                               detail::log_factorial(p) + detail::log_factorial(q));
      s += g00 * std::exp(lognorm) * std::norm(h1 * h2);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Self-test

struct CheckResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return error <= tolerance; }
};

/// Weak Gaussian drive used by the self-test: J(t) = j0 e^{-(t - tc)^2 / 2 s^2} e^{-i nu t}.
inline DriveProfile gaussian_drive(double omega, double t_i, double t_f, cplx j0, double nu,
                                   double width) {
  const double tc = 0.5 * (t_i + t_f);
  return {[=](double t) {
            const double x = (t - tc) / width;
            return j0 * std::exp(-0.5 * x * x) * std::exp(cplx(0.0, -nu * t));
          },
          omega, t_i, t_f, 64, 16};
}

/// Largest |H_{m+1,n} - (z1 H_mn - n H_{m,n-1})| over m, n <= nmax at integer arguments.
inline double hermite_recurrence_error(int nmax = 10) {
  double worst = 0.0;
  const cplx args[] = {{2.0, 1.0}, {-1.0, 3.0}, {0.0, -2.0}, {1.0, 1.0}};
  for (cplx x : args) {
    const cplx z1 = std::conj(x);
    for (int m = 0; m < nmax; ++m)
      for (int n = 0; n <= nmax; ++n) {
        const cplx rhs =
            z1 * hermite_complex(m, n, x) - (n > 0 ? double(n) * hermite_complex(m, n - 1, x) : cplx{});
        worst = std::max(worst, std::abs(hermite_complex(m + 1, n, x) - rhs));
      }
  }
  return worst;
}

/// Largest |<Psi_mn, Psi_pq> - delta| for m, n, p, q <= nmax, by tensor
/// Gauss-Hermite quadrature over d^2A = 2 dRe(A) dIm(A).
inline double orthonormality_error(double omega, int nmax = 4, int nodes = 48) {
  const auto &gh = quadrature::gauss_hermite(nodes);
  const double s = 1.0 / std::sqrt(omega);
  double worst = 0.0;
  for (int m = 0; m <= nmax; ++m)
    for (int n = 0; n <= nmax; ++n)
      for (int p = 0; p <= nmax; ++p)
        for (int q = 0; q <= nmax; ++q) {
          cplx acc = 0.0;
          for (std::size_t i = 0; i < gh.nodes.size(); ++i)
            for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
              const cplx A(s * gh.nodes[i], s * gh.nodes[j]);
              // Undo the exp(-w|A|^2) weight carried by the rule.
              const double unweight = std::exp(omega * std::norm(A));
              acc += gh.weights[i] * gh.weights[j] * unweight *
                     std::conj(wavefunctional(m, n, A, 0.0, omega)) *
                     wavefunctional(p, q, A, 0.0, omega);
            }
          acc *= 2.0 * s * s;
          const double target = (m == p && n == q) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(acc - target));
        }
  return worst;
}

/// F(b, a)_J by direct 4-D quadrature of int d^2A_f d^2A_i phi_b*(A_f) K phi_a(A_i).
inline cplx generating_F_J_bruteforce(cplx b, cplx a, const DriveProfile &d, int nodes = 40) {
  detail::check_caustic(d);
  const double w = d.omega;
  const double T = d.T();
  const double s = std::sin(w * T);
  const double c = std::cos(w * T);
  auto sf = [&](double t) { return std::sin(w * (d.t_f - t)); };
  auto si = [&](double t) { return std::sin(w * (t - d.t_i)); };
  const cplx L1 = detail::drive_integral(d, [&](double t) { return si(t) * std::conj(d.J(t)); });
  const cplx L2 = detail::drive_integral(d, [&](double t) { return sf(t) * std::conj(d.J(t)); });
  const cplx nested = detail::nested_integral(
      d, [&](double t) { return std::conj(d.J(t)) * sf(t); },
      [&](double t) { return si(t) * d.J(t); });
  const double bilinear = -std::real(nested) / (w * s);
  const cplx pref = w / (cplx(0.0, 4.0 * units::pi) * s);

  // Nodes for weight exp(-w|A - centre|^2 / 2) in each real coordinate.
  const auto &gh = quadrature::gauss_hermite(nodes);
  const double h = std::sqrt(2.0 / w);
  std::vector<double> xs(gh.nodes.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = h * gh.nodes[i];
  const double gauss_norm = w / units::two_pi; // phi_b* phi_a prefactors
  cplx acc = 0.0;
  for (std::size_t i1 = 0; i1 < xs.size(); ++i1)
    for (std::size_t i2 = 0; i2 < xs.size(); ++i2) {
      const cplx Af = b + cplx(xs[i1], xs[i2]);
      const double wf = gh.weights[i1] * gh.weights[i2];
      for (std::size_t j1 = 0; j1 < xs.size(); ++j1)
        for (std::size_t j2 = 0; j2 < xs.size(); ++j2) {
          const cplx Ai = a + cplx(xs[j1], xs[j2]);
          const double S = w / (2.0 * s) *
                               ((std::norm(Af) + std::norm(Ai)) * c -
                                2.0 * std::real(std::conj(Af) * Ai)) +
                           std::real(Af * L1 + Ai * L2) / s + bilinear;
          acc += wf * gh.weights[j1] * gh.weights[j2] * std::exp(cplx(0.0, S));
        }
    }
  // Each of the four real coordinates contributes a factor h from the
  // change of variables; d^2A = 2 dx dy on each side.
  return pref * gauss_norm * acc * std::pow(h, 4) * 4.0;
}

/// Cross-checks of the driven-oscillator machinery: Hermite recurrence,
/// wavefunctional orthonormality, the closed-form generating functional
/// against direct quadrature, and probability conservation under a weak drive.
inline std::vector<CheckResult> run_self_test() {
  std::vector<CheckResult> out;
  out.push_back({"hermite recurrence, m,n <= 10", hermite_recurrence_error(10), 0.0});
  out.push_back({"wavefunctional orthonormality, m,n,p,q <= 4", orthonormality_error(1.3), 1e-7});

  const double w = 1.0;
  const auto drive = gaussian_drive(w, 0.0, 0.5 * units::pi, {0.3, 0.1}, 1.0, 0.25);
  const cplx b(0.4, -0.2), a(-0.3, 0.5);
  const cplx closed = generating_F_J(b, a, drive);
  const cplx brute = generating_F_J_bruteforce(b, a, drive);
  out.push_back({"F(b,a)_J closed form vs 4-D quadrature", std::abs(closed - brute) / std::abs(brute),
                 1e-4});

  const auto weak = gaussian_drive(2.0, -4.0, 4.0, {0.2, 0.0}, 1.5, 1.0);
  out.push_back({"sum |G_mn<-00|^2 = 1, weak drive", std::abs(fock_probability_sum(0, 0, weak) - 1.0),
                 1e-6});
  return out;
}

} // namespace vacmix::states
