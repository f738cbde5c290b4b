#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vacmix/errors.hpp"

namespace vacmix::quadrature {

/// Nodes and weights of a fixed Gaussian rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the
// three-term recurrence. `mu0` is the integral of the weight function.
inline Rule golub_welsch(const std::vector<double> &offdiag, double mu0) {
  const auto n = static_cast<Eigen::Index>(offdiag.size() + 1);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    jacobi(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
    jacobi(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

template <class Make>
const Rule &cached(std::map<int, std::unique_ptr<Rule>> &cache, std::mutex &mu,
                   int n, Make make) {
  std::lock_guard lock(mu);
  auto &slot = cache[n];
  if (!slot)
    slot = std::make_unique<Rule>(make(n));
  return *slot;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1].
inline const Rule &gauss_legendre(int n) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return detail::cached(cache, mu, n, [](int m) {
    std::vector<double> b(static_cast<std::size_t>(m - 1));
    for (int k = 1; k < m; ++k)
      b[static_cast<std::size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
    return detail::golub_welsch(b, 2.0);
  });
}

/// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
inline const Rule &gauss_hermite(int n) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return detail::cached(cache, mu, n, [](int m) {
    std::vector<double> b(static_cast<std::size_t>(m - 1));
    for (int k = 1; k < m; ++k)
      b[static_cast<std::size_t>(k - 1)] = std::sqrt(0.5 * k);
    return detail::golub_welsch(b, std::sqrt(M_PI));
  });
}

/// Composite Gauss-Legendre over [a, b] split into `panels` equal pieces.
/// Works for any result type that supports `+=` and scalar multiplication.
template <class F>
auto composite_gauss_legendre(F &&f, double a, double b, int panels, int order = 12) {
  const Rule &rule = gauss_legendre(order);
  using R = decltype(f(a));
  R sum{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    R part{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      part += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    sum += 0.5 * h * part;
  }
  return sum;
}

/// Closed intervals, merged where they overlap.
inline std::vector<std::pair<double, double>>
merge_intervals(std::vector<std::pair<double, double>> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<double, double>> out;
  for (const auto &s : spans) {
    if (!out.empty() && s.first <= out.back().second)
      out.back().second = std::max(out.back().second, s.second);
    else
      out.push_back(s);
  }
  return out;
}

/// Result of an adaptive integration.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (G15/K31) over a union of windows. Converged when
/// the summed error estimate is below max(rel_tol |value|, abs_floor).
template <class F>
Estimate adaptive_over_windows(F &&f, const std::vector<std::pair<double, double>> &windows,
                               double rel_tol, double abs_floor, const std::string &what) {
  using boost::math::quadrature::gauss_kronrod;
  Estimate total;
  for (const auto &[a, b] : windows) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol * 1e-2, &err);
    total.value += v;
    total.error += err;
  }
  if (!(total.error <= std::max(rel_tol * std::abs(total.value), abs_floor)) ||
      !std::isfinite(total.value))
    throw QuadratureNotConverged(what + ": error estimate " + std::to_string(total.error) +
                                 " exceeds tolerance for value " + std::to_string(total.value));
  return total;
}

} // namespace vacmix::quadrature
