#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "vacmix/vacmix.hpp"

namespace fixtures {

/// Default run: fused silica, resonance 1 driven at Omega/5 and Omega/6, tau = 42 fs.
inline vacmix::RunConfig default_run() { return vacmix::parse_config(nlohmann::json()); }

inline std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j)
    v[j] = lo * std::pow(hi / lo, j / double(n - 1));
  return v;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::log(x[j]), b = std::log(y[j]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Random lossless medium with 1..3 resonances spread over two decades.
inline vacmix::MediumSpec random_medium(std::mt19937_64 &rng, int n_res) {
  std::uniform_real_distribution<double> lo(-1.0, 2.0), gg(0.05, 1.5);
  std::vector<vacmix::Resonance> rs;
  for (int i = 0; i < n_res; ++i) {
    const double O = std::pow(10.0, lo(rng));
    rs.push_back({O, gg(rng) * O});
  }
  return vacmix::MediumSpec::sorted("random", rs);
}

} // namespace fixtures
