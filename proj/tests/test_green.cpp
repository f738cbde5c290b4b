#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"

using namespace vacmix;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j)
    t[j] = a + (b - a) * (j + 0.5) / n;
  return t;
}

} // namespace

TEST(Green, StaticFormSolvesBoundaryProblem) {
  // Away from t', d^2 G / dt^2 = -Omega^2 G; G vanishes at both ends; the slope jumps by -1.
  const double O = 1.3, ti = -2.0, tf = 3.1, tp = 0.4, h = 1e-4;
  auto G = [&](double t) { return green_static(O, ti, tf, t, tp); };
  for (double t : {-1.5, -0.3, 1.2, 2.6}) {
    const double d2 = (G(t + h) - 2 * G(t) + G(t - h)) / (h * h);
    EXPECT_NEAR(d2, -O * O * G(t), 1e-5);
  }
  EXPECT_NEAR(G(ti), 0.0, 1e-15);
  EXPECT_NEAR(G(tf), 0.0, 1e-15);
  const double jump = (G(tp + 2 * h) - G(tp + h)) / h - (G(tp - h) - G(tp - 2 * h)) / h;
  EXPECT_NEAR(jump, -1.0, 1e-3);
}

TEST(Green, StaticThrowsAtHalfPeriodWindow) {
  EXPECT_THROW(green_static(1.0, 0.0, M_PI, 0.5, 1.0), WronskianSingular);
}

TEST(Green, OracleWithoutModulationIsStatic) {
  GreenProblem p{1.1, [](double) { return 0.0; }, -4.0, 5.0};
  const auto t = grid(-4.0, 5.0, 40);
  for (const auto &s : exact_green_oracle(p, 0.7, t)) {
    EXPECT_EQ(s.deviation, 0.0);
    EXPECT_NEAR(s.exact, green_static(1.1, -4.0, 5.0, s.t, 0.7), 1e-15);
  }
}

TEST(Green, OracleMatchesShiftedStaticForConstantPerturbation) {
  // q = c shifts Omega^2, so the exact answer is the static form at sqrt(Omega^2 + c).
  const double O = 1.0, ti = -6.0, tf = 6.5, tp = 1.1;
  const auto t = grid(ti, tf, 50);
  for (double c : {1e-6, 1e-3, 0.05}) {
    GreenProblem p{O, [=](double) { return c; }, ti, tf};
    const double Oc = std::sqrt(O * O + c);
    for (const auto &s : exact_green_oracle(p, tp, t)) {
      const double want = green_static(Oc, ti, tf, s.t, tp) - green_static(O, ti, tf, s.t, tp);
      EXPECT_NEAR(s.deviation, want, 1e-9 * std::abs(want) + 1e-14 * c) << "c " << c;
    }
  }
}

TEST(Green, OracleIsSymmetric) {
  const auto p = single_tone_problem(1.0, 0.05, 1.7, 2.0, -8.0, 7.4);
  const double a = -1.3, b = 2.2;
  const double ab = exact_green_oracle(p, b, {a})[0].exact;
  const double ba = exact_green_oracle(p, a, {b})[0].exact;
  EXPECT_NEAR(ab, ba, 1e-11);
}

TEST(Green, CallableFormMatchesProblemForm) {
  const auto p = single_tone_problem(1.0, 0.02, 2.0, 3.0, -12.0, 11.7);
  const auto t = grid(-12.0, 11.7, 30);
  const auto a = exact_green_oracle(p, 0.3, t);
  // Omega^2(t_i) differs from Omega0^2 only by the far tail of the envelope.
  const auto b = exact_green_oracle([&](double s) { return 1.0 + p.q(s); }, -12.0, 11.7, 0.3, t);
  for (std::size_t j = 0; j < t.size(); ++j)
    EXPECT_NEAR(a[j].exact, b[j].exact, 1e-10);
}

TEST(Green, OracleRejectsSourceOutsideWindow) {
  const auto p = single_tone_problem(1.0, 0.01, 2.0, 1.0, -5.0, 5.3);
  EXPECT_THROW(exact_green_oracle(p, 6.0, {0.0}), std::invalid_argument);
}

TEST(Green, FirstOrderMatchesDerivativeOfShiftedStatic) {
  const double O = 1.0, ti = -5.0, tf = 5.6, tp = -0.8, c = 1e-3;
  GreenProblem p{O, [=](double) { return c; }, ti, tf};
  const auto t = grid(ti, tf, 25);
  const auto ser = green_series(p, tp, t);
  const double h = 1e-5;
  for (const auto &s : ser) {
    const double d = (green_static(std::sqrt(O * O + h), ti, tf, s.t, tp) -
                      green_static(std::sqrt(O * O - h), ti, tf, s.t, tp)) /
                     (2 * h);
    EXPECT_NEAR(s.d1, c * d, 1e-8 * std::abs(c * d) + 1e-12);
  }
}

TEST(Green, SeriesResidualIsThirdOrder) {
  const auto t = grid(-9.0, 9.8, 60);
  std::vector<double> eps{1e-4, 1e-3, 1e-2}, err;
  for (double e : eps) {
    const auto p = single_tone_problem(1.0, e, 2.1, 2.5, -9.0, 9.8);
    const auto ex = exact_green_oracle(p, 0.45, t);
    const auto se = green_series(p, 0.45, t);
    double sup = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j)
      sup = std::max(sup, std::abs(ex[j].deviation - se[j].d1 - se[j].d2));
    err.push_back(sup);
  }
  EXPECT_NEAR(fixtures::loglog_slope(eps, err), 3.0, 0.1);
}

TEST(Green, SusceptibilityIsRetarded) {
  const auto m = fused_silica();
  const std::vector<double> t{-0.5, -0.01, 0.02, 0.3, 1.0};
  const auto chi = susceptibility_chi(m, t);
  EXPECT_EQ(chi[0], 0.0);
  EXPECT_EQ(chi[1], 0.0);
  for (std::size_t j = 2; j < t.size(); ++j) {
    double want = 0.0;
    for (const auto &r : m.resonances())
      want += r.g * r.g * r.omega_res * std::sin(r.omega_res * t[j]);
    EXPECT_NEAR(chi[j], want, 1e-4 * std::abs(want) + 1e-6);
  }
}
