#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fixtures.hpp"

using namespace vacmix;
using namespace vacmix::states;

TEST(Hermite, LowOrdersArePowers) {
  const cplx z1(0.3, -1.2), z2(2.0, 0.5);
  EXPECT_EQ(hermite_complex(0, 0, z1, z2), cplx(1.0));
  EXPECT_LT(std::abs(hermite_complex(3, 0, z1, z2) - z1 * z1 * z1), 1e-14);
  EXPECT_LT(std::abs(hermite_complex(1, 1, z1, z2) - (z1 * z2 - 1.0)), 1e-14);
}

TEST(Hermite, DiagonalArgumentIsAssociatedLaguerre) {
  // H_mn(x*, x) = (-1)^n n! x*^(m-n) L_n^(m-n)(|x|^2) for m >= n.
  for (cplx x : {cplx(0.4, 0.9), cplx(-1.5, 0.2), cplx(2.0, -2.0)})
    for (int m = 0; m <= 8; ++m)
      for (int n = 0; n <= m; ++n) {
        const cplx want = std::pow(-1.0, n) * std::tgamma(n + 1.0) *
                          std::pow(std::conj(x), m - n) *
                          std::assoc_laguerre(n, m - n, std::norm(x));
        const cplx got = hermite_complex(m, n, x);
        EXPECT_LT(std::abs(got - want), 1e-10 * (1.0 + std::abs(want))) << m << "," << n;
      }
}

TEST(Hermite, SwapConjugates) {
  const cplx x(0.7, -0.4);
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n)
      EXPECT_LT(std::abs(hermite_complex(n, m, x) - std::conj(hermite_complex(m, n, x))), 1e-12);
}

TEST(Hermite, RecurrenceExact) { EXPECT_EQ(hermite_recurrence_error(10), 0.0); }

TEST(Hermite, OrderLimit) { EXPECT_THROW(hermite_complex(kMaxOrder + 1, 0, cplx(1.0)), OrderTooLarge); }

TEST(Wavefunctional, Orthonormal) { EXPECT_LT(orthonormality_error(1.3, 4, 48), 1e-7); }

TEST(Wavefunctional, CoherentExpansionRebuildsDisplacedGaussian) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.6);
  const double w = 1.4;
  for (int trial = 0; trial < 10; ++trial) {
    const cplx a(g(rng), g(rng)), A(g(rng), g(rng));
    cplx sum = 0.0;
    for (int m = 0; m <= 40; ++m)
      for (int n = 0; n <= 40; ++n)
        sum += coherent_expansion_coeff(m, n, a, w) * wavefunctional(n, m, A, 0.0, w);
    EXPECT_LT(std::abs(sum - displaced_gaussian(a, A, w)), 1e-8);
  }
}

TEST(Wavefunctional, CoherentWeightsSumToOne) {
  const cplx a(0.8, -1.1);
  const double w = 2.0;
  double s = 0.0;
  for (int m = 0; m <= kMaxOrder; ++m)
    for (int n = 0; n <= kMaxOrder; ++n)
      s += std::norm(coherent_expansion_coeff(m, n, a, w));
  // sum |psi|^2 = exp(-w|a|^2/2) exp(w|a|^2/2)
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(coherent_expansion_coeff(0, 0, 0.0, w), cplx(1.0));
  EXPECT_EQ(coherent_expansion_coeff(1, 0, 0.0, w), cplx(0.0));
}

TEST(Drive, FockAmplitudesResumToGeneratingFunctional) {
  const auto d = gaussian_drive(1.0, 0.0, 0.5 * M_PI, {0.3, 0.1}, 1.0, 0.25);
  const cplx b(0.4, -0.2), a(-0.3, 0.5);
  const int N = 14;
  cplx sum = 0.0;
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= N; ++n)
      for (int p = 0; p <= N; ++p)
        for (int q = 0; q <= N; ++q)
          sum += std::conj(coherent_expansion_coeff(m, n, b, d.omega)) *
                 coherent_expansion_coeff(p, q, a, d.omega) * transition_G_J(m, n, p, q, d);
  EXPECT_LT(std::abs(sum - generating_F_J(b, a, d)), 1e-10);
}

TEST(Drive, NoDriveKeepsFockStates) {
  const auto d = no_drive(1.1, 0.0, 2.3);
  EXPECT_LT(std::abs(vacuum_persistence(d) - std::exp(cplx(0.0, -1.1 * 2.3))), 1e-14);
  EXPECT_NEAR(std::abs(transition_G_J(2, 1, 2, 1, d)), 1.0, 1e-14);
  EXPECT_EQ(std::abs(transition_G_J(1, 1, 2, 1, d)), 0.0);
}

TEST(Drive, PersistenceModulusFromBetas) {
  const auto d = gaussian_drive(2.0, -4.0, 4.0, {0.3, 0.2}, 1.1, 0.8);
  const auto [bp, bm] = beta_pm(d);
  EXPECT_NEAR(std::abs(vacuum_persistence(d)), std::exp(-0.5 * (std::norm(bp) + std::norm(bm))),
              1e-14);
  EXPECT_NEAR(std::abs(vacuum_persistence(d, false)), std::abs(vacuum_persistence(d)), 1e-14);
}

TEST(Drive, ProbabilitiesConserved) {
  const auto weak = gaussian_drive(2.0, -4.0, 4.0, {0.2, 0.0}, 1.5, 1.0);
  EXPECT_GT(1.0 - std::norm(vacuum_persistence(weak)), 1e-3);
  EXPECT_NEAR(fock_probability_sum(0, 0, weak), 1.0, 1e-6);
  const auto strong = gaussian_drive(1.0, -6.0, 6.0, {1.0, 0.5}, 0.8, 1.2);
  EXPECT_NEAR(fock_probability_sum(1, 2, strong), 1.0, 1e-6);
}

TEST(Drive, VacuumOutcomesFactorize) {
  // From vacuum the two quanta counts are independent Poisson variables.
  const auto d = gaussian_drive(1.5, -5.0, 5.0, {0.6, -0.3}, 1.2, 1.0);
  auto P = [&](int m, int n) { return std::norm(transition_G_J(m, n, 0, 0, d)); };
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n)
      EXPECT_NEAR(P(m, n) * P(0, 0), P(m, 0) * P(0, n), 1e-12);
  EXPECT_NEAR(P(2, 0) / P(1, 0), 0.5 * P(1, 0) / P(0, 0), 1e-12);
}

TEST(Drive, GeneratingFunctionalMatchesDirectIntegral) {
  const auto d = gaussian_drive(1.0, 0.0, 0.5 * M_PI, {0.3, 0.1}, 1.0, 0.25);
  const cplx b(0.4, -0.2), a(-0.3, 0.5);
  const cplx closed = generating_F_J(b, a, d);
  EXPECT_LT(std::abs(closed - generating_F_J_bruteforce(b, a, d)), 1e-4 * std::abs(closed));
}

TEST(Drive, KernelSingularAtFullPeriod) {
  const auto d = gaussian_drive(1.0, 0.0, M_PI, {0.1, 0.0}, 1.0, 0.3);
  EXPECT_THROW(transition_kernel(d, 0.1, 0.2), CausticSingularity);
}

TEST(SelfTest, AllChecksPass) {
  for (const auto &r : run_self_test())
    EXPECT_TRUE(r.pass()) << r.name << ": " << r.error << " > " << r.tolerance;
}
