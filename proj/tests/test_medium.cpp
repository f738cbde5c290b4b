#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vacmix/medium.hpp"
#include "vacmix/units.hpp"

using namespace vacmix;

namespace {

// Sellmeier in wavelength form, written out independently of the library.
double sellmeier_n(double lambda) {
  const double B[] = {0.6961663, 0.4079426, 0.8974794};
  const double L[] = {0.0684043, 0.1162414, 9.896161};
  double n2 = 1.0;
  for (int i = 0; i < 3; ++i)
    n2 += B[i] * lambda * lambda / (lambda * lambda - L[i] * L[i]);
  return std::sqrt(n2);
}

} // namespace

TEST(Medium, FusedSilicaIsAscending) {
  const auto m = fused_silica();
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.branch_count(), 4u);
  EXPECT_LT(m[0].omega_res, m[1].omega_res);
  EXPECT_LT(m[1].omega_res, m[2].omega_res);
  EXPECT_NEAR(m[0].sellmeier_lambda_um(), 9.896161, 1e-12);
  EXPECT_NEAR(m[1].sellmeier_B(), 0.4079426, 1e-12);
  EXPECT_NEAR(m[1].sellmeier_lambda_um(), 0.1162414, 1e-12);
}

TEST(Medium, IndexMatchesWavelengthFormSellmeier) {
  const auto m = fused_silica();
  for (double lam : {0.25, 0.4, 0.5876, 0.65, 1.064, 1.55, 2.5}) {
    EXPECT_NEAR(refractive_index(m, units::omega_from_lambda(lam)), sellmeier_n(lam), 1e-13)
        << "lambda " << lam;
  }
}

TEST(Medium, FusedSilicaSodiumDLine) {
  // Catalogue value n_d = 1.4585 for fused silica.
  EXPECT_NEAR(refractive_index(fused_silica(), units::omega_from_lambda(0.5876)), 1.4585, 1e-4);
}

TEST(Medium, DispersionVanishesOnLightLine) {
  const auto m = fused_silica();
  const double w = units::omega_from_lambda(0.8);
  const double k = w * refractive_index(m, w);
  EXPECT_NEAR(dispersion_D(m, k, w), 0.0, 1e-12 * k * k);
}

TEST(Medium, PoleThrows) {
  const auto m = fused_silica();
  EXPECT_THROW(n_squared(m, m[1].omega_res), PoleAtResonance);
  EXPECT_THROW(delta_epsilon_per_eps(m, 0, m[0].omega_res), PoleAtResonance);
}

TEST(Medium, StopBandIndexThrows) {
  const auto m = fused_silica();
  const double inside = m[0].omega_res * 1.01;
  ASSERT_LT(n_squared(m, inside), 0.0);
  EXPECT_THROW(refractive_index(m, inside), NumericError);
}

TEST(Medium, DeltaNMatchesFiniteDifferenceOfShiftedResonance) {
  const auto m = fused_silica();
  const double w = units::omega_from_lambda(0.65);
  const double h = 1e-6;
  auto shifted = [&](double eps) {
    std::vector<Resonance> rs(m.resonances().begin(), m.resonances().end());
    rs[1].omega_res *= std::sqrt(1.0 + eps);
    return refractive_index(MediumSpec("shifted", rs), w);
  };
  const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
  const std::vector<double> unit{0.0, 1.0, 0.0};
  EXPECT_NEAR(delta_n(m, w, unit), fd, 1e-7 * std::abs(fd));
}

TEST(Medium, EpsForDeltaNInverts) {
  const auto m = fused_silica();
  for (double dn : {1e-4, 1e-3, -2e-3}) {
    const double eps = eps_for_delta_n(m, 1, 0.65, dn);
    const std::vector<double> v{0.0, eps, 0.0};
    EXPECT_NEAR(delta_n(m, units::omega_from_lambda(0.65), v), dn, 1e-15);
  }
}

TEST(Medium, PositiveIndexShiftNeedsLoweredResonance) {
  EXPECT_LT(eps_for_delta_n(fused_silica(), 1, 0.65, 1e-3), 0.0);
}

TEST(Medium, DeltaEpsilonIsLinear) {
  const auto m = fused_silica();
  const double w = 3.0;
  const std::vector<double> a{0.1, 0.2, 0.0}, b{0.0, -0.05, 0.3}, ab{0.1, 0.15, 0.3};
  EXPECT_NEAR(delta_epsilon(m, w, a) + delta_epsilon(m, w, b), delta_epsilon(m, w, ab), 1e-15);
  EXPECT_THROW(delta_epsilon(m, w, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Medium, RejectsBadResonances) {
  EXPECT_THROW(MediumSpec("x", {}), std::invalid_argument);
  EXPECT_THROW(MediumSpec("x", {{2.0, 1.0}, {1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(MediumSpec("x", {{-1.0, 1.0}}), std::invalid_argument);
  EXPECT_NO_THROW(MediumSpec::sorted("x", {{2.0, 1.0}, {1.0, 1.0}}));
}

TEST(Units, FemtosecondsToLightMicrons) {
  EXPECT_DOUBLE_EQ(units::fs_to_um(1.0), 0.299792458);
  EXPECT_NEAR(units::um_to_fs(units::fs_to_um(42.0)), 42.0, 1e-12);
  EXPECT_NEAR(units::lambda_from_omega(units::omega_from_lambda(0.65)), 0.65, 1e-15);
}
