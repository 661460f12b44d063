#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qdcqed/geometry.hpp"

using namespace qdcqed;

namespace {
CavityGeometry reference() {
  return {.d_um = 2.0, .V_um3 = 50.0, .R_l = 0.99, .R_r = 0.99, .alpha = 1e-5,
          .M_debye = 30.0, .omega_qd_eV = 1.3};
}
}  // namespace

// Golden values below come from a direct SI evaluation of the loss and coupling
// expressions (CODATA 2018 constants, d and V in m / m^3, result times hbar in ueV).
TEST(Geometry, TotalLossGolden) {
  EXPECT_NEAR(total_loss(reference()), 62.61828203696989, 1e-9);
}

TEST(Geometry, InternalLossGolden) {
  EXPECT_NEAR(internal_loss(reference()), 0.12398419843320027, 1e-12);
}

TEST(Geometry, ExternalLossIsDifference) {
  EXPECT_NEAR(external_loss(reference()), 62.49429783853669, 1e-9);
}

TEST(Geometry, CouplingGolden) {
  auto g = reference();
  g.V_um3 = 0.3;
  EXPECT_NEAR(coupling_strength(g), 123.6707632050751, 1e-9);
}

TEST(Geometry, PerfectMirrorsLoseNothing) {
  auto g = reference();
  g.R_l = g.R_r = 1.0;
  EXPECT_EQ(total_loss(g), 0.0);
}

TEST(Geometry, ZeroAlphaMeansNoInternalLoss) {
  auto g = reference();
  g.alpha = 0.0;
  EXPECT_EQ(internal_loss(g), 0.0);
  EXPECT_EQ(external_loss(g), total_loss(g));
}

TEST(Geometry, InternalLossLinearInAlpha) {
  auto g = reference();
  const double k1 = internal_loss(g);
  g.alpha *= 2;
  EXPECT_NEAR(internal_loss(g) / k1, 2.0, 1e-14);
}

TEST(Geometry, UnphysicalInternalLossIsAnError) {
  auto g = reference();
  g.alpha = 1.0;  // kappa_in ~ 1.2e4 ueV > kappa
  EXPECT_GT(internal_loss(g), total_loss(g));
  EXPECT_THROW(external_loss(g), ParamError);
}

TEST(Geometry, DoublingVolumeHalvesLoss) {
  auto g = reference();
  const double k = total_loss(g);
  g.V_um3 *= 2;
  EXPECT_NEAR(total_loss(g) / k, 0.5, 1e-14);
}

TEST(Geometry, ScalingLaws) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> vol(0.1, 500.0), dia(0.5, 10.0), om(0.5, 3.0);
  for (int i = 0; i < 100; ++i) {
    auto a = reference();
    a.V_um3 = vol(rng);
    a.d_um = dia(rng);
    a.omega_qd_eV = om(rng);
    auto b = a;
    b.V_um3 = vol(rng);
    const double vr = a.V_um3 / b.V_um3;
    EXPECT_NEAR(total_loss(b) / total_loss(a), vr, 1e-12 * vr);
    EXPECT_NEAR(internal_loss(b) / internal_loss(a), vr, 1e-12 * vr);
    EXPECT_NEAR(coupling_strength(a) / coupling_strength(b), std::sqrt(b.V_um3 / a.V_um3),
                1e-12 * std::sqrt(b.V_um3 / a.V_um3));
    // g^2 V independent of V
    const double ga = coupling_strength(a), gb = coupling_strength(b);
    EXPECT_NEAR(ga * ga * a.V_um3 / (gb * gb * b.V_um3), 1.0, 1e-12);

    auto c = a;
    c.d_um = dia(rng);
    const double dr = (c.d_um / a.d_um) * (c.d_um / a.d_um);
    EXPECT_NEAR(total_loss(c) / total_loss(a), dr, 1e-12 * dr);
    EXPECT_NEAR(internal_loss(c) / internal_loss(a), dr, 1e-12 * dr);

    auto w = a;
    w.omega_qd_eV = 2.0 * a.omega_qd_eV;
    EXPECT_NEAR(coupling_strength(w) / coupling_strength(a), std::sqrt(2.0), 1e-12);
  }
}

TEST(Geometry, LossDecreasesWithReflectivityProduct) {
  auto g = reference();
  double prev = std::numeric_limits<double>::infinity();
  for (double r = 0.05; r <= 1.0; r += 0.05) {
    g.R_l = g.R_r = r;
    const double k = total_loss(g);
    EXPECT_LT(k, prev);
    prev = k;
  }
}

TEST(Geometry, InvariantsEnforced) {
  auto g = reference();
  g.R_l = 0.0;
  EXPECT_THROW(total_loss(g), ParamError);
  g = reference();
  g.R_r = 1.2;
  EXPECT_THROW(total_loss(g), ParamError);
  g = reference();
  g.V_um3 = -1;
  EXPECT_THROW(coupling_strength(g), ParamError);
  g = reference();
  g.alpha = -1e-3;
  EXPECT_THROW(internal_loss(g), ParamError);
}

TEST(Geometry, LowReflectivityWarns) {
  auto g = reference();
  EXPECT_TRUE(geometry_warnings(g).empty());
  g.R_l = 0.3;
  const auto w = geometry_warnings(g);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("reflectivity"), std::string::npos);
  EXPECT_NO_THROW(total_loss(g));
}
