#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdcqed/dephasing.hpp"
#include "qdcqed/rates.hpp"

using namespace qdcqed;

namespace {

constexpr double g0 = 50.0;

SystemParams fig5(double gamma_star, double delta, double pump = 0.0) {
  return {.g = g0, .gamma = 1.0, .gamma_star = gamma_star, .kappa_in = 5.0,
          .kappa_out = 245.0, .delta = delta, .pump = pump};
}

// Direct evaluation of the transfer-rate expression, written independently.
double rate_oracle(double g, double gamma, double gs, double kappa, double delta, double P) {
  const double Gamma = P + gamma + gs + kappa;
  return 4.0 * g * g * Gamma / (Gamma * Gamma + 4.0 * delta * delta);
}

SystemParams random_params(std::mt19937_64& rng, bool with_pump) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p;
  p.g = 200.0 * u(rng);
  p.gamma = 0.01 + 20.0 * u(rng);
  p.gamma_star = 5000.0 * u(rng);
  p.kappa_in = 100.0 * u(rng);
  p.kappa_out = 0.1 + 1000.0 * u(rng);
  p.delta = 2000.0 * (u(rng) - 0.5);
  p.pump = with_pump ? 300.0 * u(rng) : 0.0;
  return p;
}

}  // namespace

TEST(EffectiveRate, DetunedReferenceValue) {
  EXPECT_NEAR(effective_rate(fig5(220, 500)), 3.8548387228780174, 1e-12);
  EXPECT_NEAR(effective_rate(fig5(220, 500)), 3.85, 0.005);
}

TEST(EffectiveRate, ResonantReferenceValue) {
  EXPECT_NEAR(effective_rate(fig5(220, 0)), 10000.0 / 471.0, 1e-12);
}

TEST(EffectiveRate, ZeroCoupling) {
  auto p = fig5(220, 500);
  p.g = 0;
  EXPECT_EQ(effective_rate(p), 0.0);
}

TEST(EffectiveRate, MatchesOracleOnRandomDraws) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_params(rng, true);
    const double ref = rate_oracle(p.g, p.gamma, p.gamma_star, p.kappa(), p.delta, p.pump);
    EXPECT_NEAR(effective_rate(p), ref, 1e-12 * std::max(1.0, ref));
  }
}

TEST(EffectiveRate, EvenInDetuningAndDecreasingInMagnitude) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    auto p = random_params(rng, true);
    p.g = 1.0 + p.g;
    auto q = p;
    q.delta = -p.delta;
    EXPECT_EQ(effective_rate(p), effective_rate(q));
    auto r = p;
    r.delta = std::abs(p.delta) + 1.0;
    EXPECT_LT(effective_rate(r), effective_rate(p));
  }
}

TEST(EffectiveRate, ResonantRateDecreasesInEachDamping) {
  for (double P = 0; P <= 300; P += 25)
    for (double gs = 0; gs <= 1000; gs += 100)
      for (double k = 10; k <= 500; k += 70) {
        SystemParams p{.g = 50, .gamma = 1, .gamma_star = gs, .kappa_in = 0, .kappa_out = k,
                       .delta = 0, .pump = P};
        const double R = effective_rate(p);
        auto a = p;
        a.pump += 1e-3;
        auto b = p;
        b.gamma_star += 1e-3;
        auto c = p;
        c.kappa_out += 1e-3;
        EXPECT_LT(effective_rate(a), R);
        EXPECT_LT(effective_rate(b), R);
        EXPECT_LT(effective_rate(c), R);
      }
}

TEST(EffectiveRate, TemperatureCrossover) {
  const auto table = builtin_ingaas();
  const double gs50 = gamma_star_at(table, 50), gs100 = gamma_star_at(table, 100);
  const double r50 = effective_rate(fig5(gs50, 500)), r100 = effective_rate(fig5(gs100, 500));
  EXPECT_NEAR(r50, 2.682816422524226, 1e-12);
  EXPECT_NEAR(r100, 3.8548387228780174, 1e-12);
  EXPECT_GT(r100, r50);
  EXPECT_LT(effective_rate(fig5(gs100, 0)), effective_rate(fig5(gs50, 0)));
}

TEST(EffectiveRate, PumpEffect) {
  EXPECT_NEAR(effective_rate(fig5(40, 500, 100)), 3.391503546333056, 1e-12);
  EXPECT_NEAR(effective_rate(fig5(40, 0, 0)), 34.36426116838488, 1e-12);
  EXPECT_NEAR(effective_rate(fig5(40, 0, 100)), 25.575447570332482, 1e-12);
  EXPECT_GT(effective_rate(fig5(40, 500, 100)), effective_rate(fig5(40, 500, 0)));
  EXPECT_LT(effective_rate(fig5(40, 0, 100)), effective_rate(fig5(40, 0, 0)));
}

TEST(Efficiency, NoOutCoupling) {
  SystemParams p{.g = 50, .gamma = 1, .gamma_star = 40, .kappa_in = 5, .kappa_out = 0};
  EXPECT_EQ(efficiency(p), 0.0);
}

TEST(Efficiency, HalfWhenLossesBalanced) {
  SystemParams p{.g = 50, .gamma = 0.5, .gamma_star = 40, .kappa_in = 2.5, .kappa_out = 2.5};
  // R = 10000/45.5, x = R (1/5 + 2), E = x / (2 (1 + x))
  EXPECT_NEAR(efficiency(p), 0.49896804336485906, 1e-12);
  EXPECT_GT(efficiency(p), 0.495);
  EXPECT_LT(efficiency(p), 0.5);
}

TEST(Efficiency, BoundsAndMonotonicity) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const auto p = random_params(rng, true);
    const double R = effective_rate(p);
    const double E = efficiency(p);
    EXPECT_GE(E, 0.0);
    EXPECT_LT(E, 1.0);
    EXPECT_EQ(E, efficiency_with_rate(p, R));
    if (R > 0) {
      EXPECT_GT(efficiency_with_rate(p, R * 1.01), E);
    }
    // more out-coupling at fixed total kappa
    if (p.kappa_in > 1e-3) {
      auto q = p;
      q.kappa_in -= 1e-3;
      q.kappa_out += 1e-3;
      EXPECT_GT(efficiency(q), E);
    }
  }
}

TEST(Purcell, EqualsRateOverGammaWithoutPump) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_params(rng, false);
    const double ratio = effective_rate(p) / p.gamma;
    EXPECT_NEAR(purcell_factor(p), ratio, 1e-12 * std::max(ratio, 1e-300));
  }
}

TEST(Purcell, ResonantNoDephasingClosedForm) {
  SystemParams p{.g = 50, .gamma = 1, .gamma_star = 0, .kappa_in = 5, .kappa_out = 245};
  // Eq. form includes gamma in the denominator: 4 g^2 / (gamma (kappa + gamma))
  EXPECT_NEAR(purcell_factor(p), 1e4 / 251.0, 1e-12);
}

TEST(Purcell, TextbookFormIsSmallGammaLimit) {
  // 4 g^2 / (kappa gamma) differs from the delta = 0, gamma* = 0 value by gamma / (kappa + gamma).
  for (double gamma : {0.5, 1.0, 1.5, 1e-3}) {
    SystemParams p{.g = 50, .gamma = gamma, .gamma_star = 0, .kappa_in = 5, .kappa_out = 245};
    const double textbook = 4 * 50.0 * 50.0 / (p.kappa() * gamma);
    EXPECT_NEAR(1.0 - purcell_factor(p) / textbook, gamma / (p.kappa() + gamma), 1e-12);
  }
}

TEST(Purcell, DetunedReferenceValue) {
  EXPECT_NEAR(purcell_factor(fig5(220, 500)), 3.8548387228780174, 1e-12);
}

TEST(Purcell, IgnoresPump) {
  EXPECT_EQ(purcell_factor(fig5(40, 500, 100)), purcell_factor(fig5(40, 500, 0)));
}

TEST(Purcell, GammaScaling) {
  auto p = fig5(220, 500);
  auto q = p;
  q.gamma = 2 * p.gamma;
  const double d_old = p.kappa() + p.gamma + p.gamma_star;
  const double d_new = q.kappa() + q.gamma + q.gamma_star;
  const double expected = purcell_factor(p) / 2.0 * rate_oracle(50, 0, 0, d_new, 500, 0) /
                          rate_oracle(50, 0, 0, d_old, 500, 0);
  EXPECT_NEAR(purcell_factor(q), expected, 1e-12);
  EXPECT_LT(purcell_factor(q), purcell_factor(p));
}

TEST(Optimum, ExactMaximum) {
  const auto o = optimal_gamma_star(fig5(220, 500));
  EXPECT_DOUBLE_EQ(o.r_max_exact, 5.0);
  ASSERT_TRUE(o.gamma_star_opt.has_value());
  EXPECT_DOUBLE_EQ(*o.gamma_star_opt, 749.0);
  ASSERT_TRUE(o.gamma_star_approx.has_value());
  EXPECT_DOUBLE_EQ(*o.gamma_star_approx, 249.0);
  EXPECT_NEAR(o.r_max_approx, 4.0, 1e-12);  // 4 g^2 / (5 |delta|)
  EXPECT_NEAR(effective_rate([] { auto p = fig5(749, 500); return p; }()), 5.0, 1e-12);
}

TEST(Optimum, ZeroDetuningIsAnError) {
  EXPECT_THROW(optimal_gamma_star(fig5(220, 0)), DomainError);
  EXPECT_THROW(purcell_max(fig5(220, 0)), DomainError);
}

TEST(Optimum, NegativeOptimumNotReported) {
  auto p = fig5(0, 50);  // 2|delta| = 100 < kappa
  const auto o = optimal_gamma_star(p);
  EXPECT_FALSE(o.gamma_star_opt.has_value());
  EXPECT_DOUBLE_EQ(o.r_max_exact, 50.0);
}

TEST(Optimum, GridArgmaxWithinOneStep) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    SystemParams p{.g = 10 + 100 * u(rng), .gamma = 0.1 + 5 * u(rng), .gamma_star = 0,
                   .kappa_in = 5, .kappa_out = 50 + 200 * u(rng), .delta = 300 + 1000 * u(rng)};
    if (u(rng) < 0.5) p.delta = -p.delta;
    const auto o = optimal_gamma_star(p);
    ASSERT_TRUE(o.gamma_star_opt.has_value());
    const double step = 0.01;
    double best = -1, arg = 0;
    for (double gs = 0; gs <= 4 * std::abs(p.delta); gs += step) {
      p.gamma_star = gs;
      const double R = effective_rate(p);
      if (R > best) {
        best = R;
        arg = gs;
      }
    }
    EXPECT_LE(std::abs(arg - *o.gamma_star_opt), step);
    EXPECT_NEAR(best, o.r_max_exact, 1e-9 * o.r_max_exact);
  }
}

TEST(PurcellMax, Values) {
  auto p = fig5(220, 500);
  EXPECT_DOUBLE_EQ(purcell_max(p), 5.0);
  p.gamma = 0.5;
  EXPECT_DOUBLE_EQ(purcell_max(p), 10.0);
  p.delta = 1e6;
  EXPECT_LT(purcell_max(p), 1e-2);
}

TEST(PurcellMax, BoundsPurcellOverDephasing) {
  auto p = fig5(0, 500);
  const double fmax = purcell_max(p);
  for (double gs = 0; gs < 5000; gs += 0.5) {
    p.gamma_star = gs;
    EXPECT_LE(purcell_factor(p), fmax * (1 + 1e-12));
  }
}

TEST(QualityFactors, Values) {
  auto p = fig5(220, 0);
  const auto q = quality_factors(p, 1.3e6, 1.3e6);
  EXPECT_NEAR(q.Q_qd, 1.3e6 / 221.0, 1e-9);
  EXPECT_NEAR(q.Q_qd, 5882.35, 0.005);
  EXPECT_NEAR(q.Q_c, 1.3e6 / 250.0, 1e-9);
  EXPECT_NEAR(1 / q.Q_eff, 1 / q.Q_qd + 1 / q.Q_c, 1e-15);
}

TEST(QualityFactors, HarmonicMeanSymmetry) {
  SystemParams p{.g = 50, .gamma = 100, .gamma_star = 150, .kappa_in = 50, .kappa_out = 200};
  const auto q = quality_factors(p, 1e6, 1e6);
  EXPECT_DOUBLE_EQ(q.Q_qd, q.Q_c);
  EXPECT_DOUBLE_EQ(q.Q_eff, q.Q_qd / 2);
}

TEST(QualityFactors, DecreasingInDephasing) {
  auto p = fig5(0, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (double gs = 0; gs < 1e5; gs = gs * 1.5 + 1) {
    p.gamma_star = gs;
    const double q = quality_factors(p, 1.3e6, 1.3e6).Q_eff;
    EXPECT_LT(q, prev);
    prev = q;
  }
  EXPECT_THROW(quality_factors(p, 0.0, 1.0), DomainError);
}

namespace {
Eigen::Vector2d expm_oracle(const SystemParams& p, double R, double ne0, double nph0, double t) {
  Eigen::Matrix2d A;
  A << -(p.gamma + R), R, R, -(p.kappa() + R);
  const Eigen::Matrix2d E = (A * t).exp();
  return E * Eigen::Vector2d(ne0, nph0);
}
}  // namespace

TEST(RateEquations, DecoupledDecay) {
  auto p = fig5(220, 0);
  p.g = 0;
  const std::vector<double> t{0, 0.01, 0.1, 1.0};
  const auto s = rate_equation_solution(p, 0.7, 0.2, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(s.n_e[i], 0.7 * std::exp(-p.gamma * t[i]), 1e-14);
    EXPECT_NEAR(s.n_ph[i], 0.2 * std::exp(-p.kappa() * t[i]), 1e-14);
  }
  EXPECT_DOUBLE_EQ(s.eigenrate_slow, 1.0);
  EXPECT_DOUBLE_EQ(s.eigenrate_fast, 250.0);
}

TEST(RateEquations, InitialConditions) {
  const std::vector<double> t{0.0};
  const auto s = rate_equation_solution(fig5(220, 0), 0.3, 1.5, t);
  EXPECT_DOUBLE_EQ(s.n_e[0], 0.3);
  EXPECT_DOUBLE_EQ(s.n_ph[0], 1.5);
}

TEST(RateEquations, ConfluentCase) {
  SystemParams p{.g = 0, .gamma = 3, .gamma_star = 0, .kappa_in = 0, .kappa_out = 3};
  const std::vector<double> t{0.0, 0.5, 2.0};
  const auto s = rate_equation_solution(p, 1.0, 0.5, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(s.n_e[i], std::exp(-3 * t[i]), 1e-15);
    EXPECT_NEAR(s.n_ph[i], 0.5 * std::exp(-3 * t[i]), 1e-15);
  }
}

TEST(RateEquations, ReferencePointMatchesMatrixExponential) {
  const auto p = fig5(220, 0);
  const std::vector<double> t{0.05, 3.0};
  const auto s = rate_equation_solution(p, 1.0, 0.0, t);
  // frozen from an independent matrix-exponential evaluation
  EXPECT_NEAR(s.n_e[0], 0.35741986, 1e-8);
  EXPECT_NEAR(s.n_ph[0], 0.03025752, 1e-8);
  EXPECT_NEAR(s.n_e[1], 2.36427365e-27, 1e-10);
  const double R = effective_rate(p);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto ref = expm_oracle(p, R, 1.0, 0.0, t[i]);
    EXPECT_NEAR(s.n_e[i], ref(0), 1e-10);
    EXPECT_NEAR(s.n_ph[i], ref(1), 1e-10);
  }
}

TEST(RateEquations, RandomDrawsMatchMatrixExponential) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_params(rng, false);
    const double R = effective_rate(p);
    const double ne0 = u(rng), nph0 = 3 * u(rng);
    std::vector<double> t;
    for (int i = 0; i < 20; ++i) t.push_back(5.0 * u(rng) / p.gamma);
    const auto s = rate_equation_solution(p, ne0, nph0, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto ref = expm_oracle(p, R, ne0, nph0, t[i]);
      EXPECT_NEAR(s.n_e[i], ref(0), 1e-10);
      EXPECT_NEAR(s.n_ph[i], ref(1), 1e-10);
    }
  }
}

TEST(RateEquations, TotalPopulationBalance) {
  const auto p = fig5(220, 0);
  const double h = 1e-5;
  for (double t0 = 0.001; t0 < 1.0; t0 += 0.0371) {
    const std::vector<double> t{t0 - 2 * h, t0 - h, t0, t0 + h, t0 + 2 * h};
    const auto s = rate_equation_solution(p, 1.0, 0.0, t);
    std::vector<double> tot(5);
    for (int i = 0; i < 5; ++i) tot[i] = s.n_e[i] + s.n_ph[i];
    const double deriv = (tot[0] - 8 * tot[1] + 8 * tot[3] - tot[4]) / (12 * h);
    EXPECT_NEAR(deriv, -p.gamma * s.n_e[2] - p.kappa() * s.n_ph[2], 1e-8);
  }
}

TEST(RateEquations, DecaysToZero) {
  const std::vector<double> t{100.0};
  const auto s = rate_equation_solution(fig5(220, 500), 1.0, 0.5, t);
  EXPECT_LT(s.n_e[0], 1e-100);
  EXPECT_LT(s.n_ph[0], 1e-100);
}

TEST(RateEquations, Preconditions) {
  const std::vector<double> t{0.0};
  EXPECT_THROW(rate_equation_solution(fig5(220, 0, 10), 1.0, 0.0, t), DomainError);
  EXPECT_THROW(rate_equation_solution(fig5(220, 0), 1.5, 0.0, t), DomainError);
  EXPECT_THROW(rate_equation_solution(fig5(220, 0), 0.5, -1.0, t), DomainError);
}
