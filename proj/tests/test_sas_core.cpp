#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablefield/diagnostics.hpp"
#include "stablefield/sas_core.hpp"
#include "test_util.hpp"

using namespace stablefield;

namespace {

std::vector<double> draws(double alpha, double sigma, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  StableParams p(alpha, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = sample_sas(p, rng);
  return x;
}

}  // namespace

TEST(StableParams, RejectsOutOfRange) {
  EXPECT_THROW(StableParams(2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(StableParams(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(StableParams(1.0, -1.0), std::invalid_argument);
  EXPECT_NO_THROW(StableParams(1.99, 0.0));
}

TEST(SampleSas, ZeroScaleIsZero) {
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_sas(StableParams(1.2, 0.0), rng), 0.0);
}

TEST(SampleSas, CauchyKolmogorovDistance) {
  const auto x = draws(1.0, 1.0, 100000, 11);
  EXPECT_LT(testutil::ks_one_sample(x, [](double v) { return testutil::cauchy_cdf(v); }), 0.01);
}

TEST(SampleSas, CharacteristicFunction) {
  const auto x = draws(1.5, 2.0, 100000, 12);
  const auto m = testutil::cos_mean(x, 0.5);
  EXPECT_NEAR(m.mean, std::exp(-std::pow(2.0, 1.5) * std::pow(0.5, 1.5)), 3.0 * m.se);
}

TEST(SampleSas, CharacteristicFunctionGrid) {
  for (double alpha : {0.6, 1.0, 1.7}) {
    const auto x = draws(alpha, 1.0, 50000, 100 + static_cast<std::uint64_t>(alpha * 10));
    for (double theta : {0.3, 1.0, 2.5}) {
      const auto m = testutil::cos_mean(x, theta);
      EXPECT_NEAR(m.mean, std::exp(-std::pow(theta, alpha)), 4.0 * m.se + 1e-12)
          << "alpha=" << alpha << " theta=" << theta;
    }
  }
}

TEST(SamplePositiveStable, LaplaceTransform) {
  RandomStream rng(5);
  const double a = 0.6;
  const int n = 100000;
  for (double s : {0.5, 1.0, 2.0}) {
    double acc = 0.0, acc2 = 0.0;
    RandomStream r = rng.derive("s", static_cast<std::uint64_t>(s * 10));
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-s * sample_positive_stable(a, r));
      acc += e;
      acc2 += e * e;
    }
    const double m = acc / n, se = std::sqrt((acc2 / n - m * m) / n);
    EXPECT_NEAR(m, std::exp(-std::pow(s, a)), 3.0 * se);
  }
  EXPECT_THROW(sample_positive_stable(1.0, rng), std::invalid_argument);
}

TEST(SampleFrechet, ClosedFormCdf) {
  RandomStream rng(8);
  const double alpha = 1.4;
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_frechet(alpha, rng);
  EXPECT_LT(testutil::ks_one_sample(x, [&](double v) { return v <= 0 ? 0.0 : std::exp(-std::pow(v, -alpha)); }),
            0.01);
}

TEST(LpQuasiNorm, Examples) {
  const auto space = FiniteWeightedSpace::indexed({1.0, 1.0});
  const std::vector<double> ones{1.0, 1.0}, f34{3.0, 4.0};
  EXPECT_DOUBLE_EQ(lp_quasi_norm(ones, space, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(lp_quasi_norm(f34, space, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(lp_quasi_norm(ones, space, 0.5), 4.0);
  const std::vector<double> three{1.0, 2.0, 3.0};
  EXPECT_THROW(lp_quasi_norm(three, space, 1.0), std::invalid_argument);
}

TEST(LpQuasiNorm, Homogeneity) {
  RandomStream rng(2);
  const auto space = FiniteWeightedSpace::indexed({0.5, 2.0, 1.5});
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> f{rng.normal(), rng.normal(), rng.normal()};
    const double c = rng.uniform(-3.0, 3.0), alpha = rng.uniform(0.1, 1.9);
    std::vector<double> g = f;
    for (auto& v : g) v *= c;
    EXPECT_NEAR(lp_quasi_norm(g, space, alpha), std::abs(c) * lp_quasi_norm(f, space, alpha),
                1e-12 * (1 + lp_quasi_norm(g, space, alpha)));
  }
}

TEST(CombinationScale, Examples) {
  const auto space = FiniteWeightedSpace::indexed({1.0, 1.0});
  std::vector<SpectralTerm> one{{1.0, {1.0, 0.0}}};
  EXPECT_DOUBLE_EQ(combination_scale(one, space, 1.3), 1.0);
  std::vector<SpectralTerm> cancel{{1.0, {0.4, 0.9}}, {-1.0, {0.4, 0.9}}};
  EXPECT_DOUBLE_EQ(combination_scale(cancel, space, 1.3), 0.0);
  std::vector<SpectralTerm> two{{1.0, {1.0, 0.0}}, {1.0, {0.0, 1.0}}};
  EXPECT_NEAR(combination_scale(two, space, 0.8), std::pow(2.0, 1.0 / 0.8), 1e-14);
  EXPECT_THROW(combination_scale(std::vector<SpectralTerm>{}, space, 1.0), std::invalid_argument);
}

TEST(StableSeriesConstant, MatchesClosedForm) {
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.01, 1.2, 1.5, 1.8, 1.95}) {
    const double integral = std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0);
    EXPECT_NEAR(stable_series_constant(alpha), 1.0 / integral, 1e-8 / integral) << alpha;
  }
  EXPECT_NEAR(stable_series_constant(1.0), 2.0 / std::numbers::pi, 1e-10);
}

TEST(SimulateDiscreteIntegral, ZeroSpectralGivesZero) {
  RandomStream rng(3);
  const auto space = FiniteWeightedSpace::indexed({1.0, 2.0});
  const std::vector<double> zero{0.0, 0.0};
  const auto x = simulate_discrete_integral([&](const GroupElement&) { return zero; }, space, 1.1,
                                            LatticeWindow::cube(2, 3), rng);
  EXPECT_EQ(x.values.size(), 49u);
  for (double v : x.values) EXPECT_EQ(v, 0.0);
}

TEST(SimulateDiscreteIntegral, IndicatorGivesUnitScale) {
  const double alpha = 1.3;
  const auto space = FiniteWeightedSpace::indexed({1.0, 3.0});
  const std::vector<double> f{1.0, 0.0};
  std::vector<double> x0(20000);
  for (std::size_t k = 0; k < x0.size(); ++k) {
    RandomStream rng = RandomStream(4).derive("r", k);
    x0[k] = simulate_discrete_integral([&](const GroupElement&) { return f; }, space, alpha,
                                       LatticeWindow::cube(1, 0), rng)
                .values[0];
  }
  const auto m = testutil::cos_mean(x0, 1.0);
  EXPECT_NEAR(m.mean, std::exp(-1.0), 3.0 * m.se);
}

TEST(SimulateDiscreteIntegral, ScalesAddInAlphaPower) {
  const double alpha = 1.0;
  const auto space = FiniteWeightedSpace::indexed({1.0, 1.0});
  const std::vector<double> f{1.0, 1.0};
  std::vector<double> x0(20000);
  for (std::size_t k = 0; k < x0.size(); ++k) {
    RandomStream rng = RandomStream(5).derive("r", k);
    x0[k] = simulate_discrete_integral([&](const GroupElement&) { return f; }, space, alpha,
                                       LatticeWindow::cube(1, 0), rng)
                .values[0];
  }
  std::vector<SpectralTerm> t{{1.0, f}};
  EXPECT_NEAR(scale_fit(x0, alpha), combination_scale(t, space, alpha), 0.05 * 2.0);
}

TEST(SimulateSparseIntegral, AgreesWithDenseForm) {
  const double alpha = 1.5;
  const auto space = FiniteWeightedSpace::indexed({1.0, 2.0, 0.5});
  auto dense = [](const GroupElement& t) {
    return std::vector<double>{1.0 * t[0], 0.0, -2.0};
  };
  std::vector<SparseEntry> buf;
  auto sparse = [&](const GroupElement& t) -> const std::vector<SparseEntry>& {
    buf = {{0, 1.0 * t[0]}, {2, -2.0}};
    return buf;
  };
  RandomStream r1(9), r2(9);
  const auto win = LatticeWindow::cube(1, 4);
  const auto a = simulate_discrete_integral(dense, space, alpha, win, r1);
  const auto b = simulate_sparse_integral(sparse, space.weights(), alpha, win, r2);
  EXPECT_EQ(a.values, b.values);
}

namespace {

double lepage_x0(double alpha, double mass, std::size_t J, std::uint64_t seed) {
  RandomStream rng(seed);
  struct One {
    double operator()(const GroupElement&, int) const { return 1.0; }
  };
  return simulate_lepage_integral([](RandomStream&) { return 0; }, One{}, LePageConfig{J, mass},
                                  alpha, LatticeWindow::cube(1, 0), rng)
      .values[0];
}

}  // namespace

TEST(SimulateLepageIntegral, ZeroKernelGivesZero) {
  RandomStream rng(1);
  struct Zero {
    double operator()(const GroupElement&, int) const { return 0.0; }
  };
  const auto x = simulate_lepage_integral([](RandomStream&) { return 0; }, Zero{},
                                          LePageConfig{50, 1.0}, 0.9, LatticeWindow::cube(1, 5), rng);
  for (double v : x.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(x.meta.truncation, 50u);
  EXPECT_THROW(simulate_lepage_integral([](RandomStream&) { return 0; }, Zero{}, LePageConfig{0, 1.0},
                                        0.9, LatticeWindow::cube(1, 5), rng),
               std::invalid_argument);
}

TEST(SimulateLepageIntegral, UnitMassGivesUnitScale) {
  const double alpha = 0.7;
  std::vector<double> x(10000);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = lepage_x0(alpha, 1.0, 10000, 1000 + k);
  EXPECT_NEAR(scale_fit(x, alpha), 1.0, 0.05);
}

TEST(SimulateLepageIntegral, DoublingMassScalesByPower) {
  const double alpha = 0.7;
  std::vector<double> x1(10000), x2(10000);
  for (std::size_t k = 0; k < x1.size(); ++k) {
    x1[k] = lepage_x0(alpha, 1.0, 2000, 5000 + k);
    x2[k] = lepage_x0(alpha, 2.0, 2000, 50000 + k);
  }
  const double ratio = scale_fit(x2, alpha) / scale_fit(x1, alpha);
  EXPECT_NEAR(ratio, std::pow(2.0, 1.0 / alpha), 0.05 * std::pow(2.0, 1.0 / alpha));
}

TEST(SimulateFrechetExtremal, StandardFrechetAtOneAtom) {
  const double alpha = 1.2;
  const auto space = FiniteWeightedSpace::indexed({1.0});
  const std::vector<double> f{1.0};
  std::vector<double> x(100000);
  for (std::size_t k = 0; k < x.size(); ++k) {
    RandomStream rng = RandomStream(6).derive("r", k);
    x[k] = simulate_frechet_extremal([&](const GroupElement&) { return f; }, space, alpha,
                                     LatticeWindow::cube(1, 0), rng)
               .values[0];
  }
  EXPECT_LT(testutil::ks_one_sample(x, [&](double v) { return v <= 0 ? 0.0 : std::exp(-std::pow(v, -alpha)); }),
            0.01);
}

TEST(SimulateFrechetExtremal, TwoAtomsScaleByPower) {
  const double alpha = 1.2;
  const auto space = FiniteWeightedSpace::indexed({1.0, 1.0});
  const std::vector<double> f{1.0, 1.0};
  std::vector<double> x(40000);
  for (std::size_t k = 0; k < x.size(); ++k) {
    RandomStream rng = RandomStream(7).derive("r", k);
    x[k] = simulate_frechet_extremal([&](const GroupElement&) { return f; }, space, alpha,
                                     LatticeWindow::cube(1, 0), rng)
               .values[0];
  }
  // Median of scale * Frechet is scale * (ln 2)^{-1/alpha}.
  std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
  const double expected = std::pow(2.0, 1.0 / alpha) * std::pow(std::log(2.0), -1.0 / alpha);
  EXPECT_NEAR(x[x.size() / 2], expected, 0.03 * expected);
  const std::vector<double> zero{0.0, 0.0};
  RandomStream rng(1);
  const auto z = simulate_frechet_extremal([&](const GroupElement&) { return zero; }, space, alpha,
                                           LatticeWindow::cube(1, 3), rng);
  for (double v : z.values) EXPECT_EQ(v, 0.0);
}

TEST(FieldRealization, SeedReproducesBitwise) {
  const auto space = FiniteWeightedSpace::indexed({1.0, 2.0});
  auto f = [](const GroupElement& t) { return std::vector<double>{1.0, 0.5 * t[0]}; };
  RandomStream a = RandomStream(77).derive("realization", 2), b = RandomStream(77).derive("realization", 2);
  const auto x = simulate_discrete_integral(f, space, 1.3, LatticeWindow::cube(1, 10), a);
  const auto y = simulate_discrete_integral(f, space, 1.3, LatticeWindow::cube(1, 10), b);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(x.meta.seed, 77u);
  EXPECT_EQ(x.meta.stream, "root/realization/2");
}

TEST(FiniteWeightedSpace, Validation) {
  EXPECT_THROW(FiniteWeightedSpace({"a", "a"}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(FiniteWeightedSpace({"a"}, {0.0}), std::invalid_argument);
  EXPECT_THROW(FiniteWeightedSpace({"a", "b"}, {1.0}), std::invalid_argument);
  const FiniteWeightedSpace s({"a", "b"}, {1.0, 2.5});
  EXPECT_DOUBLE_EQ(s.total_mass(), 3.5);
  EXPECT_EQ(s.find("b"), 1u);
  EXPECT_FALSE(s.find("z").has_value());
}
