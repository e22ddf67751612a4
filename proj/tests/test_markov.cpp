#include <gtest/gtest.h>

#include <cmath>

#include "stablefield/markov.hpp"

using namespace stablefield;
using namespace stablefield::markov;

namespace {

FiniteMatrix two_state() { return {{"s0", "s1"}, {{0.5, 0.5}, {0.25, 0.75}}}; }

/// Detailed-balance weights pi_k = prod_{i<k} p_i / q_{i+1}, pi_0 = 1.
double bd_weight(const BirthDeath& bd, std::int64_t k) {
  double w = 1.0;
  for (std::int64_t i = 0; i < k; ++i) w *= bd.p(i) / bd.q(i + 1);
  return w;
}

}  // namespace

TEST(Validate, RejectsBadRows) {
  EXPECT_THROW(validate(FiniteMatrix{{"a", "b"}, {{0.5, 0.4}, {0.5, 0.5}}}), std::invalid_argument);
  EXPECT_THROW(validate(FiniteMatrix{{"a"}, {{-0.1}}}), std::invalid_argument);
  EXPECT_THROW(validate(FiniteMatrix{{"a", "a"}, {{1, 0}, {0, 1}}}), std::invalid_argument);
  EXPECT_THROW(validate(SimpleRandomWalk{1.2}), std::invalid_argument);
  EXPECT_NO_THROW(validate(two_state()));
}

TEST(CommunicationClasses, BlockDiagonalGivesTwoClasses) {
  FiniteMatrix m{{"a", "b", "c", "d"},
                 {{0.5, 0.5, 0, 0}, {0.5, 0.5, 0, 0}, {0, 0, 0.1, 0.9}, {0, 0, 1.0, 0}}};
  const auto cs = communication_classes(m);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].id, 1u);
  EXPECT_EQ(cs[1].id, 2u);
  EXPECT_EQ(cs[0].states.size() + cs[1].states.size(), 4u);
}

TEST(CommunicationClasses, RandomWalkIsOneInfiniteClass) {
  const auto cs = communication_classes(SimpleRandomWalk{0.5});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_TRUE(cs[0].infinite);
  EXPECT_EQ(cs[0].period, 2u);
}

TEST(CommunicationClasses, TransientStateIsRejected) {
  FiniteMatrix m{{"a", "b", "c", "d", "e"},
                 {{0.2, 0.3, 0.5, 0, 0},
                  {0, 0.5, 0.5, 0, 0},
                  {0, 0, 0, 1, 0},
                  {0, 0, 0, 0, 1},
                  {0, 0, 1, 0, 0}}};
  try {
    communication_classes(m);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("transient class"), std::string::npos);
  }
}

TEST(CommunicationClasses, PeriodOfCycleAndLazyChain) {
  FiniteMatrix cycle{{"a", "b", "c"}, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}};
  EXPECT_EQ(communication_classes(cycle)[0].period, 3u);
  EXPECT_EQ(communication_classes(two_state())[0].period, 1u);
}

TEST(ClassifyRecurrence, Examples) {
  const auto finite = communication_classes(two_state())[0];
  EXPECT_EQ(classify_recurrence(finite, two_state()), RecurrenceType::PositiveRecurrent);
  const SimpleRandomWalk sym{0.5}, drift{0.6};
  EXPECT_EQ(classify_recurrence(communication_classes(sym)[0], sym), RecurrenceType::NullRecurrent);
  EXPECT_EQ(classify_recurrence(communication_classes(drift)[0], drift), RecurrenceType::Transient);
}

TEST(ClassifyRecurrence, BirthDeathTails) {
  const BirthDeath pos{{}, {}, 0.3, 0.5}, null{{}, {}, 0.4, 0.4}, trans{{}, {}, 0.5, 0.3};
  EXPECT_EQ(classify_recurrence(communication_classes(pos)[0], pos), RecurrenceType::PositiveRecurrent);
  EXPECT_EQ(classify_recurrence(communication_classes(null)[0], null), RecurrenceType::NullRecurrent);
  EXPECT_EQ(classify_recurrence(communication_classes(trans)[0], trans), RecurrenceType::Transient);
}

TEST(InvariantMeasure, TwoStateAnchored) {
  const auto spec = two_state();
  const auto cls = communication_classes(spec)[0];
  const auto pi = invariant_measure(cls, spec);
  EXPECT_NEAR(pi.weight(0), 1.0, 1e-14);
  EXPECT_NEAR(pi.weight(1), 2.0, 1e-12);
  EXPECT_NEAR(pi.total_mass(), 3.0, 1e-12);
}

TEST(InvariantMeasure, SelfLoopAndCounting) {
  const FiniteMatrix one{{"x"}, {{1.0}}};
  const auto pi1 = invariant_measure(communication_classes(one)[0], one);
  EXPECT_DOUBLE_EQ(pi1.weight(0), 1.0);
  EXPECT_DOUBLE_EQ(pi1.total_mass(), 1.0);
  const SimpleRandomWalk w{0.5};
  const auto pi = invariant_measure(communication_classes(w)[0], w);
  for (std::int64_t k = -5; k <= 5; ++k) EXPECT_DOUBLE_EQ(pi.weight(k), 1.0);
  EXPECT_TRUE(std::isinf(pi.total_mass()));
}

TEST(InvariantMeasure, BirthDeathDetailedBalance) {
  const BirthDeath bd{{0.6, 0.2}, {0.0, 0.3}, 0.3, 0.5};
  const auto cls = communication_classes(bd)[0];
  const auto pi = invariant_measure(cls, bd);
  const double anchor = bd_weight(bd, cls.anchor);
  double total = 0.0;
  for (std::int64_t k = 0; k < 400; ++k) {
    const double w = bd_weight(bd, k) / anchor;
    total += w;
    if (k < 30) {
      EXPECT_NEAR(pi.weight(k), w, 1e-12 * std::max(1.0, w)) << k;
    }
  }
  EXPECT_NEAR(pi.total_mass(), total, 1e-10 * total);
}

TEST(InvariantMeasure, FiniteIsInvariantProperty) {
  RandomStream rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.below(5);
    FiniteMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.states.push_back("s" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(n);
      double s = 0.0;
      for (auto& v : row) s += (v = 0.05 + rng.uniform());
      for (auto& v : row) v /= s;
      double fix = 1.0;
      for (std::size_t j = 0; j + 1 < n; ++j) fix -= row[j];
      row[n - 1] = fix;
      m.P.push_back(row);
    }
    const auto cls = communication_classes(m)[0];
    const auto pi = invariant_measure(cls, m);
    for (std::size_t j = 0; j < n; ++j) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) lhs += pi.weight(static_cast<std::int64_t>(i)) * m.P[i][j];
      EXPECT_NEAR(lhs, pi.weight(static_cast<std::int64_t>(j)), 1e-10);
    }
    EXPECT_DOUBLE_EQ(pi.weight(cls.anchor), 1.0);
  }
}

TEST(SampleTwoSidedPath, SingleStateIsConstant) {
  const FiniteMatrix one{{"x"}, {{1.0}}};
  const auto cls = communication_classes(one)[0];
  const auto pi = invariant_measure(cls, one);
  RandomStream rng(1);
  const auto s = sample_two_sided_path(cls, one, 5, pi, truncation_set(cls, one, pi), rng);
  EXPECT_DOUBLE_EQ(s.truncated_mass, 1.0);
  EXPECT_EQ(s.path.states, std::vector<std::int64_t>(11, 0));
}

TEST(SampleTwoSidedPath, OriginFollowsNormalisedMeasure) {
  const auto spec = two_state();
  const auto cls = communication_classes(spec)[0];
  const auto pi = invariant_measure(cls, spec);
  PathSampler sampler(cls, spec, pi, truncation_set(cls, spec, pi));
  RandomStream rng(2);
  const int n = 100000;
  int ones = 0, ones_far = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = sampler.sample(-3, 3, rng);
    ones += x.at(0) == 1;
    ones_far += x.at(-3) == 1;
  }
  const double se = std::sqrt(2.0 / 9.0 / n);
  EXPECT_NEAR(static_cast<double>(ones) / n, 2.0 / 3.0, 3 * se);
  // Stationarity: x(-3) has the same law.
  EXPECT_NEAR(static_cast<double>(ones_far) / n, 2.0 / 3.0, 3 * se);
}

TEST(SampleTwoSidedPath, SymmetricKernelIsItsOwnReversal) {
  const FiniteMatrix m{{"a", "b", "c"}, {{0.2, 0.5, 0.3}, {0.5, 0.1, 0.4}, {0.3, 0.4, 0.3}}};
  const auto cls = communication_classes(m)[0];
  const auto pi = invariant_measure(cls, m);
  PathSampler sampler(cls, m, pi, truncation_set(cls, m, pi));
  for (std::int64_t j = 0; j < 3; ++j)
    for (std::int64_t k = 0; k < 3; ++k)
      EXPECT_NEAR(sampler.backward_probability(j, k), m.P[j][k], 1e-15);
}

TEST(SampleTwoSidedPath, ReversedKernelMatchesTimeReversal) {
  // Non-reversible 3-cycle with holding: the reversed kernel differs from P.
  const FiniteMatrix m{{"a", "b", "c"}, {{0.2, 0.8, 0.0}, {0.0, 0.2, 0.8}, {0.8, 0.0, 0.2}}};
  const auto cls = communication_classes(m)[0];
  const auto pi = invariant_measure(cls, m);
  PathSampler sampler(cls, m, pi, truncation_set(cls, m, pi));
  EXPECT_NEAR(sampler.backward_probability(1, 0), 0.8, 1e-14);
  EXPECT_NEAR(sampler.backward_probability(0, 1), 0.0, 1e-14);
}

TEST(SampleTwoSidedPath, RandomWalkStepsAreUnit) {
  const SimpleRandomWalk w{0.5};
  const auto cls = communication_classes(w)[0];
  const auto pi = invariant_measure(cls, w);
  const auto F = truncation_set(cls, w, pi, 10);
  EXPECT_EQ(F.states.size(), 21u);
  EXPECT_DOUBLE_EQ(F.mass(), 21.0);
  RandomStream rng(4);
  const auto s = sample_two_sided_path(cls, w, 20, pi, F, rng);
  EXPECT_DOUBLE_EQ(s.truncated_mass, 21.0);
  for (std::int64_t u = -20; u < 20; ++u) EXPECT_EQ(std::abs(s.path.at(u + 1) - s.path.at(u)), 1);
  EXPECT_THROW(s.path.at(21), DomainError);
}

TEST(MarkovFieldKernel, Values) {
  const MarkovChain chain({two_state(), SimpleRandomWalk{0.5}});
  const double alpha = 1.3;
  const auto f = markov_field_kernel(chain.classes(), alpha);
  PathSegment at_anchor{1, -1, {1, chain.cls(1).anchor, 1}};
  EXPECT_DOUBLE_EQ(f(at_anchor), std::pow(2.0, -1.0 / alpha));
  PathSegment off{1, -1, {0, 1, 0}};
  EXPECT_EQ(f(off), 0.0);
  PathSegment walk{2, 0, {chain.cls(2).anchor}};
  EXPECT_DOUBLE_EQ(f(walk), std::pow(2.0, -2.0 / alpha));
  double total = 0.0;
  for (const auto& c : chain.classes()) total += f.class_mass(c.id);
  EXPECT_DOUBLE_EQ(total, 0.75);
  EXPECT_LT(total, 1.0);
}

TEST(MarkovChain, AnchorOverrides) {
  const MarkovChain chain({two_state()}, {{1, 1}});
  EXPECT_EQ(chain.cls(1).anchor, 1);
  const auto pi = invariant_measure(chain.cls(1), chain.spec_of(chain.cls(1)));
  EXPECT_NEAR(pi.weight(1), 1.0, 1e-14);
  EXPECT_NEAR(pi.weight(0), 0.5, 1e-12);
  EXPECT_THROW(MarkovChain({two_state()}, {{1, 7}}), std::invalid_argument);
  EXPECT_THROW(MarkovChain({two_state()}, {{3, 0}}), std::invalid_argument);
  EXPECT_EQ(chain.state_label(chain.cls(1), 1), "s1");
}
