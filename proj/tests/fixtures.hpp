#ifndef STABLEFIELD_TESTS_FIXTURES_HPP
#define STABLEFIELD_TESTS_FIXTURES_HPP

// Hand-labelled families shared by the unit and acceptance tests. Expected
// verdicts and factor types are written out by hand from the recurrence
// type of each class (positive recurrent -> II1, null recurrent -> II_inf).

#include <string>
#include <vector>

#include "stablefield/classifier.hpp"

namespace fixtures {

using namespace stablefield;
using markov::BirthDeath;
using markov::FiniteMatrix;
using markov::SimpleRandomWalk;
using markov::TransitionSpec;

struct MarkovFixture {
  std::string name;
  std::vector<TransitionSpec> blocks;
  VerdictKind verdict;
  std::vector<FactorType> types;  // one per class, in class-id order
};

inline FiniteMatrix lazy_pair() { return {{"a", "b"}, {{0.5, 0.5}, {0.25, 0.75}}}; }
inline FiniteMatrix triple() {
  return {{"x", "y", "z"}, {{0.2, 0.5, 0.3}, {0.4, 0.2, 0.4}, {0.3, 0.3, 0.4}}};
}
inline FiniteMatrix split_blocks() {
  return {{"p", "q", "r", "s"},
          {{0.3, 0.7, 0, 0}, {0.6, 0.4, 0, 0}, {0, 0, 0.5, 0.5}, {0, 0, 0.9, 0.1}}};
}
inline FiniteMatrix bipartite() {
  // Period 2 but branching.
  return {{"u1", "u2", "v1", "v2"},
          {{0, 0, 0.5, 0.5}, {0, 0, 0.2, 0.8}, {0.6, 0.4, 0, 0}, {0.1, 0.9, 0, 0}}};
}
inline FiniteMatrix five() {
  return {{"k1", "k2", "k3", "k4", "k5"},
          {{0.1, 0.2, 0.3, 0.2, 0.2},
           {0.3, 0.1, 0.1, 0.4, 0.1},
           {0.2, 0.2, 0.2, 0.2, 0.2},
           {0.0, 0.5, 0.0, 0.0, 0.5},
           {0.25, 0.25, 0.25, 0.0, 0.25}}};
}
inline BirthDeath bd_positive() { return {{}, {}, 0.3, 0.5}; }
inline BirthDeath bd_positive_head() { return {{0.9, 0.7, 0.6}, {0.0, 0.05, 0.1}, 0.2, 0.6}; }
inline BirthDeath bd_null() { return {{}, {}, 0.4, 0.4}; }
inline BirthDeath bd_null_head() { return {{0.8, 0.1}, {0.0, 0.3}, 0.45, 0.45}; }
inline BirthDeath bd_null_periodic() { return {{1.0}, {0.0}, 0.5, 0.5}; }

inline std::vector<MarkovFixture> markov_matrix() {
  using V = VerdictKind;
  const auto P = FactorType::II1, N = FactorType::IIInfinity;
  return {
      {"finite-pair", {lazy_pair()}, V::CompletelyNonErgodic, {P}},
      {"finite-triple", {triple()}, V::CompletelyNonErgodic, {P}},
      {"two-finite-blocks", {lazy_pair(), triple()}, V::CompletelyNonErgodic, {P, P}},
      {"one-matrix-two-classes", {split_blocks()}, V::CompletelyNonErgodic, {P, P}},
      {"srw-half", {SimpleRandomWalk{0.5}}, V::ErgodicWeaklyMixing, {N}},
      {"bd-null", {bd_null()}, V::ErgodicWeaklyMixing, {N}},
      {"bd-null-head", {bd_null_head()}, V::ErgodicWeaklyMixing, {N}},
      {"bd-positive", {bd_positive()}, V::CompletelyNonErgodic, {P}},
      {"bd-positive-head", {bd_positive_head()}, V::CompletelyNonErgodic, {P}},
      {"finite+srw", {lazy_pair(), SimpleRandomWalk{0.5}}, V::MixedErgodicity, {P, N}},
      {"finite+bd-null", {triple(), bd_null()}, V::MixedErgodicity, {P, N}},
      {"bd-positive+srw", {bd_positive(), SimpleRandomWalk{0.5}}, V::MixedErgodicity, {P, N}},
      {"bd-positive+bd-null", {bd_positive_head(), bd_null_head()}, V::MixedErgodicity, {P, N}},
      {"srw+bd-null", {SimpleRandomWalk{0.5}, bd_null()}, V::ErgodicWeaklyMixing, {N, N}},
      {"bd-positive+finite", {bd_positive(), split_blocks()}, V::CompletelyNonErgodic, {P, P, P}},
      {"finite+bd-positive+srw", {lazy_pair(), bd_positive(), SimpleRandomWalk{0.5}},
       V::MixedErgodicity, {P, P, N}},
      {"two-srw", {SimpleRandomWalk{0.5}, SimpleRandomWalk{0.5}}, V::ErgodicWeaklyMixing, {N, N}},
      {"finite-bipartite", {bipartite()}, V::CompletelyNonErgodic, {P}},
      {"bd-null-periodic", {bd_null_periodic()}, V::ErgodicWeaklyMixing, {N}},
      {"five+bd-null+bd-positive", {five(), bd_null(), bd_positive()}, V::MixedErgodicity, {P, N, P}},
  };
}

inline RosinskiTriplet markov_triplet(const MarkovFixture& f, double alpha = 1.2) {
  return RosinskiTriplet(MarkovShift{markov::MarkovChain(f.blocks), 50}, MarkovIndicatorKernel{},
                         TrivialCocycle{}, alpha);
}

/// Moving average with a kernel of radius 2 on Z (two fibers).
inline RosinskiTriplet mma(double alpha = 1.2, std::size_t d = 1, std::size_t ny = 2) {
  std::vector<double> w;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  const std::size_t cube = LatticeWindow::cube(d, 2).size();
  for (std::size_t y = 0; y < ny; ++y) {
    labels.push_back("y" + std::to_string(y));
    w.push_back(1.0 / (1.0 + static_cast<double>(y)));
    std::vector<double> row(cube);
    for (std::size_t i = 0; i < cube; ++i)
      row[i] = std::cos(0.7 * static_cast<double>(i) + static_cast<double>(y)) /
               (1.0 + static_cast<double>(i));
    rows.push_back(std::move(row));
  }
  return RosinskiTriplet(MixedMovingAverage{FiniteWeightedSpace(labels, w), d, 2},
                         MovingAverageKernel{rows}, TrivialCocycle{}, alpha);
}

inline RosinskiTriplet sub_gaussian(double alpha = 1.2, std::size_t d = 1) {
  return RosinskiTriplet(SubGaussianShift{1.0, d}, CoordinateKernel{}, TrivialCocycle{}, alpha);
}

}  // namespace fixtures

#endif  // STABLEFIELD_TESTS_FIXTURES_HPP
