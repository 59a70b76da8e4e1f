#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "statesearch/statesearch.hpp"

namespace ss = statesearch;
using ss::DimKind;
using ss::StateVector;

namespace {

std::vector<StateVector> line_states(std::initializer_list<double> xs) {
  std::vector<StateVector> out;
  for (double x : xs) out.emplace_back(std::vector<double>{x});
  return out;
}

}  // namespace

TEST(StateVector, WrapsCircularCoordinates) {
  const StateVector s({25.0, -1.0, 3.5}, {DimKind::circular(24), DimKind::circular(24), DimKind::linear()});
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 23.0);
  EXPECT_DOUBLE_EQ(s[2], 3.5);
  EXPECT_THROW(StateVector({1.0}, {DimKind::linear(), DimKind::linear()}), std::invalid_argument);
  EXPECT_THROW(DimKind::circular(0.0), std::invalid_argument);
}

TEST(StateVector, CircularDifferenceTakesShortArc) {
  const auto k = DimKind::circular(24);
  EXPECT_DOUBLE_EQ(ss::coord_difference(23.0, 1.0, k), -2.0);
  EXPECT_DOUBLE_EQ(ss::coord_difference(1.0, 23.0, k), 2.0);
  EXPECT_DOUBLE_EQ(ss::coord_difference(23.0, 1.0, DimKind::linear()), 22.0);
}

TEST(Bandwidth, HundredPointsWithUnitSpread) {
  // +-c alternating gives sample sd 1 and IQR 2c > 1.349.
  const double c = std::sqrt(99.0 / 100.0);
  std::vector<StateVector> states;
  for (int i = 0; i < 100; ++i) states.emplace_back(std::vector<double>{i % 2 ? c : -c, static_cast<double>(i)});
  const auto bw = ss::rule_of_thumb_bandwidth(states);
  EXPECT_NEAR(bw.h[0], 0.4920084163629546, 1e-12);
  EXPECT_NEAR(bw.h[0], 1.06 * std::pow(100.0, -1.0 / 6.0), 1e-12);
}

TEST(Bandwidth, TwoPointsUsesInterquartileRange) {
  // sd = 0.7071; type-7 quartiles 0.25 and 0.75 give IQR/1.349 = 0.3706.
  const auto bw = ss::rule_of_thumb_bandwidth(line_states({0.0, 1.0}));
  EXPECT_NEAR(bw.h[0], 0.342025054519604, 1e-12);
}

TEST(Bandwidth, IdenticalStatesUseFloor) {
  const auto bw = ss::rule_of_thumb_bandwidth(line_states({-4.0, -4.0, -4.0}));
  EXPECT_DOUBLE_EQ(bw.h[0], 1e-6 * 5.0);
}

TEST(Bandwidth, RejectsFewerThanTwoStates) {
  const auto one = line_states({1.0});
  try {
    ss::rule_of_thumb_bandwidth(one);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "insufficient data");
  }
}

TEST(NadarayaWatson, SingleStateGetsAllWeight) {
  const auto w = ss::nadaraya_watson_weights(StateVector({3.0}), line_states({-7.0}), {{0.1}});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0], 1.0);
}

TEST(NadarayaWatson, SymmetricPair) {
  for (double h : {0.01, 1.0, 100.0}) {
    const auto w = ss::nadaraya_watson_weights(StateVector({0.0}), line_states({-1.0, 1.0}), {{h}});
    EXPECT_DOUBLE_EQ(w[0], 0.5);
    EXPECT_DOUBLE_EQ(w[1], 0.5);
  }
}

TEST(NadarayaWatson, ThreePointHandComputation) {
  // exp(-0.5), exp(-0.5), exp(-2) normalized.
  const auto w = ss::nadaraya_watson_weights(StateVector({0.0}), line_states({-1.0, 1.0, 2.0}), {{1.0}});
  EXPECT_NEAR(w[0], 0.44981622, 1e-8);
  EXPECT_NEAR(w[1], 0.44981622, 1e-8);
  EXPECT_NEAR(w[2], 0.10036756, 1e-8);
}

TEST(NadarayaWatson, UnderflowStillNormalizes) {
  const auto w = ss::nadaraya_watson_weights(StateVector({0.0}), line_states({1e6, 2e6}), {{1e-3}});
  EXPECT_TRUE(ss::is_valid_weight_vector(w));
  EXPECT_DOUBLE_EQ(w[0], 1.0);
}

TEST(NadarayaWatson, HugeBandwidthIsUniform) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 50.0);
  std::vector<StateVector> states;
  for (int i = 0; i < 40; ++i) states.emplace_back(std::vector<double>{z(rng), z(rng)});
  const auto w = ss::nadaraya_watson_weights(StateVector({1.0, 2.0}), states, {{1e9, 1e9}});
  for (double v : w) EXPECT_NEAR(v, 1.0 / 40.0, 1e-6);
}

TEST(NadarayaWatson, CircularWrapIsSymmetric) {
  const std::vector<DimKind> kinds = {DimKind::circular(24)};
  const std::vector<StateVector> states = {StateVector({23.0}, kinds), StateVector({1.0}, kinds),
                                           StateVector({12.0}, kinds)};
  const auto w = ss::nadaraya_watson_weights(StateVector({0.0}, kinds), states, {{2.0}});
  EXPECT_DOUBLE_EQ(w[0], w[1]);
  EXPECT_GT(w[0], w[2]);
}

TEST(NadarayaWatson, PermutationEquivariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StateVector> states;
    for (int i = 0; i < 15; ++i) states.emplace_back(std::vector<double>{z(rng), z(rng)});
    std::vector<std::size_t> perm(states.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<StateVector> shuffled;
    for (std::size_t i : perm) shuffled.push_back(states[i]);
    const StateVector q({z(rng), z(rng)});
    const ss::Bandwidths bw{{0.7, 1.3}};
    const auto w = ss::nadaraya_watson_weights(q, states, bw);
    const auto ws = ss::nadaraya_watson_weights(q, shuffled, bw);
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_NEAR(ws[i], w[perm[i]], 1e-15);
  }
}

TEST(NadarayaWatson, MonotoneInDistance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StateVector> states;
    for (int i = 0; i < 20; ++i) states.emplace_back(std::vector<double>{u(rng)});
    const double q = u(rng);
    const auto w = ss::nadaraya_watson_weights(StateVector({q}), states, ss::rule_of_thumb_bandwidth(states));
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = 0; j < states.size(); ++j) {
        if (std::abs(q - states[i][0]) < std::abs(q - states[j][0])) EXPECT_GE(w[i], w[j]);
      }
    }
  }
}

TEST(NadarayaWatson, RejectsMismatchedInput) {
  const auto states = line_states({1.0, 2.0});
  EXPECT_THROW(ss::nadaraya_watson_weights(StateVector({0.0, 1.0}), states, {{1.0}}), std::invalid_argument);
  EXPECT_THROW(ss::nadaraya_watson_weights(StateVector({0.0}), states, {{0.0}}), std::invalid_argument);
  EXPECT_THROW(ss::nadaraya_watson_weights(StateVector({0.0}), {}, {{1.0}}), std::invalid_argument);
}

TEST(KernelWeighter, CachesBandwidthPerStateSet) {
  ss::KernelWeighter k;
  const auto a = line_states({0.0, 1.0, 3.0});
  const auto b = line_states({0.0, 1.0, 3.0, 10.0});
  const double ha = k.bandwidth_for(a).h[0];
  EXPECT_DOUBLE_EQ(ha, ss::rule_of_thumb_bandwidth(a).h[0]);
  EXPECT_DOUBLE_EQ(k.bandwidth_for(b).h[0], ss::rule_of_thumb_bandwidth(b).h[0]);
  EXPECT_EQ(k.weights(StateVector({0.5}), a),
            ss::nadaraya_watson_weights(StateVector({0.5}), a, ss::rule_of_thumb_bandwidth(a)));
  EXPECT_EQ(k.weights(StateVector({0.5}), line_states({4.0})), ss::WeightVector{1.0});
}

TEST(UniformWeighter, IgnoresState) {
  ss::UniformWeighter u;
  const auto w = u.weights(StateVector({100.0}), line_states({0.0, 1.0, 2.0, 3.0}));
  for (double v : w) EXPECT_DOUBLE_EQ(v, 0.25);
}
