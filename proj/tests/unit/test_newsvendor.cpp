#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "statesearch/statesearch.hpp"

namespace ss = statesearch;
namespace nv = statesearch::newsvendor;
using ss::StateVector;

namespace {

nv::MixtureParams separated_mixture() {
  nv::MixtureParams m;
  m.demand_mean = {{{10.0, 10.0}, {28.0, 22.0}, {30.0, 35.0}}};
  m.demand_var = {{{4.0, 3.0}, {5.0, 9.0}, {5.0, 12.0}}};
  m.state_mean = {{{-5.0, 0.0}, {0.0, 5.0}, {5.0, -5.0}}};
  m.state_var = {{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}};
  return m;
}

// Mixture CDF of max(D, 0) with posterior weights computed from scratch.
double reference_cdf(double x, const StateVector& s, const nv::MixtureParams& m, std::size_t k) {
  double w[3], total = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    w[a] = 1.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double v = m.state_var[a][j];
      w[a] *= std::exp(-0.5 * (s[j] - m.state_mean[a][j]) * (s[j] - m.state_mean[a][j]) / v) / std::sqrt(v);
    }
    total += w[a];
  }
  double c = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    c += w[a] / total * 0.5 * std::erfc(-(x - m.demand_mean[a][k]) / std::sqrt(2.0 * m.demand_var[a][k]));
  }
  return c;
}

}  // namespace

TEST(NewsvendorValue, HandExamples) {
  nv::NewsvendorParams p;
  p.price = {2.0, 2.0};
  const std::vector<double> x = {10.0, 20.0}, zero = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(nv::newsvendor_value(x, {10.0, 20.0}, p), 30.0);
  EXPECT_DOUBLE_EQ(nv::newsvendor_value(zero, {10.0, 20.0}, p), 0.0);
  const std::vector<double> over = {11.0, 20.0};
  EXPECT_DOUBLE_EQ(nv::newsvendor_value(over, {10.0, 20.0}, p) - nv::newsvendor_value(x, {10.0, 20.0}, p),
                   -p.cost[0]);
}

TEST(NewsvendorGradient, BelowAtAndAboveDemand) {
  const nv::NewsvendorParams p;
  const std::vector<double> below = {5.0, 30.0}, at = {10.0, 20.0};
  auto g = nv::newsvendor_gradient(below, {10.0, 20.0}, p);
  EXPECT_DOUBLE_EQ(g[0], -p.cost[0] + p.price[0]);
  EXPECT_DOUBLE_EQ(g[1], -p.cost[1]);
  g = nv::newsvendor_gradient(at, {10.0, 20.0}, p);
  EXPECT_DOUBLE_EQ(g[0], -p.cost[0]);
  EXPECT_DOUBLE_EQ(g[1], -p.cost[1]);
}

TEST(NewsvendorValue, ConcaveWithSubgradients) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 45.0);
  const nv::NewsvendorParams p;
  for (int trial = 0; trial < 200; ++trial) {
    const nv::DemandPair d = {u(rng), u(rng)};
    const std::vector<double> x = {u(rng), u(rng)}, y = {u(rng), u(rng)};
    const std::vector<double> mid = {0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
    const double vx = nv::newsvendor_value(x, d, p), vy = nv::newsvendor_value(y, d, p);
    EXPECT_GE(nv::newsvendor_value(mid, d, p) + 1e-12, 0.5 * (vx + vy));
    const auto g = nv::newsvendor_gradient(x, d, p);
    EXPECT_LE(vy, vx + g[0] * (y[0] - x[0]) + g[1] * (y[1] - x[1]) + 1e-12);
  }
}

TEST(NewsvendorParams, RegionAndValidation) {
  const nv::NewsvendorParams p;
  EXPECT_DOUBLE_EQ(p.max_stock(0), 50.0);
  EXPECT_NEAR(p.max_stock(1), 70.0 / 1.5, 1e-12);
  const auto r = p.region();
  EXPECT_TRUE(r.contains(std::vector<double>{20.0, 30.0}));
  EXPECT_FALSE(r.contains(std::vector<double>{40.0, 30.0}));
  nv::NewsvendorParams bad = p;
  bad.price[0] = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(NewsvendorProblem, AccumulateReproducesValue) {
  const nv::NewsvendorProblem problem;
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  for (int trial = 0; trial < 50; ++trial) {
    const nv::DemandPair d = {u(rng), u(rng)};
    ss::SeparablePLBuilder b(2);
    problem.accumulate(d, 0.7, b);
    const auto f = std::move(b).build();
    const std::vector<double> x = {u(rng), u(rng)};
    EXPECT_NEAR(f(x), 0.7 * problem.value(x, d), 1e-12);
  }
}

TEST(MixtureDraws, MarginalMeanAndReproducibility) {
  std::mt19937_64 seed_rng(53);
  const auto mix = nv::MixtureParams::draw(seed_rng);
  std::mt19937_64 rng(54);
  const std::size_t n = 100000;
  const auto path = nv::generate_newsvendor_path(mix, n, rng);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& d : path) {
    sum += d.demand[0];
    sum2 += d.demand[0] * d.demand[0];
    EXPECT_GE(d.demand[1], 0.0);
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, (10.0 + 28.0 + 30.0) / 3.0, 3.0 * se);

  std::mt19937_64 a(9), b(9);
  const auto pa = nv::generate_newsvendor_path(mix, 50, a);
  const auto pb = nv::generate_newsvendor_path(mix, 50, b);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].state, pb[i].state);
    EXPECT_EQ(pa[i].demand, pb[i].demand);
  }
}

TEST(MixtureDraws, StatePriorMoments) {
  std::mt19937_64 rng(55);
  double sum = 0.0, sum2 = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const double m = nv::MixtureParams::draw(rng).state_mean[1][0];
    sum += m;
    sum2 += m * m;
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.05);
  EXPECT_NEAR(sum2 / draws, 3.0, 0.15);
}

TEST(Oracle, ComponentPosteriorConcentrates) {
  const auto mix = separated_mixture();
  const auto post = nv::component_posterior(StateVector({5.0, -5.0}), mix);
  EXPECT_GE(post[2], 0.99);
  EXPECT_NEAR(post[0] + post[1] + post[2], 1.0, 1e-15);
}

TEST(Oracle, ExpectedSalesMatchesMonteCarlo) {
  const auto mix = separated_mixture();
  const StateVector s({0.5, 2.0});
  const auto post = nv::component_posterior(s, mix);
  const nv::ConditionalDemand demand(post, mix, 1);
  std::mt19937_64 rng(56);
  std::discrete_distribution<int> pick(post.begin(), post.end());
  std::normal_distribution<double> z(0.0, 1.0);
  const int draws = 400000;
  for (double x : {15.0, 22.0, 30.0}) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const int a = pick(rng);
      const double d = std::max(mix.demand_mean[a][1] + std::sqrt(mix.demand_var[a][1]) * z(rng), 0.0);
      const double v = std::min(x, d);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / draws;
    EXPECT_NEAR(demand.expected_sales(x), mean, 3.0 * std::sqrt((sum2 / draws - mean * mean) / draws) + 1e-12);
  }
}

TEST(Oracle, SlackConstraintsGiveCriticalRatioQuantiles) {
  const auto mix = separated_mixture();
  const nv::NewsvendorParams p;
  const StateVector s({-5.0, 0.0});  // low-demand component
  const auto x = nv::newsvendor_oracle(s, mix, p);
  ASSERT_TRUE(p.region().contains(std::vector<double>{x[0], x[1]}));
  for (std::size_t k = 0; k < 2; ++k) {
    const double ratio = (p.price[k] - p.cost[k]) / p.price[k];
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (reference_cdf(mid, s, mix, k) >= ratio ? hi : lo) = mid;
    }
    EXPECT_NEAR(x[k], hi, 1e-8);
  }
}

TEST(Oracle, ThinMarginOrdersDeepLowerQuantile) {
  const auto mix = separated_mixture();
  nv::NewsvendorParams p;
  p.price = {1.0 + 1e-9, 1.0 + 1e-9};
  const StateVector s({0.0, 5.0});
  const auto x = nv::newsvendor_oracle(s, mix, p);
  for (std::size_t k = 0; k < 2; ++k) {
    const double ratio = (p.price[k] - p.cost[k]) / p.price[k];
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (reference_cdf(mid, s, mix, k) >= ratio ? hi : lo) = mid;
    }
    EXPECT_NEAR(x[k], hi, 1e-6);
    EXPECT_LT(x[k], mix.demand_mean[1][k] - 5.0 * std::sqrt(mix.demand_var[1][k]));
  }
}

TEST(Oracle, DominatesRandomFeasibleDecisions) {
  std::mt19937_64 rng(57);
  const auto mix = nv::MixtureParams::draw(rng);
  const nv::NewsvendorParams p;
  const auto region = p.region();
  std::uniform_real_distribution<double> ua(0.0, p.max_stock(0)), ub(0.0, p.max_stock(1));
  const auto tests = nv::generate_newsvendor_path(mix, 30, rng);
  int binding = 0;
  for (const auto& t : tests) {
    const auto x = nv::newsvendor_oracle(t.state, mix, p);
    const std::vector<double> xv = {x[0], x[1]};
    ASSERT_TRUE(region.contains(xv));
    const double best = nv::expected_value(xv, t.state, mix, p);
    binding += 1.2 * x[0] + x[1] > 60.0 - 1e-6 || x[0] + 1.5 * x[1] > 70.0 - 1e-6;
    int checked = 0;
    while (checked < 100) {
      const std::vector<double> y = {ua(rng), ub(rng)};
      if (!region.contains(y)) continue;
      ++checked;
      EXPECT_GE(best + 1e-9, nv::expected_value(y, t.state, mix, p));
    }
  }
  SUCCEED() << binding << " of 30 oracle decisions bind a constraint";
}
