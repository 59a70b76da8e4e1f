#pragma once

// Fast invariant checks for a built installation.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "statesearch/dpmm_weights.hpp"
#include "statesearch/fbo.hpp"
#include "statesearch/gbo.hpp"
#include "statesearch/kernel_weights.hpp"
#include "statesearch/problems/newsvendor.hpp"
#include "statesearch/problems/wind.hpp"

namespace statesearch::harness {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

// Restricted-growth strings enumerate every set partition of n items once.
inline void for_each_partition(std::size_t n, const std::function<void(const Partition&)>& visit) {
  std::vector<int> labels(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      visit(Partition(labels));
      return;
    }
    for (int c = 0; c <= max_label + 1; ++c) {
      labels[i] = c;
      rec(i + 1, std::max(max_label, c));
    }
  };
  if (n == 0) return;
  rec(1, 0);
}

inline SelftestResult check_eppf() {
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (std::size_t n = 1; n <= 6; ++n) {
      double total = 0.0;
      for_each_partition(n, [&](const Partition& p) { total += std::exp(eppf_log_prob(p, alpha)); });
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  return {"eppf sums to one", worst < 1e-10, "max error " + std::to_string(worst)};
}

inline SelftestResult check_weights() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    std::vector<StateVector> states;
    for (int i = 0; i < 12; ++i) states.emplace_back(std::vector<double>{z(rng), 3.0 * z(rng)});
    const StateVector q({z(rng), z(rng)});
    ok = is_valid_weight_vector(nadaraya_watson_weights(q, states, rule_of_thumb_bandwidth(states)));
    DpmmConfig cfg;
    cfg.burn_in = 5;
    cfg.num_samples = 5;
    cfg.thin = 1;
    ok = ok && is_valid_weight_vector(dp_weights(q, states, cfg, rng));
  }
  return {"weights are nonnegative and sum to one", ok, ""};
}

inline SelftestResult check_isotonic() {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    std::vector<double> y(1 + trial % 12), w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = z(rng);
      w[i] = u(rng);
    }
    const auto v = weighted_isotonic_regression(y, w);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i > 0 && v[i] < v[i - 1]) ok = false;
      lhs += w[i] * v[i];
      rhs += w[i] * y[i];
    }
    ok = ok && std::abs(lhs - rhs) < 1e-9 && weighted_isotonic_regression(v, w) == v;
  }
  return {"isotonic fit is monotone, mean-preserving and idempotent", ok, ""};
}

inline SelftestResult check_optimizer() {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> cents(0, 1000);
  std::uniform_real_distribution<double> wdist(0.0, 1.0);
  const Polytope region({0.0, 0.0}, {10.0, 10.0}, {{{1.0, 1.0}, 12.0}});
  newsvendor::NewsvendorProblem problem;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<newsvendor::DemandPair> demands(4);
    std::vector<double> w(4);
    for (std::size_t i = 0; i < 4; ++i) {
      demands[i] = {cents(rng) / 100.0, cents(rng) / 100.0};
      w[i] = wdist(rng);
    }
    const auto f = assemble_weighted_objective<newsvendor::NewsvendorProblem>(demands, w, problem);
    const auto sol = maximize_pl(f, region);
    double best = -1e300;
    for (int a = 0; a <= 1000; a += 5) {
      for (int b = 0; b <= 1000; b += 5) {
        const std::vector<double> x = {a / 100.0, b / 100.0};
        if (region.contains(x)) best = std::max(best, f(x));
      }
    }
    worst = std::max(worst, best - sol.value);
  }
  return {"exact maximizer dominates a grid search", worst <= 1e-9, "max shortfall " + std::to_string(worst)};
}

inline SelftestResult check_concavity() {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  const newsvendor::NewsvendorParams p;
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    const newsvendor::DemandPair d = {u(rng), u(rng)};
    const std::vector<double> x = {u(rng), u(rng)}, y = {u(rng), u(rng)};
    const auto g = newsvendor::newsvendor_gradient(x, d, p);
    const double vx = newsvendor::newsvendor_value(x, d, p), vy = newsvendor::newsvendor_value(y, d, p);
    ok = vy <= vx + g[0] * (y[0] - x[0]) + g[1] * (y[1] - x[1]) + 1e-12;
    const std::vector<double> m = {0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
    ok = ok && newsvendor::newsvendor_value(m, d, p) + 1e-12 >= 0.5 * (vx + vy);
    const double a = u(rng), b = u(rng), w = u(rng);
    ok = ok && wind::wind_revenue(0.5 * (a + b), w, 1.0, 2.0) + 1e-12 >=
                   0.5 * (wind::wind_revenue(a, w, 1.0, 2.0) + wind::wind_revenue(b, w, 1.0, 2.0));
  }
  return {"objectives are concave with valid subgradients", ok, ""};
}

}  // namespace detail

inline std::vector<SelftestResult> run_selftest() {
  return {detail::check_eppf(), detail::check_weights(), detail::check_isotonic(), detail::check_optimizer(),
          detail::check_concavity()};
}

}  // namespace statesearch::harness
