#pragma once

// Two-product newsvendor with budget and storage constraints. Demand and a
// two-dimensional observable state are drawn jointly from a three-component
// Gaussian mixture; the state carries information about the component.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "statesearch/piecewise_linear.hpp"
#include "statesearch/polytope.hpp"
#include "statesearch/state.hpp"

namespace statesearch::newsvendor {

using Decision = std::array<double, 2>;
using DemandPair = std::array<double, 2>;

struct NewsvendorParams {
  std::array<double, 2> cost{1.0, 1.0};
  std::array<double, 2> price{3.0, 2.5};
  std::array<double, 2> budget_coef{1.2, 1.0};
  double budget = 60.0;
  std::array<double, 2> storage_coef{1.0, 1.5};
  double storage = 70.0;

  void validate() const {
    for (std::size_t k = 0; k < 2; ++k) {
      if (!(cost[k] > 0.0 && price[k] > cost[k])) {
        throw std::invalid_argument("newsvendor prices must exceed positive costs");
      }
      if (!(budget_coef[k] > 0.0 && storage_coef[k] > 0.0)) {
        throw std::invalid_argument("newsvendor constraint coefficients must be positive");
      }
    }
    if (!(budget > 0.0 && storage > 0.0)) throw std::invalid_argument("newsvendor capacities must be positive");
  }

  /// Largest feasible stock of product k on its own.
  double max_stock(std::size_t k) const { return std::min(budget / budget_coef[k], storage / storage_coef[k]); }

  Polytope region() const {
    validate();
    return Polytope({0.0, 0.0}, {max_stock(0), max_stock(1)},
                    {{{budget_coef[0], budget_coef[1]}, budget}, {{storage_coef[0], storage_coef[1]}, storage}});
  }
};

/// -c.x + sum_k p_k min(x_k, D_k)
inline double newsvendor_value(std::span<const double> x, const DemandPair& demand, const NewsvendorParams& p) {
  double v = 0.0;
  for (std::size_t k = 0; k < 2; ++k) v += -p.cost[k] * x[k] + p.price[k] * std::min(x[k], demand[k]);
  return v;
}

/// Component k is -c_k + p_k 1{x_k < D_k}; at the kink x_k = D_k this is the
/// right derivative -c_k.
inline Decision newsvendor_gradient(std::span<const double> x, const DemandPair& demand,
                                    const NewsvendorParams& p) {
  Decision g{};
  for (std::size_t k = 0; k < 2; ++k) g[k] = -p.cost[k] + (x[k] < demand[k] ? p.price[k] : 0.0);
  return g;
}

/// Three equally weighted components. Second moments are variances.
struct MixtureParams {
  static constexpr std::size_t kComponents = 3;
  std::array<std::array<double, 2>, kComponents> demand_mean{};
  std::array<std::array<double, 2>, kComponents> demand_var{};
  std::array<std::array<double, 2>, kComponents> state_mean{};
  std::array<std::array<double, 2>, kComponents> state_var{};

  void validate() const {
    for (std::size_t a = 0; a < kComponents; ++a) {
      for (std::size_t j = 0; j < 2; ++j) {
        if (!(demand_var[a][j] > 0.0 && state_var[a][j] > 0.0)) {
          throw std::invalid_argument("mixture variances must be positive");
        }
      }
    }
  }

  /// Demand components D_A ~ {N(10,4), N(28,5), N(30,5)} and
  /// D_B ~ {N(10,3), N(22,9), N(35,12)}; state means ~ N(0,3) and state
  /// variances ~ InvGamma(1,1), drawn once.
  template <class Rng>
  static MixtureParams draw(Rng& rng) {
    MixtureParams m;
    m.demand_mean = {{{10.0, 10.0}, {28.0, 22.0}, {30.0, 35.0}}};
    m.demand_var = {{{4.0, 3.0}, {5.0, 9.0}, {5.0, 12.0}}};
    std::normal_distribution<double> mean_dist(0.0, std::sqrt(3.0));
    std::gamma_distribution<double> precision_dist(1.0, 1.0);
    for (std::size_t a = 0; a < kComponents; ++a) {
      for (std::size_t j = 0; j < 2; ++j) {
        m.state_mean[a][j] = mean_dist(rng);
        m.state_var[a][j] = 1.0 / precision_dist(rng);
      }
    }
    return m;
  }
};

struct NewsvendorDraw {
  StateVector state;
  DemandPair demand{};
  std::size_t component = 0;
};

/// Each draw picks a component uniformly, then draws both state coordinates
/// and both demands from that component's Gaussians. Demands are truncated
/// at zero.
template <class Rng>
std::vector<NewsvendorDraw> generate_newsvendor_path(const MixtureParams& mix, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("path length must be positive");
  mix.validate();
  std::uniform_int_distribution<std::size_t> pick(0, MixtureParams::kComponents - 1);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::vector<NewsvendorDraw> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    NewsvendorDraw d;
    d.component = pick(rng);
    std::vector<double> coords(2);
    for (std::size_t j = 0; j < 2; ++j) {
      coords[j] = mix.state_mean[d.component][j] + std::sqrt(mix.state_var[d.component][j]) * std_normal(rng);
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const double raw = mix.demand_mean[d.component][k] + std::sqrt(mix.demand_var[d.component][k]) * std_normal(rng);
      d.demand[k] = std::max(raw, 0.0);
    }
    d.state = StateVector(std::move(coords));
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle: known mixture, unknown component.

namespace detail {

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
// Antiderivative of the standard normal CDF.
inline double cdf_integral(double z) { return z * norm_cdf(z) + norm_pdf(z); }

}  // namespace detail

/// Posterior probability of each component given the state.
inline std::array<double, MixtureParams::kComponents> component_posterior(const StateVector& state,
                                                                          const MixtureParams& mix) {
  std::array<double, MixtureParams::kComponents> lp{};
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < MixtureParams::kComponents; ++a) {
    lp[a] = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double v = mix.state_var[a][j];
      const double z = state[j] - mix.state_mean[a][j];
      lp[a] += -0.5 * std::log(v) - 0.5 * z * z / v;
    }
    max_lp = std::max(max_lp, lp[a]);
  }
  double total = 0.0;
  for (double& v : lp) {
    v = std::exp(v - max_lp);
    total += v;
  }
  for (double& v : lp) v /= total;
  return lp;
}

/// Conditional law of the truncated demand for one product given the state.
class ConditionalDemand {
 public:
  ConditionalDemand(const std::array<double, MixtureParams::kComponents>& posterior, const MixtureParams& mix,
                    std::size_t product) {
    for (std::size_t a = 0; a < MixtureParams::kComponents; ++a) {
      weight_[a] = posterior[a];
      mean_[a] = mix.demand_mean[a][product];
      sd_[a] = std::sqrt(mix.demand_var[a][product]);
    }
  }

  /// P(max(D, 0) <= x).
  double cdf(double x) const {
    if (x < 0.0) return 0.0;
    double c = 0.0;
    for (std::size_t a = 0; a < weight_.size(); ++a) c += weight_[a] * detail::norm_cdf((x - mean_[a]) / sd_[a]);
    return c;
  }

  /// E[min(x, max(D, 0))] for x >= 0.
  double expected_sales(double x) const {
    if (x <= 0.0) return 0.0;
    double integral = 0.0;
    for (std::size_t a = 0; a < weight_.size(); ++a) {
      const double z0 = -mean_[a] / sd_[a];
      const double z1 = (x - mean_[a]) / sd_[a];
      integral += weight_[a] * sd_[a] * (detail::cdf_integral(z1) - detail::cdf_integral(z0));
    }
    return x - integral;
  }

  /// Smallest x >= 0 with cdf(x) >= q, by bisection.
  double quantile(double q) const {
    if (cdf(0.0) >= q) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (std::size_t a = 0; a < weight_.size(); ++a) hi = std::max(hi, mean_[a] + 12.0 * sd_[a]);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) >= q ? hi : lo) = mid;
    }
    return hi;
  }

 private:
  std::array<double, MixtureParams::kComponents> weight_{};
  std::array<double, MixtureParams::kComponents> mean_{};
  std::array<double, MixtureParams::kComponents> sd_{};
};

/// Exact conditional expected profit of stocking x given the state.
inline double expected_value(std::span<const double> x, const StateVector& state, const MixtureParams& mix,
                             const NewsvendorParams& p) {
  const auto post = component_posterior(state, mix);
  double v = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    v += -p.cost[k] * x[k] + p.price[k] * ConditionalDemand(post, mix, k).expected_sales(x[k]);
  }
  return v;
}

/// Optimal stocking with the mixture known but the component unknown. Solves
/// each product at its critical ratio (p - c) / p; if that violates a
/// constraint, searches every constraint facet for the best point, which is
/// exact because the expected profit is concave.
inline Decision newsvendor_oracle(const StateVector& state, const MixtureParams& mix, const NewsvendorParams& p) {
  const auto post = component_posterior(state, mix);
  const std::array<ConditionalDemand, 2> demand{ConditionalDemand(post, mix, 0), ConditionalDemand(post, mix, 1)};
  const Polytope region = p.region();

  Decision x{};
  for (std::size_t k = 0; k < 2; ++k) {
    x[k] = std::clamp(demand[k].quantile((p.price[k] - p.cost[k]) / p.price[k]), 0.0, region.upper(k));
  }
  if (region.contains(x)) return x;

  auto value = [&](const Decision& y) {
    double v = 0.0;
    for (std::size_t k = 0; k < 2; ++k) v += -p.cost[k] * y[k] + p.price[k] * demand[k].expected_sales(y[k]);
    return v;
  };
  auto marginal = [&](std::size_t k, double y) { return p.price[k] * (1.0 - demand[k].cdf(y)) - p.cost[k]; };

  Decision best = {0.0, 0.0};
  double best_value = value(best);
  const auto& rows = region.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    // Facet a0 x0 + a1 x1 = b, parameterized by x0 = t.
    const double a0 = rows[r].coef[0], a1 = rows[r].coef[1], b = rows[r].rhs;
    double t_lo = 0.0, t_hi = std::min(region.upper(0), b / a0);
    t_lo = std::max(t_lo, (b - a1 * region.upper(1)) / a0);
    for (std::size_t o = 0; o < rows.size(); ++o) {
      if (o == r) continue;
      // q0 t + q1 (b - a0 t) / a1 <= rhs
      const double coef = rows[o].coef[0] - rows[o].coef[1] * a0 / a1;
      const double rhs = rows[o].rhs - rows[o].coef[1] * b / a1;
      if (coef > 0) t_hi = std::min(t_hi, rhs / coef);
      else if (coef < 0) t_lo = std::max(t_lo, rhs / coef);
      else if (rhs < 0) t_hi = -1.0;
    }
    if (t_lo > t_hi) continue;
    auto point = [&](double t) { return Decision{t, (b - a0 * t) / a1}; };
    auto slope = [&](double t) {
      const Decision y = point(t);
      return marginal(0, y[0]) - (a0 / a1) * marginal(1, y[1]);
    };
    double lo = t_lo, hi = t_hi;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    for (double t : {t_lo, t_hi, 0.5 * (lo + hi)}) {
      Decision y = point(t);
      y[1] = std::max(y[1], 0.0);
      if (!region.contains(y)) continue;
      const double v = value(y);
      if (v > best_value) {
        best_value = v;
        best = y;
      }
    }
  }
  return best;
}

/// Function-based problem adapter: the realized profit for a demand pair.
struct NewsvendorProblem {
  using Outcome = DemandPair;

  NewsvendorParams params;

  std::size_t decision_dim() const { return 2; }

  double value(std::span<const double> x, const Outcome& demand) const {
    return newsvendor_value(x, demand, params);
  }

  /// w * (-c_k x + p_k x - p_k max(x - D_k, 0)) per product.
  void accumulate(const Outcome& demand, double w, SeparablePLBuilder& builder) const {
    for (std::size_t k = 0; k < 2; ++k) {
      builder.add_linear(k, w * (params.price[k] - params.cost[k]));
      builder.add_hinge(k, demand[k], -w * params.price[k]);
    }
  }

  Polytope region() const { return params.region(); }
};

}  // namespace statesearch::newsvendor
