#pragma once

// Gradient-based optimization: fit nondecreasing slopes to observed
// stochastic gradients per decision dimension, integrate them into convex
// piecewise-linear marginals and minimize their sum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "statesearch/observation_log.hpp"
#include "statesearch/piecewise_linear.hpp"
#include "statesearch/polytope.hpp"
#include "statesearch/state.hpp"
#include "statesearch/weighting.hpp"

namespace statesearch {

/// Weights below this are raised to it before pooling.
inline constexpr double kIsotonicWeightFloor = 1e-12;

/// Weighted least-squares projection of `values` onto nondecreasing
/// sequences, by pool-adjacent-violators.
inline std::vector<double> weighted_isotonic_regression(std::span<const double> values,
                                                        std::span<const double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], std::max(weights[i], kIsotonicWeightFloor), 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.weight * a.mean + b.weight * b.mean) / w;
      a.weight = w;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
  // Pooled means can round below their left neighbour.
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

/// Ordered decisions and their fitted slopes for one dimension.
struct SlopeVector {
  std::vector<double> x;
  std::vector<double> v;
};

/// Sorts (decision, gradient) pairs by decision, stably, and fits
/// nondecreasing slopes.
inline SlopeVector weighted_isotonic_slopes(std::span<const double> decisions, std::span<const double> gradients,
                                            std::span<const double> weights) {
  if (decisions.size() != gradients.size() || decisions.size() != weights.size()) {
    throw std::invalid_argument("decisions, gradients and weights differ in length");
  }
  std::vector<std::size_t> order(decisions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return decisions[a] < decisions[b]; });
  SlopeVector out;
  std::vector<double> g, w;
  for (std::size_t i : order) {
    out.x.push_back(decisions[i]);
    g.push_back(gradients[i]);
    w.push_back(weights[i]);
  }
  out.v = weighted_isotonic_regression(g, w);
  return out;
}

using MarginalPL = PiecewiseLinear;

/// Where the slope fitted at decision x[i] applies.
enum class SlopeAnchor {
  /// On (x[i-1], x[i]] with x[-1] = x_min. Kinks sit on observed decisions.
  kSegmentEnd,
  /// Around x[i]; the slope switches halfway between consecutive decisions.
  kMidpoint,
};

/// Continuous convex PL function, zero at x_min, with the last slope
/// continuing to x_max.
inline MarginalPL reconstruct_marginal(const SlopeVector& s, double x_min, double x_max,
                                       SlopeAnchor anchor = SlopeAnchor::kSegmentEnd) {
  if (s.x.size() != s.v.size()) throw std::invalid_argument("slope vector is inconsistent");
  if (!(x_min <= x_max)) throw std::invalid_argument("marginal bounds are reversed");
  if (s.v.empty()) return MarginalPL(0.0, 0.0, {});
  std::vector<std::pair<double, double>> kinks;
  kinks.reserve(s.v.size());
  double at_min = s.v.front() * x_min;
  for (std::size_t i = 0; i + 1 < s.v.size(); ++i) {
    const double delta = s.v[i + 1] - s.v[i];
    if (delta == 0.0) continue;
    const double t = anchor == SlopeAnchor::kSegmentEnd ? s.x[i] : 0.5 * (s.x[i] + s.x[i + 1]);
    kinks.emplace_back(t, delta);
    if (t < x_min) at_min += delta * (x_min - t);
  }
  return MarginalPL(-at_min, s.v.front(), std::move(kinks));
}

/// Exact minimizer of the sum of convex marginals over the region.
inline PlSolution minimize_separable_pl(std::span<const MarginalPL> marginals, const Polytope& region) {
  SeparablePL f;
  f.marginals.assign(marginals.begin(), marginals.end());
  if (!f.negated().is_concave()) throw std::invalid_argument("marginals must be convex");
  return minimize_separable(f, region);
}

/// Regular grid: points lower_k + j * spacing_k, j = 0..count_k - 1.
class Grid {
 public:
  Grid(std::vector<double> lower, std::vector<double> upper, std::vector<double> spacing)
      : lower_(std::move(lower)), spacing_(std::move(spacing)) {
    if (lower_.size() != upper.size() || lower_.size() != spacing_.size()) {
      throw std::invalid_argument("grid dimensions disagree");
    }
    for (std::size_t k = 0; k < lower_.size(); ++k) {
      if (!(spacing_[k] > 0.0)) throw std::invalid_argument("grid spacing must be positive");
      const double span = upper[k] - lower_[k];
      if (span < 0.0) throw std::invalid_argument("grid bounds are reversed");
      count_.push_back(static_cast<std::size_t>(std::floor(span / spacing_[k] * (1.0 + 1e-12))) + 1);
    }
  }

  /// Spacing (upper - lower) / divisions in every dimension of the region's box.
  static Grid over(const Polytope& region, std::size_t divisions = 100) {
    if (divisions == 0) throw std::invalid_argument("grid needs at least one division");
    std::vector<double> spacing(region.dim());
    for (std::size_t k = 0; k < region.dim(); ++k) {
      const double span = region.upper(k) - region.lower(k);
      spacing[k] = span > 0.0 ? span / static_cast<double>(divisions) : 1.0;
    }
    return Grid(region.lower(), region.upper(), std::move(spacing));
  }

  std::size_t dim() const { return lower_.size(); }
  double spacing(std::size_t k) const { return spacing_[k]; }
  std::size_t count(std::size_t k) const { return count_[k]; }
  double point(std::size_t k, std::size_t j) const { return lower_[k] + static_cast<double>(j) * spacing_[k]; }

 private:
  std::vector<double> lower_;
  std::vector<double> spacing_;
  std::vector<std::size_t> count_;
};

/// Rounds each coordinate to an adjacent grid point, up with probability
/// equal to the fractional offset, then clamps to the grid.
template <class Rng>
std::vector<double> grid_snap(std::span<const double> x, const Grid& grid, Rng& rng) {
  if (x.size() != grid.dim()) throw std::invalid_argument("decision/grid dimension mismatch");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    double pos = (x[k] - grid.point(k, 0)) / grid.spacing(k);
    // Points within rounding of a grid point are on it.
    if (std::abs(pos - std::round(pos)) < 1e-9) pos = std::round(pos);
    double cell = std::floor(pos);
    const double frac = pos - cell;
    if (frac > 0.0 && unit(rng) < frac) cell += 1.0;
    const double last = static_cast<double>(grid.count(k) - 1);
    out[k] = grid.point(k, static_cast<std::size_t>(std::clamp(cell, 0.0, last)));
  }
  return out;
}

/// One observed stochastic gradient of the (minimized) objective.
struct GradientObservation {
  std::vector<double> decision;
  std::vector<double> gradient;
};

using GradientLog = ObservationLog<GradientObservation>;

/// Decisions played at random before the first fit.
inline constexpr std::size_t kGboInitialization = 5;

/// Slope placement used by the online optimizer. Segment-end kinks lie on
/// observed decisions, so the minimizer never leaves them; midpoint kinks
/// let decisions move between observations.
inline constexpr SlopeAnchor kGboDefaultAnchor = SlopeAnchor::kMidpoint;

/// Minimizer of the weighted slope model for the query, without snapping.
template <WeightingScheme W>
PlSolution gbo_query(const StateVector& query, std::span<const StateVector> states,
                     std::span<const GradientObservation> obs, W& weighter, const Polytope& region,
                     SlopeAnchor anchor = kGboDefaultAnchor) {
  if (states.empty()) throw std::invalid_argument("no observations");
  if (states.size() != obs.size()) throw std::invalid_argument("states and observations differ in length");
  const WeightVector w = weighter.weights(query, states);
  const std::size_t d = region.dim();
  std::vector<MarginalPL> marginals;
  marginals.reserve(d);
  std::vector<double> xs(obs.size()), gs(obs.size());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (obs[i].decision.size() != d || obs[i].gradient.size() != d) {
        throw std::invalid_argument("observation dimension mismatch");
      }
      xs[i] = obs[i].decision[k];
      gs[i] = obs[i].gradient[k];
    }
    marginals.push_back(
        reconstruct_marginal(weighted_isotonic_slopes(xs, gs, w), region.lower(k), region.upper(k), anchor));
  }
  return minimize_separable_pl(marginals, region);
}

template <WeightingScheme W>
PlSolution gbo_query(const StateVector& query, const GradientLog& log, W& weighter, const Polytope& region,
                     SlopeAnchor anchor = kGboDefaultAnchor) {
  return gbo_query(query, log.states(), log.outcomes(), weighter, region, anchor);
}

/// Decision to play at the query. Before the initialization period has
/// elapsed it is a uniformly random feasible grid point.
template <WeightingScheme W, class Rng>
std::vector<double> gbo_step(const StateVector& query, const GradientLog& log, W& weighter, const Polytope& region,
                             const Grid& grid, Rng& rng, SlopeAnchor anchor = kGboDefaultAnchor) {
  if (log.size() < kGboInitialization) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      std::vector<double> x(grid.dim());
      for (std::size_t k = 0; k < grid.dim(); ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, grid.count(k) - 1);
        x[k] = grid.point(k, pick(rng));
      }
      if (region.contains(x)) return x;
    }
    throw std::runtime_error("no feasible grid point found");
  }
  const PlSolution sol = gbo_query(query, log, weighter, region, anchor);
  return grid_snap(sol.x, grid, rng);
}

}  // namespace statesearch
