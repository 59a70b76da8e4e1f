#pragma once

// Nadaraya-Watson observation weights with a product Gaussian kernel and the
// 1.06 * sigma * n^(-1/(4+d)) rule-of-thumb bandwidth.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "statesearch/state.hpp"

namespace statesearch {

/// Kernel standard deviation per state dimension.
struct Bandwidths {
  std::vector<double> h;

  std::size_t dim() const { return h.size(); }
};

namespace detail {

// Linear-interpolation sample quantile (the type-7 rule used by R's quantile()).
inline double sample_quantile(std::vector<double> sorted, double p) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// h_j = 1.06 * min(sd_j, IQR_j / 1.349) * n^(-1/(4+d)), with d the state
/// dimension. A zero spread falls back to 1e-6 * (1 + |mean_j|).
inline Bandwidths rule_of_thumb_bandwidth(std::span<const StateVector> states) {
  if (states.size() < 2) throw std::invalid_argument("insufficient data");
  const std::size_t d = states.front().dim();
  require_dimension(states, d);

  const auto n = static_cast<double>(states.size());
  const double shrink = std::pow(n, -1.0 / (4.0 + static_cast<double>(d)));

  Bandwidths out;
  out.h.resize(d);
  std::vector<double> column(states.size());
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      column[i] = states[i][j];
      mean += column[i];
    }
    mean /= n;
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = detail::sample_quantile(column, 0.75) - detail::sample_quantile(column, 0.25);
    const double sigma = std::min(sd, iqr / 1.349);
    out.h[j] = sigma > 0.0 ? 1.06 * sigma * shrink : 1e-6 * (1.0 + std::abs(mean));
  }
  return out;
}

/// Log of the unnormalized product-Gaussian kernel between two states.
inline double log_kernel(const StateVector& query, const StateVector& state, const Bandwidths& bw) {
  double acc = 0.0;
  for (std::size_t j = 0; j < query.dim(); ++j) {
    const double z = coord_difference(query[j], state[j], query.kind(j)) / bw.h[j];
    acc -= 0.5 * z * z;
  }
  return acc;
}

/// w_i proportional to prod_j exp(-dist_j^2 / (2 h_j^2)), normalized in log space.
inline WeightVector nadaraya_watson_weights(const StateVector& query,
                                            std::span<const StateVector> states,
                                            const Bandwidths& bw) {
  if (states.empty()) throw std::invalid_argument("no observations");
  require_dimension(states, query.dim());
  if (bw.dim() != query.dim()) throw std::invalid_argument("bandwidth dimension mismatch");
  for (double h : bw.h) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidths must be positive");
  }

  WeightVector w(states.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    w[i] = log_kernel(query, states[i], bw);
    max_log = std::max(max_log, w[i]);
  }
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace statesearch
