#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace statesearch {

/// Per-dimension tag of a state coordinate. A positive period marks a
/// circular dimension (time of day, time of year); zero means the real line.
struct DimKind {
  double period = 0.0;

  static constexpr DimKind linear() { return {}; }
  static DimKind circular(double period) {
    if (!(period > 0.0)) throw std::invalid_argument("circular period must be positive");
    return DimKind{period};
  }

  bool is_circular() const { return period > 0.0; }
  bool operator==(const DimKind&) const = default;
};

/// Signed difference a - b, wrapped to the shortest arc on circular dimensions.
inline double coord_difference(double a, double b, const DimKind& kind) {
  double diff = a - b;
  if (kind.is_circular()) {
    diff = std::remainder(diff, kind.period);
  }
  return diff;
}

inline double wrap_coordinate(double value, double period) {
  double w = std::fmod(value, period);
  if (w < 0.0) w += period;
  // fmod can return `period` itself after adding it to a tiny negative
  if (w >= period) w = 0.0;
  return w;
}

/// A point in the state space. Circular coordinates are wrapped into
/// [0, period) on construction.
class StateVector {
 public:
  StateVector() = default;

  explicit StateVector(std::vector<double> coords)
      : coords_(std::move(coords)), kinds_(coords_.size(), DimKind::linear()) {}

  StateVector(std::vector<double> coords, std::vector<DimKind> kinds)
      : coords_(std::move(coords)), kinds_(std::move(kinds)) {
    if (kinds_.empty()) kinds_.assign(coords_.size(), DimKind::linear());
    if (kinds_.size() != coords_.size()) {
      throw std::invalid_argument("StateVector: coords and kinds differ in length");
    }
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      if (kinds_[j].is_circular()) coords_[j] = wrap_coordinate(coords_[j], kinds_[j].period);
    }
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t j) const { return coords_[j]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<DimKind>& kinds() const { return kinds_; }
  const DimKind& kind(std::size_t j) const { return kinds_[j]; }

  bool operator==(const StateVector&) const = default;

 private:
  std::vector<double> coords_;
  std::vector<DimKind> kinds_;
};

/// Nonnegative observation weights summing to one.
using WeightVector = std::vector<double>;

inline WeightVector uniform_weights(std::size_t n) {
  if (n == 0) return {};
  return WeightVector(n, 1.0 / static_cast<double>(n));
}

/// Throws unless every state has dimension `dim`.
inline void require_dimension(std::span<const StateVector> states, std::size_t dim) {
  for (const auto& s : states) {
    if (s.dim() != dim) throw std::invalid_argument("state dimensions disagree");
  }
}

/// True when all entries are >= 0 and the total is within `tol` of one.
inline bool is_valid_weight_vector(std::span<const double> w, double tol = 1e-12) {
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tol;
}

/// Divides by the total in place. A zero total produces uniform weights.
inline void normalize_in_place(WeightVector& w) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) {
    w = uniform_weights(w.size());
    return;
  }
  for (double& v : w) v /= total;
}

}  // namespace statesearch
