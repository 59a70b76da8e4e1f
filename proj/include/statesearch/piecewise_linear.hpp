#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace statesearch {

/// Univariate continuous piecewise-linear function
///   f(x) = offset + slope0 * x + sum_{t_j < x} delta_j * (x - t_j)
/// with kinks t_j sorted ascending. Concave iff every delta_j <= 0.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  /// Kinks as (location, slope change) pairs; sorted and merged here.
  PiecewiseLinear(double offset, double slope0, std::vector<std::pair<double, double>> kinks)
      : offset_(offset), slope0_(slope0) {
    std::sort(kinks.begin(), kinks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, delta] : kinks) {
      if (!knots_.empty() && knots_.back() == t) {
        deltas_.back() += delta;
      } else {
        knots_.push_back(t);
        deltas_.push_back(delta);
      }
    }
    prefix_delta_.resize(knots_.size() + 1, 0.0);
    prefix_moment_.resize(knots_.size() + 1, 0.0);
    for (std::size_t j = 0; j < knots_.size(); ++j) {
      prefix_delta_[j + 1] = prefix_delta_[j] + deltas_[j];
      prefix_moment_[j + 1] = prefix_moment_[j] + deltas_[j] * knots_[j];
    }
  }

  double operator()(double x) const {
    const std::size_t k = count_below(x);
    return offset_ + slope0_ * x + prefix_delta_[k] * x - prefix_moment_[k];
  }

  /// Slope on the segment immediately to the right of x.
  double right_slope(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return slope0_ + prefix_delta_[static_cast<std::size_t>(it - knots_.begin())];
  }

  /// Slope on the segment immediately to the left of x.
  double left_slope(double x) const { return slope0_ + prefix_delta_[count_below(x)]; }

  double offset() const { return offset_; }
  double initial_slope() const { return slope0_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& deltas() const { return deltas_; }

  bool is_concave() const {
    return std::all_of(deltas_.begin(), deltas_.end(), [](double d) { return d <= 0.0; });
  }
  bool is_convex() const {
    return std::all_of(deltas_.begin(), deltas_.end(), [](double d) { return d >= 0.0; });
  }

  PiecewiseLinear negated() const {
    PiecewiseLinear out = *this;
    out.offset_ = -offset_;
    out.slope0_ = -slope0_;
    for (double& d : out.deltas_) d = -d;
    for (double& d : out.prefix_delta_) d = -d;
    for (double& d : out.prefix_moment_) d = -d;
    return out;
  }

 private:
  // Number of knots strictly below x.
  std::size_t count_below(double x) const {
    return static_cast<std::size_t>(std::lower_bound(knots_.begin(), knots_.end(), x) - knots_.begin());
  }

  double offset_ = 0.0;
  double slope0_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> deltas_;
  std::vector<double> prefix_delta_{0.0};
  std::vector<double> prefix_moment_{0.0};
};

/// sum_k f_k(x_k) + constant.
struct SeparablePL {
  std::vector<PiecewiseLinear> marginals;
  double constant = 0.0;

  std::size_t dim() const { return marginals.size(); }

  double operator()(std::span<const double> x) const {
    if (x.size() != marginals.size()) throw std::invalid_argument("decision dimension mismatch");
    double v = constant;
    for (std::size_t k = 0; k < x.size(); ++k) v += marginals[k](x[k]);
    return v;
  }

  bool is_concave() const {
    return std::all_of(marginals.begin(), marginals.end(), [](const auto& f) { return f.is_concave(); });
  }

  SeparablePL negated() const {
    SeparablePL out;
    for (const auto& f : marginals) out.marginals.push_back(f.negated());
    out.constant = -constant;
    return out;
  }
};

/// Accumulates weighted sums of simple PL pieces one dimension at a time.
class SeparablePLBuilder {
 public:
  explicit SeparablePLBuilder(std::size_t dim) : slope0_(dim, 0.0), offset_(dim, 0.0), kinks_(dim) {}

  std::size_t dim() const { return slope0_.size(); }

  void add_linear(std::size_t k, double slope) { slope0_[k] += slope; }
  void add_constant(std::size_t k, double value) { offset_[k] += value; }
  /// Adds coef * max(x - t, 0) to dimension k.
  void add_hinge(std::size_t k, double t, double coef) {
    if (coef != 0.0) kinks_[k].emplace_back(t, coef);
  }

  SeparablePL build() && {
    SeparablePL out;
    for (std::size_t k = 0; k < dim(); ++k) {
      out.marginals.emplace_back(offset_[k], slope0_[k], std::move(kinks_[k]));
    }
    return out;
  }

 private:
  std::vector<double> slope0_;
  std::vector<double> offset_;
  std::vector<std::vector<std::pair<double, double>>> kinks_;
};

}  // namespace statesearch
