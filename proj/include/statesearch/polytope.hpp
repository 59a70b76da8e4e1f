#pragma once

// Box-bounded polytopes and exact maximization of separable concave
// piecewise-linear objectives over them.
//
// The maximizer set of a separable concave PL function over a polygon is a
// face of the arrangement formed by the constraint lines and the kink lines
// x_k = t. Its lexicographically smallest point is therefore either a corner
// of the box-optimal plateau rectangle or a point on a constraint facet where
// a coordinate crosses a kink or a bound. Enumerating those candidates is
// exact for one and two decision dimensions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "statesearch/piecewise_linear.hpp"

namespace statesearch {

/// coef . x <= rhs
struct LinearRow {
  std::vector<double> coef;
  double rhs = 0.0;
};

class Polytope {
 public:
  Polytope(std::vector<double> lower, std::vector<double> upper, std::vector<LinearRow> rows = {})
      : lower_(std::move(lower)), upper_(std::move(upper)), rows_(std::move(rows)) {
    if (lower_.size() != upper_.size() || lower_.empty()) {
      throw std::invalid_argument("polytope bounds must be nonempty and of equal length");
    }
    for (std::size_t k = 0; k < lower_.size(); ++k) {
      if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) || lower_[k] > upper_[k]) {
        throw std::invalid_argument("polytope box bounds must be finite with lower <= upper");
      }
    }
    for (const auto& r : rows_) {
      if (r.coef.size() != lower_.size()) throw std::invalid_argument("constraint row dimension mismatch");
    }
    if (!rows_.empty() && dim() > 2) {
      throw std::invalid_argument("linear rows are supported for at most two decision dimensions");
    }
    if (!has_feasible_point()) throw std::invalid_argument("empty region");
  }

  static Polytope box(std::vector<double> lower, std::vector<double> upper) {
    return Polytope(std::move(lower), std::move(upper));
  }

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t k) const { return lower_[k]; }
  double upper(std::size_t k) const { return upper_[k]; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<LinearRow>& rows() const { return rows_; }

  bool contains(std::span<const double> x, double tol = 1e-9) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      const double slack = tol * (1.0 + std::abs(lower_[k]) + std::abs(upper_[k]));
      if (x[k] < lower_[k] - slack || x[k] > upper_[k] + slack) return false;
    }
    for (const auto& r : rows_) {
      double lhs = 0.0;
      double mag = std::abs(r.rhs);
      for (std::size_t k = 0; k < dim(); ++k) {
        lhs += r.coef[k] * x[k];
        mag += std::abs(r.coef[k] * x[k]);
      }
      if (lhs > r.rhs + tol * (1.0 + mag)) return false;
    }
    return true;
  }

 private:
  bool has_feasible_point() const {
    if (rows_.empty()) return true;
    if (dim() == 1) {
      double lo = lower_[0], hi = upper_[0];
      return clip_interval(lo, hi);
    }
    // Every vertex of a nonempty bounded polygon is an intersection of two
    // constraint lines.
    std::vector<LinearRow> lines = rows_;
    lines.push_back({{1.0, 0.0}, upper_[0]});
    lines.push_back({{-1.0, 0.0}, -lower_[0]});
    lines.push_back({{0.0, 1.0}, upper_[1]});
    lines.push_back({{0.0, -1.0}, -lower_[1]});
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const auto& a = lines[i];
        const auto& b = lines[j];
        const double det = a.coef[0] * b.coef[1] - a.coef[1] * b.coef[0];
        if (std::abs(det) < 1e-14) continue;
        const double x0 = (a.rhs * b.coef[1] - a.coef[1] * b.rhs) / det;
        const double x1 = (a.coef[0] * b.rhs - a.rhs * b.coef[0]) / det;
        const double pt[2] = {x0, x1};
        if (contains(pt)) return true;
      }
    }
    return false;
  }

  bool clip_interval(double& lo, double& hi) const {
    for (const auto& r : rows_) {
      const double a = r.coef[0];
      if (std::abs(a) < 1e-300) {
        if (r.rhs < -1e-12) return false;
      } else if (a > 0) {
        hi = std::min(hi, r.rhs / a);
      } else {
        lo = std::max(lo, r.rhs / a);
      }
    }
    return lo <= hi + 1e-12 * (1.0 + std::abs(hi));
  }

  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<LinearRow> rows_;
};

struct PlSolution {
  std::vector<double> x;
  double value = 0.0;
};

namespace detail {

// Maximizer set [first, last] of a concave PL function on [lo, hi].
struct Plateau {
  double first;
  double last;
};

inline double slope_tolerance(const PiecewiseLinear& f) {
  double scale = std::abs(f.initial_slope());
  for (double d : f.deltas()) scale += std::abs(d);
  return 1e-12 * (1.0 + scale);
}

inline Plateau concave_plateau(const PiecewiseLinear& f, double lo, double hi) {
  const auto& knots = f.knots();
  const double tol = slope_tolerance(f);
  // Right slope is nonincreasing; locate the first point where it drops to
  // <= 0 and the first where it drops below 0.
  auto first_where = [&](auto pred) {
    if (pred(f.right_slope(lo))) return lo;
    auto begin = std::upper_bound(knots.begin(), knots.end(), lo);
    auto end = std::lower_bound(knots.begin(), knots.end(), hi);
    auto it = std::partition_point(begin, end, [&](double t) { return !pred(f.right_slope(t)); });
    return it == end ? hi : *it;
  };
  const double first = first_where([&](double s) { return s <= tol; });
  const double last = first_where([&](double s) { return s < -tol; });
  return {first, std::max(first, last)};
}

inline bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline bool value_ties(double a, double b) { return std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a) + std::abs(b)); }

// Best candidate: highest value, lexicographically smallest among ties.
inline PlSolution pick_best(const SeparablePL& f, const std::vector<std::vector<double>>& candidates) {
  PlSolution best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    values[i] = f(candidates[i]);
    best.value = std::max(best.value, values[i]);
  }
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!value_ties(values[i], best.value)) continue;
    if (!have || lex_less(candidates[i], best.x)) {
      best.x = candidates[i];
      have = true;
    }
  }
  if (!have) throw std::runtime_error("no feasible candidate found");
  best.value = f(best.x);
  return best;
}

inline void facet_candidates(const SeparablePL& f, const Polytope& region, std::size_t row,
                             std::vector<std::vector<double>>& out) {
  const auto& r = region.rows()[row];
  const double a0 = r.coef[0], a1 = r.coef[1];
  if (std::abs(a0) < 1e-300 && std::abs(a1) < 1e-300) return;
  // Parameterize the facet line by the coordinate with the larger coefficient's
  // partner: x_free = t, x_dep = (rhs - a_free * t) / a_dep.
  const std::size_t dep = std::abs(a1) >= std::abs(a0) ? 1 : 0;
  const std::size_t free = 1 - dep;
  const double a_dep = r.coef[dep], a_free = r.coef[free];
  auto point = [&](double t) {
    std::vector<double> x(2);
    x[free] = t;
    x[dep] = (r.rhs - a_free * t) / a_dep;
    return x;
  };
  // x_dep as a function of t is c0 + c1 * t.
  const double c0 = r.rhs / a_dep, c1 = -a_free / a_dep;

  double t_lo = region.lower(free), t_hi = region.upper(free);
  auto restrict = [&](double coef, double rhs) {  // coef * t <= rhs
    const double scale = 1e-12 * (1.0 + std::abs(rhs));
    if (std::abs(coef) < 1e-14) {
      if (rhs < -scale) t_hi = -std::numeric_limits<double>::infinity();
    } else if (coef > 0) {
      t_hi = std::min(t_hi, rhs / coef);
    } else {
      t_lo = std::max(t_lo, rhs / coef);
    }
  };
  restrict(c1, region.upper(dep) - c0);
  restrict(-c1, c0 - region.lower(dep));
  for (std::size_t o = 0; o < region.rows().size(); ++o) {
    if (o == row) continue;
    const auto& q = region.rows()[o];
    restrict(q.coef[free] + q.coef[dep] * c1, q.rhs - q.coef[dep] * c0);
  }
  if (!(t_lo <= t_hi + 1e-12 * (1.0 + std::abs(t_hi)))) return;
  t_hi = std::max(t_lo, t_hi);

  std::vector<double> ts = {t_lo, t_hi};
  for (double k : f.marginals[free].knots()) {
    if (k > t_lo && k < t_hi) ts.push_back(k);
  }
  if (std::abs(c1) > 1e-14) {
    for (double k : f.marginals[dep].knots()) {
      const double t = (k - c0) / c1;
      if (t > t_lo && t < t_hi) ts.push_back(t);
    }
  }
  for (double t : ts) {
    auto x = point(t);
    for (std::size_t k = 0; k < 2; ++k) x[k] = std::clamp(x[k], region.lower(k), region.upper(k));
    if (region.contains(x)) out.push_back(std::move(x));
  }
}

}  // namespace detail

/// Exact maximizer of a separable concave PL objective over the region.
/// Ties resolve to the lexicographically smallest maximizer.
inline PlSolution maximize_separable(const SeparablePL& f, const Polytope& region) {
  if (f.dim() != region.dim()) throw std::invalid_argument("objective/region dimension mismatch");
  if (!f.is_concave()) throw std::invalid_argument("objective must be concave");
  const std::size_t d = f.dim();

  std::vector<double> lo = region.lower(), hi = region.upper();
  if (d == 1 && !region.rows().empty()) {
    for (const auto& r : region.rows()) {
      const double a = r.coef[0];
      if (a > 0) hi[0] = std::min(hi[0], r.rhs / a);
      if (a < 0) lo[0] = std::max(lo[0], r.rhs / a);
    }
    if (lo[0] > hi[0]) {
      if (lo[0] - hi[0] > 1e-9 * (1.0 + std::abs(lo[0]))) throw std::invalid_argument("empty region");
      hi[0] = lo[0];
    }
  }

  std::vector<detail::Plateau> plateaus(d);
  for (std::size_t k = 0; k < d; ++k) plateaus[k] = detail::concave_plateau(f.marginals[k], lo[k], hi[k]);

  if (d == 1 || region.rows().empty()) {
    PlSolution sol;
    sol.x.resize(d);
    for (std::size_t k = 0; k < d; ++k) sol.x[k] = plateaus[k].first;
    sol.value = f(sol.x);
    return sol;
  }

  std::vector<std::vector<double>> candidates;
  for (double a : {plateaus[0].first, plateaus[0].last}) {
    for (double b : {plateaus[1].first, plateaus[1].last}) {
      std::vector<double> x = {a, b};
      if (region.contains(x)) candidates.push_back(std::move(x));
    }
  }
  for (std::size_t r = 0; r < region.rows().size(); ++r) detail::facet_candidates(f, region, r, candidates);
  return detail::pick_best(f, candidates);
}

/// Exact minimizer of a separable convex PL objective over the region.
inline PlSolution minimize_separable(const SeparablePL& f, const Polytope& region) {
  PlSolution sol = maximize_separable(f.negated(), region);
  sol.value = -sol.value;
  return sol;
}

}  // namespace statesearch
