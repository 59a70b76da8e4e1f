#pragma once

// Function-based optimization: weight whole observed response functions by
// state similarity and maximize the weighted sum exactly.

#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "statesearch/observation_log.hpp"
#include "statesearch/piecewise_linear.hpp"
#include "statesearch/polytope.hpp"
#include "statesearch/state.hpp"
#include "statesearch/weighting.hpp"

namespace statesearch {

/// A problem whose response to one outcome is separable piecewise linear in
/// the decision and can be folded into a builder with a weight.
template <class P>
concept FunctionProblem = requires(const P& p, const typename P::Outcome& o, std::span<const double> x,
                                   SeparablePLBuilder& b) {
  typename P::Outcome;
  { p.decision_dim() } -> std::convertible_to<std::size_t>;
  { p.value(x, o) } -> std::convertible_to<double>;
  p.accumulate(o, 1.0, b);
  { p.region() } -> std::convertible_to<Polytope>;
};

/// sum_i w_i F(x, outcome_i) as an exact separable PL function.
template <FunctionProblem P>
SeparablePL assemble_weighted_objective(std::span<const typename P::Outcome> outcomes, std::span<const double> weights,
                                        const P& problem) {
  if (outcomes.size() != weights.size()) throw std::invalid_argument("weights and samples differ in length");
  SeparablePLBuilder builder(problem.decision_dim());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (weights[i] != 0.0) problem.accumulate(outcomes[i], weights[i], builder);
  }
  return std::move(builder).build();
}

inline PlSolution maximize_pl(const SeparablePL& objective, const Polytope& region) {
  return maximize_separable(objective, region);
}

/// Weights the observations for the query, assembles and maximizes.
template <FunctionProblem P, WeightingScheme W>
PlSolution fbo_decide(const StateVector& query, std::span<const StateVector> states,
                      std::span<const typename P::Outcome> outcomes, W& weighter, const P& problem,
                      const Polytope& region) {
  if (states.empty()) throw std::invalid_argument("no observations");
  if (states.size() != outcomes.size()) throw std::invalid_argument("states and outcomes differ in length");
  const WeightVector w = weighter.weights(query, states);
  return maximize_pl(assemble_weighted_objective(outcomes, std::span<const double>(w), problem), region);
}

template <FunctionProblem P, WeightingScheme W>
PlSolution fbo_decide(const StateVector& query, const ObservationLog<typename P::Outcome>& log, W& weighter,
                      const P& problem) {
  return fbo_decide(query, log.states(), log.outcomes(), weighter, problem, problem.region());
}

}  // namespace statesearch
