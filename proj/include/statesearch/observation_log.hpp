#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "statesearch/state.hpp"

namespace statesearch {

/// Append-only record of observed states and what was learned after each.
/// Single writer; any number of readers while no append is in flight.
template <class Outcome>
class ObservationLog {
 public:
  using outcome_type = Outcome;

  void append(StateVector state, Outcome outcome) {
    if (!states_.empty() && state.dim() != states_.front().dim()) {
      throw std::invalid_argument("state dimension differs from earlier observations");
    }
    states_.push_back(std::move(state));
    outcomes_.push_back(std::move(outcome));
  }

  void reserve(std::size_t n) {
    states_.reserve(n);
    outcomes_.reserve(n);
  }

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }

  std::span<const StateVector> states() const { return states_; }
  std::span<const Outcome> outcomes() const { return outcomes_; }

  /// Views of the first n observations.
  std::span<const StateVector> states(std::size_t n) const { return std::span(states_).first(n); }
  std::span<const Outcome> outcomes(std::size_t n) const { return std::span(outcomes_).first(n); }

 private:
  std::vector<StateVector> states_;
  std::vector<Outcome> outcomes_;
};

}  // namespace statesearch
