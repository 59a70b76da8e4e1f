#pragma once

// Weighting schemes consumed by the optimizers. A scheme maps a query state
// and the observed states to a WeightVector over those observations.

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>

#include "statesearch/dpmm_weights.hpp"
#include "statesearch/kernel_weights.hpp"
#include "statesearch/state.hpp"

namespace statesearch {

template <class W>
concept WeightingScheme = requires(W& w, const StateVector& q, std::span<const StateVector> states) {
  { w.weights(q, states) } -> std::convertible_to<WeightVector>;
};

/// Equal weights regardless of state: the sample average approximation.
struct UniformWeighter {
  WeightVector weights(const StateVector&, std::span<const StateVector> states) const {
    if (states.empty()) throw std::invalid_argument("no observations");
    return uniform_weights(states.size());
  }
};

namespace detail {

// Identifies a state set by its length and its first and last members.
struct StateSetKey {
  std::size_t n = 0;
  StateVector first;
  StateVector last;

  static StateSetKey of(std::span<const StateVector> states) { return {states.size(), states.front(), states.back()}; }

  bool matches(std::span<const StateVector> states) const {
    return n == states.size() && n > 0 && states.front() == first && states.back() == last;
  }
  bool is_prefix_of(std::span<const StateVector> states) const {
    return n > 0 && n < states.size() && states.front() == first && states[n - 1] == last;
  }
};

}  // namespace detail

/// Nadaraya-Watson weights with the rule-of-thumb bandwidth of the current
/// state set; the bandwidth is recomputed whenever the set changes.
class KernelWeighter {
 public:
  WeightVector weights(const StateVector& query, std::span<const StateVector> states) {
    if (states.empty()) throw std::invalid_argument("no observations");
    if (states.size() == 1) return {1.0};
    return nadaraya_watson_weights(query, states, bandwidth_for(states));
  }

  const Bandwidths& bandwidth_for(std::span<const StateVector> states) {
    if (!bw_ || !cached_.matches(states)) {
      bw_ = rule_of_thumb_bandwidth(states);
      cached_ = detail::StateSetKey::of(states);
    }
    return *bw_;
  }

 private:
  std::optional<Bandwidths> bw_;
  detail::StateSetKey cached_;
};

/// Dirichlet-process weights. Partition samples depend only on the observed
/// states, so they are cached and reused until the state set changes. With a
/// warm-start schedule, growth of an append-only log continues the previous
/// chain from its last partition instead of restarting from scratch.
class DpWeighter {
 public:
  struct WarmStart {
    std::size_t burn_in = 0;
    std::size_t thin = 2;
    std::size_t num_samples = 10;
  };

  explicit DpWeighter(DpmmConfig cfg, std::uint64_t seed = 1, std::optional<WarmStart> warm = std::nullopt)
      : cfg_(std::move(cfg)), rng_(seed), warm_(warm) {
    cfg_.validate();
  }

  WeightVector weights(const StateVector& query, std::span<const StateVector> states) {
    if (states.empty()) throw std::invalid_argument("no observations");
    if (states.size() == 1) return {1.0};
    return model_for(states).weights(query);
  }

  /// Posterior partition samples for exactly this state set.
  const DpWeightModel& model_for(std::span<const StateVector> states) {
    if (model_ && cached_.matches(states)) return *model_;

    ComponentSpec spec = cfg_.resolve_spec(states);
    CollapsedGibbsSampler sampler(states, spec, cfg_.alpha);
    std::vector<Partition> samples;
    const bool extend = warm_ && model_ && cached_.is_prefix_of(states);
    if (extend) {
      sampler.initialize(model_->samples().back(), rng_);
      samples = run_chain(sampler, warm_->burn_in, warm_->thin, warm_->num_samples, rng_);
    } else {
      sampler.initialize(rng_);
      samples = run_chain(sampler, cfg_.burn_in, cfg_.thin, cfg_.num_samples, rng_);
    }
    model_.emplace(states, std::move(samples), std::move(spec));
    cached_ = detail::StateSetKey::of(states);
    return *model_;
  }

  const DpmmConfig& config() const { return cfg_; }

 private:
  DpmmConfig cfg_;
  std::mt19937_64 rng_;
  std::optional<WarmStart> warm_;
  std::optional<DpWeightModel> model_;
  detail::StateSetKey cached_;
};

}  // namespace statesearch
