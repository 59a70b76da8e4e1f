#pragma once

// Dirichlet-process mixture weights. A collapsed Gibbs sampler draws
// partitions of the observed states; each partition induces weights by
// assigning the query state to an existing cluster (never a new one) and
// spreading that cluster's probability evenly over its members. Averaging
// over sampled partitions gives the Monte Carlo weight estimate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "statesearch/partition.hpp"
#include "statesearch/state.hpp"

namespace statesearch {

/// Normal-Inverse-Gamma base measure for a Gaussian dimension:
/// mu | sigma^2 ~ N(mean0, sigma^2 / nu0), sigma^2 ~ InvGamma(shape0, scale0).
struct GaussianNig {
  double mean0 = 0.0;
  double nu0 = 1.0;
  double shape0 = 2.0;
  double scale0 = 1.0;
};

/// Von Mises likelihood with known dispersion and a uniform prior on the mean.
struct VonMisesMean {
  double dispersion = 2.0;
  double period = 2.0 * std::numbers::pi;
};

using ComponentFamily = std::variant<GaussianNig, VonMisesMean>;

/// Base-measure family per state dimension.
struct ComponentSpec {
  std::vector<ComponentFamily> dims;

  std::size_t dim() const { return dims.size(); }

  void validate() const {
    for (const auto& f : dims) {
      if (const auto* g = std::get_if<GaussianNig>(&f)) {
        if (!(g->nu0 > 0.0 && g->shape0 > 0.0 && g->scale0 > 0.0)) {
          throw std::invalid_argument("NIG hyperparameters must be positive");
        }
      } else {
        const auto& v = std::get<VonMisesMean>(f);
        if (!(v.dispersion > 0.0 && v.period > 0.0)) {
          throw std::invalid_argument("von Mises dispersion and period must be positive");
        }
      }
    }
  }
};

/// Data-dependent defaults: NIG(sample mean, 1, 2, sample variance) on linear
/// dimensions and a von Mises mean with `dispersion` on circular ones.
inline ComponentSpec default_component_spec(std::span<const StateVector> states,
                                            double dispersion = 2.0) {
  if (states.empty()) throw std::invalid_argument("no observations");
  const std::size_t d = states.front().dim();
  require_dimension(states, d);
  ComponentSpec spec;
  const auto n = static_cast<double>(states.size());
  for (std::size_t j = 0; j < d; ++j) {
    const DimKind& kind = states.front().kind(j);
    if (kind.is_circular()) {
      spec.dims.emplace_back(VonMisesMean{dispersion, kind.period});
      continue;
    }
    double mean = 0.0;
    for (const auto& s : states) mean += s[j];
    mean /= n;
    double ss = 0.0;
    for (const auto& s : states) ss += (s[j] - mean) * (s[j] - mean);
    double var = states.size() > 1 ? ss / (n - 1.0) : 0.0;
    if (!(var > 0.0)) var = 1e-6 * (1.0 + mean * mean);
    spec.dims.emplace_back(GaussianNig{mean, 1.0, 2.0, var});
  }
  return spec;
}

struct DpmmConfig {
  double alpha = 1.0;
  /// Empty means data-dependent defaults from default_component_spec().
  std::optional<ComponentSpec> spec;
  double vm_dispersion = 2.0;
  std::size_t burn_in = 200;
  std::size_t thin = 5;
  std::size_t num_samples = 60;

  /// 500 sweeps: 200 burn-in, then a sample every 5.
  static DpmmConfig newsvendor_profile() { return {}; }

  /// 1000 burn-in sweeps, 100 samples spaced 10 apart.
  static DpmmConfig wind_profile() {
    DpmmConfig cfg;
    cfg.burn_in = 1000;
    cfg.thin = 10;
    cfg.num_samples = 100;
    return cfg;
  }

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (num_samples < 1) throw std::invalid_argument("num_samples must be at least 1");
    if (thin < 1) throw std::invalid_argument("thin must be at least 1");
    if (!(vm_dispersion > 0.0)) throw std::invalid_argument("vm_dispersion must be positive");
    if (spec) spec->validate();
  }

  ComponentSpec resolve_spec(std::span<const StateVector> states) const {
    return spec ? *spec : default_component_spec(states, vm_dispersion);
  }
};

// ---------------------------------------------------------------------------
// Special functions

inline double log_bessel_i0(double x) {
  x = std::abs(x);
  if (x < 500.0) return std::log(std::cyl_bessel_i(0.0, x));
  const double inv = 1.0 / x;
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
         std::log1p(inv * (0.125 + inv * (9.0 / 128.0 + inv * 225.0 / 3072.0)));
}

/// log of the exchangeable partition probability
/// alpha^(K-1) * prod_j (|C_j|-1)! / prod_{j=1}^{n-1} (alpha + j).
inline double eppf_log_prob(const Partition& partition, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const std::size_t n = partition.size();
  if (n == 0) throw std::invalid_argument("empty partition");
  const auto sizes = partition.cluster_sizes();
  double lp = static_cast<double>(sizes.size() - 1) * std::log(alpha);
  for (std::size_t sz : sizes) lp += std::lgamma(static_cast<double>(sz));
  lp -= std::lgamma(alpha + static_cast<double>(n)) - std::lgamma(alpha + 1.0);
  return lp;
}

// ---------------------------------------------------------------------------
// Sufficient statistics

namespace detail {

// Per-dimension features of one state: the coordinate centered at the prior
// mean and its square for Gaussian dimensions, (cos, sin) of the angle for
// von Mises dimensions.
inline void state_features(const StateVector& s, const ComponentSpec& spec, double* first,
                           double* second) {
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    if (const auto* g = std::get_if<GaussianNig>(&spec.dims[j])) {
      const double xc = s[j] - g->mean0;
      first[j] = xc;
      second[j] = xc * xc;
    } else {
      const auto& v = std::get<VonMisesMean>(spec.dims[j]);
      const double angle = 2.0 * std::numbers::pi * s[j] / v.period;
      first[j] = std::cos(angle);
      second[j] = std::sin(angle);
    }
  }
}

}  // namespace detail

/// Sufficient statistics of a cluster's members. Gaussian dimensions hold the
/// sum and sum of squares of prior-centered coordinates; von Mises dimensions
/// hold the resultant vector (sum of cos, sum of sin).
struct ClusterStats {
  std::size_t count = 0;
  std::vector<double> first;
  std::vector<double> second;

  static ClusterStats empty(std::size_t dim) { return {0, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)}; }

  static ClusterStats from_members(std::span<const StateVector> states,
                                   std::span<const std::size_t> members, const ComponentSpec& spec) {
    ClusterStats out = empty(spec.dim());
    std::vector<double> f(spec.dim()), g(spec.dim());
    for (std::size_t i : members) {
      detail::state_features(states[i], spec, f.data(), g.data());
      out.add(f.data(), g.data());
    }
    return out;
  }

  void add(const double* f, const double* g) {
    ++count;
    for (std::size_t j = 0; j < first.size(); ++j) {
      first[j] += f[j];
      second[j] += g[j];
    }
  }

  void remove(const double* f, const double* g) {
    --count;
    for (std::size_t j = 0; j < first.size(); ++j) {
      first[j] -= f[j];
      second[j] -= g[j];
    }
  }
};

// ---------------------------------------------------------------------------
// Posterior predictive densities

/// Posterior predictive of one cluster with parameters integrated out,
/// precomputed so that evaluation at a point is cheap.
class ClusterPredictive {
 public:
  ClusterPredictive() = default;

  ClusterPredictive(const ClusterStats& stats, const ComponentSpec& spec) { reset(stats, spec); }

  void reset(const ClusterStats& stats, const ComponentSpec& spec) {
    const std::size_t d = spec.dim();
    dims_.resize(d);
    log_const_ = 0.0;
    const auto m = static_cast<double>(stats.count);
    for (std::size_t j = 0; j < d; ++j) {
      Dim& out = dims_[j];
      if (const auto* g = std::get_if<GaussianNig>(&spec.dims[j])) {
        // Student-t with 2*shape_m degrees of freedom; see e.g. Murphy (2007).
        const double nu_m = g->nu0 + m;
        const double shape_m = g->shape0 + 0.5 * m;
        const double sx = stats.first[j];
        const double scale_m = g->scale0 + 0.5 * std::max(stats.second[j] - sx * sx / nu_m, 0.0);
        const double spread = 2.0 * scale_m * (nu_m + 1.0) / nu_m;  // df * scale^2
        out.gaussian = true;
        out.a = sx / nu_m;
        out.b = 1.0 / spread;
        out.c = shape_m + 0.5;
        log_const_ += std::lgamma(shape_m + 0.5) - std::lgamma(shape_m) -
                      0.5 * std::log(std::numbers::pi * spread);
      } else {
        const auto& v = std::get<VonMisesMean>(spec.dims[j]);
        const double kappa = v.dispersion;
        const double rc = stats.first[j];
        const double rs = stats.second[j];
        out.gaussian = false;
        out.a = rc;
        out.b = rs;
        out.c = kappa;
        log_const_ += -log_bessel_i0(kappa * std::hypot(rc, rs)) - log_bessel_i0(kappa) -
                      std::log(v.period);
      }
    }
  }

  /// Log predictive density at a point given by its features.
  double log_density(const double* first, const double* second) const {
    double lp = log_const_;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      const Dim& p = dims_[j];
      if (p.gaussian) {
        const double z = first[j] - p.a;
        lp -= p.c * std::log1p(z * z * p.b);
      } else {
        lp += log_bessel_i0(p.c * std::hypot(first[j] + p.a, second[j] + p.b));
      }
    }
    return lp;
  }

 private:
  struct Dim {
    bool gaussian = true;
    double a = 0.0;  // Gaussian: location; von Mises: resultant cos sum
    double b = 0.0;  // Gaussian: 1/(df*scale^2); von Mises: resultant sin sum
    double c = 0.0;  // Gaussian: (df+1)/2; von Mises: dispersion
  };

  std::vector<Dim> dims_;
  double log_const_ = 0.0;
};

/// log of the integral of g(s | theta) against the posterior of theta given
/// the cluster members (or the base measure when the cluster is empty).
inline double cluster_predictive_logdensity(const StateVector& s, const ClusterStats& stats,
                                            const ComponentSpec& spec) {
  if (s.dim() != spec.dim()) throw std::invalid_argument("state/spec dimension mismatch");
  std::vector<double> f(spec.dim()), g(spec.dim());
  detail::state_features(s, spec, f.data(), g.data());
  return ClusterPredictive(stats, spec).log_density(f.data(), g.data());
}

// ---------------------------------------------------------------------------
// Collapsed Gibbs sampler

/// Collapsed Gibbs sampler over cluster labels with conjugate base measures.
/// Owns its chain state; not thread-safe, but independent instances are.
class CollapsedGibbsSampler {
 public:
  CollapsedGibbsSampler(std::span<const StateVector> states, ComponentSpec spec, double alpha)
      : spec_(std::move(spec)), alpha_(alpha), log_alpha_(std::log(alpha)) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    spec_.validate();
    require_dimension(states, spec_.dim());
    dim_ = spec_.dim();
    n_ = states.size();
    first_.resize(n_ * dim_);
    second_.resize(n_ * dim_);
    for (std::size_t i = 0; i < n_; ++i) {
      detail::state_features(states[i], spec_, first_.data() + i * dim_, second_.data() + i * dim_);
    }
    labels_.assign(n_, -1);
    prior_ = ClusterPredictive(ClusterStats::empty(dim_), spec_);
  }

  std::size_t size() const { return n_; }
  const ComponentSpec& spec() const { return spec_; }

  /// Adopts an existing clustering of a prefix of the states; the remaining
  /// states are placed sequentially from their full conditionals.
  template <class Rng>
  void initialize(const Partition& prefix, Rng& rng) {
    if (prefix.size() > n_) throw std::invalid_argument("partition larger than data");
    clusters_.clear();
    free_.clear();
    labels_.assign(n_, -1);
    for (std::size_t c = 0; c < prefix.num_clusters(); ++c) {
      clusters_.push_back(Cluster{ClusterStats::empty(dim_), {}});
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      labels_[i] = prefix.label(i);
      clusters_[static_cast<std::size_t>(labels_[i])].stats.add(feat1(i), feat2(i));
    }
    for (auto& c : clusters_) c.predictive.reset(c.stats, spec_);
    for (std::size_t i = prefix.size(); i < n_; ++i) assign(i, rng);
    canonicalize();
  }

  /// Sequential placement of every state, as if arriving one at a time.
  template <class Rng>
  void initialize(Rng& rng) {
    initialize(Partition{}, rng);
  }

  /// One pass over i = 0..n-1: remove state i, then reassign it to an
  /// existing cluster with probability proportional to n_{-i,c} times the
  /// cluster predictive, or to a new cluster proportional to alpha times the
  /// prior predictive.
  template <class Rng>
  void sweep(Rng& rng) {
    for (std::size_t i = 0; i < n_; ++i) {
      remove(i);
      assign(i, rng);
    }
    canonicalize();
  }

  Partition partition() const { return Partition(labels_); }

  /// Statistics for each cluster in canonical order (valid after a sweep).
  std::vector<ClusterStats> cluster_stats() const {
    std::vector<ClusterStats> out;
    out.reserve(clusters_.size());
    for (const auto& c : clusters_) out.push_back(c.stats);
    return out;
  }

 private:
  struct Cluster {
    ClusterStats stats;
    ClusterPredictive predictive;
  };

  const double* feat1(std::size_t i) const { return first_.data() + i * dim_; }
  const double* feat2(std::size_t i) const { return second_.data() + i * dim_; }

  void remove(std::size_t i) {
    const int c = labels_[i];
    if (c < 0) return;
    Cluster& cl = clusters_[static_cast<std::size_t>(c)];
    cl.stats.remove(feat1(i), feat2(i));
    labels_[i] = -1;
    if (cl.stats.count == 0) {
      cl.stats = ClusterStats::empty(dim_);
      free_.push_back(static_cast<std::size_t>(c));
    } else {
      cl.predictive.reset(cl.stats, spec_);
    }
  }

  template <class Rng>
  void assign(std::size_t i, Rng& rng) {
    // Slots with zero count are free and skipped; index k is the new cluster.
    const std::size_t k = clusters_.size();
    logp_.resize(k + 1);
    double max_lp = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (clusters_[c].stats.count == 0) {
        logp_[c] = -std::numeric_limits<double>::infinity();
        continue;
      }
      logp_[c] = std::log(static_cast<double>(clusters_[c].stats.count)) +
                 clusters_[c].predictive.log_density(feat1(i), feat2(i));
      max_lp = std::max(max_lp, logp_[c]);
    }
    logp_[k] = log_alpha_ + prior_.log_density(feat1(i), feat2(i));
    max_lp = std::max(max_lp, logp_[k]);
    double total = 0.0;
    for (double& v : logp_) {
      v = std::exp(v - max_lp);
      total += v;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = 0;
    for (; pick < k; ++pick) {
      if (logp_[pick] == 0.0) continue;
      u -= logp_[pick];
      if (u < 0.0) break;
    }
    if (pick == k) {
      if (!free_.empty()) {
        pick = free_.back();
        free_.pop_back();
      } else {
        clusters_.push_back(Cluster{ClusterStats::empty(dim_), {}});
      }
    }
    Cluster& cl = clusters_[pick];
    cl.stats.add(feat1(i), feat2(i));
    cl.predictive.reset(cl.stats, spec_);
    labels_[i] = static_cast<int>(pick);
  }

  // Renumber clusters by smallest member index and drop empty slots.
  void canonicalize() {
    std::vector<int> remap(clusters_.size(), -1);
    int next = 0;
    for (int l : labels_) {
      if (l >= 0 && remap[static_cast<std::size_t>(l)] < 0) remap[static_cast<std::size_t>(l)] = next++;
    }
    std::vector<Cluster> reordered(static_cast<std::size_t>(next));
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
      if (remap[c] >= 0) reordered[static_cast<std::size_t>(remap[c])] = std::move(clusters_[c]);
    }
    clusters_ = std::move(reordered);
    free_.clear();
    for (int& l : labels_) {
      if (l >= 0) l = remap[static_cast<std::size_t>(l)];
    }
  }

  ComponentSpec spec_;
  double alpha_;
  double log_alpha_;
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<int> labels_;
  std::vector<Cluster> clusters_;
  std::vector<std::size_t> free_;
  ClusterPredictive prior_;
  std::vector<double> logp_;
};

/// One sweep of the sampler starting from `partition`.
template <class Rng>
Partition gibbs_sweep(const Partition& partition, std::span<const StateVector> states,
                      const DpmmConfig& cfg, Rng& rng) {
  if (partition.size() != states.size()) throw std::invalid_argument("partition does not cover the states");
  cfg.validate();
  CollapsedGibbsSampler sampler(states, cfg.resolve_spec(states), cfg.alpha);
  sampler.initialize(partition, rng);
  sampler.sweep(rng);
  return sampler.partition();
}

/// Runs `sampler` for burn_in sweeps, then records a partition every `thin`
/// sweeps until num_samples are collected.
template <class Rng>
std::vector<Partition> run_chain(CollapsedGibbsSampler& sampler, std::size_t burn_in, std::size_t thin,
                                 std::size_t num_samples, Rng& rng) {
  for (std::size_t s = 0; s < burn_in; ++s) sampler.sweep(rng);
  std::vector<Partition> out;
  out.reserve(num_samples);
  for (std::size_t m = 0; m < num_samples; ++m) {
    for (std::size_t s = 0; s < thin; ++s) sampler.sweep(rng);
    out.push_back(sampler.partition());
  }
  return out;
}

template <class Rng>
std::vector<Partition> sample_partitions(std::span<const StateVector> states, const DpmmConfig& cfg,
                                         Rng& rng) {
  if (states.empty()) throw std::invalid_argument("no observations");
  cfg.validate();
  CollapsedGibbsSampler sampler(states, cfg.resolve_spec(states), cfg.alpha);
  sampler.initialize(rng);
  return run_chain(sampler, cfg.burn_in, cfg.thin, cfg.num_samples, rng);
}

// ---------------------------------------------------------------------------
// Weights

namespace detail {

// Adds (scale * p_s(C_j) / |C_j|) to every member of every cluster.
inline void accumulate_conditional(std::span<const double> query_first, std::span<const double> query_second,
                                   const Partition& partition, std::span<const ClusterPredictive> predictives,
                                   std::span<const std::size_t> sizes, double scale, std::vector<double>& logp,
                                   WeightVector& out) {
  const std::size_t k = partition.num_clusters();
  logp.resize(k);
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    logp[c] = std::log(static_cast<double>(sizes[c])) +
              predictives[c].log_density(query_first.data(), query_second.data());
    max_lp = std::max(max_lp, logp[c]);
  }
  double total = 0.0;
  for (double& v : logp) {
    v = std::exp(v - max_lp);
    total += v;
  }
  for (std::size_t c = 0; c < k; ++c) logp[c] = scale * logp[c] / (total * static_cast<double>(sizes[c]));
  for (std::size_t i = 0; i < partition.size(); ++i) out[i] += logp[static_cast<std::size_t>(partition.label(i))];
}

}  // namespace detail

/// Weights given one partition: p_s(C_j) proportional to |C_j| times the
/// cluster predictive at the query, over existing clusters only, split evenly
/// among each cluster's members.
inline WeightVector conditional_weights(const StateVector& query, const Partition& partition,
                                        std::span<const StateVector> states, const ComponentSpec& spec) {
  if (partition.size() != states.size()) throw std::invalid_argument("partition does not cover the states");
  if (states.empty()) throw std::invalid_argument("no observations");
  const auto members = partition.clusters();
  std::vector<ClusterPredictive> preds;
  std::vector<std::size_t> sizes;
  for (const auto& m : members) {
    preds.emplace_back(ClusterStats::from_members(states, m, spec), spec);
    sizes.push_back(m.size());
  }
  std::vector<double> f(spec.dim()), g(spec.dim()), scratch;
  detail::state_features(query, spec, f.data(), g.data());
  WeightVector w(states.size(), 0.0);
  detail::accumulate_conditional(f, g, partition, preds, sizes, 1.0, scratch, w);
  return w;
}

/// Posterior partition samples over a fixed set of states, with cluster
/// predictives precomputed so that weights for many queries are cheap.
class DpWeightModel {
 public:
  DpWeightModel(std::span<const StateVector> states, std::vector<Partition> samples, ComponentSpec spec)
      : n_(states.size()), spec_(std::move(spec)), samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("no partition samples");
    for (const auto& p : samples_) {
      if (p.size() != n_) throw std::invalid_argument("partition does not cover the states");
      const auto members = p.clusters();
      Entry e;
      for (const auto& m : members) {
        e.predictives.emplace_back(ClusterStats::from_members(states, m, spec_), spec_);
        e.sizes.push_back(m.size());
      }
      entries_.push_back(std::move(e));
    }
  }

  std::size_t size() const { return n_; }
  const std::vector<Partition>& samples() const { return samples_; }
  const ComponentSpec& spec() const { return spec_; }

  /// (1/M) sum over sampled partitions of the conditional weights.
  WeightVector weights(const StateVector& query) const {
    if (query.dim() != spec_.dim()) throw std::invalid_argument("state/spec dimension mismatch");
    std::vector<double> f(spec_.dim()), g(spec_.dim()), scratch;
    detail::state_features(query, spec_, f.data(), g.data());
    WeightVector w(n_, 0.0);
    const double scale = 1.0 / static_cast<double>(samples_.size());
    for (std::size_t m = 0; m < samples_.size(); ++m) {
      detail::accumulate_conditional(f, g, samples_[m], entries_[m].predictives, entries_[m].sizes, scale,
                                     scratch, w);
    }
    // Guard the sum-to-one invariant against accumulated rounding.
    normalize_in_place(w);
    return w;
  }

 private:
  struct Entry {
    std::vector<ClusterPredictive> predictives;
    std::vector<std::size_t> sizes;
  };

  std::size_t n_;
  ComponentSpec spec_;
  std::vector<Partition> samples_;
  std::vector<Entry> entries_;
};

/// Monte Carlo Dirichlet-process weights of the states for one query.
template <class Rng>
WeightVector dp_weights(const StateVector& query, std::span<const StateVector> states, const DpmmConfig& cfg,
                        Rng& rng) {
  if (states.empty()) throw std::invalid_argument("no observations");
  if (states.size() == 1) return {1.0};
  auto samples = sample_partitions(states, cfg, rng);
  return DpWeightModel(states, std::move(samples), cfg.resolve_spec(states)).weights(query);
}

}  // namespace statesearch
