#pragma once

// Experiment protocols. Newsvendor: learning curves over sample paths against
// a fixed test set. Wind: train on the first calendar year, evaluate hourly
// pledges on every later year.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "statesearch/fbo.hpp"
#include "statesearch/gbo.hpp"
#include "statesearch/harness/config.hpp"
#include "statesearch/harness/results.hpp"
#include "statesearch/problems/newsvendor.hpp"
#include "statesearch/problems/wind.hpp"
#include "statesearch/weighting.hpp"

namespace statesearch::harness {

namespace detail {

enum Stream : std::uint32_t {
  kMixture = 1,
  kTestSet,
  kTrainPath,
  kDpFbo,
  kGboKernel,
  kGboDpOnline,
  kGboDpEval,
  kWind,
  kContract,
  kSpot,
  kDpWind,
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

// Mean and sample standard deviation; sd is 0 for a single value.
inline Summary summarize(std::span<const double> v) {
  Summary s;
  if (v.empty()) return s;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
    s.mean = v.front();
    return s;
  }
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

inline std::uint64_t child_seed(std::uint64_t seed, Stream purpose, std::uint32_t index) {
  auto rng = make_stream(seed, purpose, index);
  return rng();
}

inline void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Newsvendor

/// Mean realized profit of `decide(state)` over the test pairs.
template <class Decide>
double newsvendor_test_value(const std::vector<newsvendor::NewsvendorDraw>& test, const newsvendor::NewsvendorParams& p,
                             Decide&& decide) {
  double total = 0.0;
  for (const auto& t : test) {
    const auto x = decide(t.state);
    total += newsvendor::newsvendor_value(x, t.demand, p);
  }
  return total / static_cast<double>(test.size());
}

/// Value per path for one online gradient-based competitor, at each checkpoint.
template <WeightingScheme Online, WeightingScheme Eval>
std::vector<double> run_gbo_path(const std::vector<newsvendor::NewsvendorDraw>& train,
                                 const std::vector<newsvendor::NewsvendorDraw>& test,
                                 const newsvendor::NewsvendorParams& params, const std::vector<std::size_t>& checkpoints,
                                 Online& online, Eval& eval, std::mt19937_64& rng) {
  const Polytope region = params.region();
  const Grid grid = Grid::over(region);
  GradientLog log;
  log.reserve(train.size());
  std::vector<double> values;
  std::size_t next = 0;
  for (std::size_t i = 0; i < train.size() && next < checkpoints.size(); ++i) {
    const auto x = gbo_step(train[i].state, log, online, region, grid, rng);
    const auto g = newsvendor::newsvendor_gradient(x, train[i].demand, params);
    // The optimizer minimizes, so it sees the gradient of the negated profit.
    log.append(train[i].state, {x, {-g[0], -g[1]}});
    if (log.size() == checkpoints[next]) {
      values.push_back(newsvendor_test_value(test, params, [&](const StateVector& s) {
        return gbo_query(s, log, eval, region).x;
      }));
      ++next;
    }
  }
  return values;
}

inline ResultsTable run_newsvendor_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr) {
  cfg.validate();
  if (cfg.problem != "newsvendor") throw ConfigError("config problem is not newsvendor");
  const newsvendor::NewsvendorProblem problem{};
  const Polytope region = problem.region();
  const DpmmConfig dp = cfg.dpmm();
  const auto& cps = cfg.checkpoints;
  const std::size_t horizon = cps.back();

  auto mix_rng = make_stream(cfg.seed, detail::kMixture);
  const auto mix = newsvendor::MixtureParams::draw(mix_rng);
  auto test_rng = make_stream(cfg.seed, detail::kTestSet);
  const auto test = newsvendor::generate_newsvendor_path(mix, cfg.test_size, test_rng);

  const double oracle_value = newsvendor_test_value(test, problem.params, [&](const StateVector& s) {
    return newsvendor::newsvendor_oracle(s, mix, problem.params);
  });

  // values[competitor][checkpoint index][path]
  std::map<std::string, std::vector<std::vector<double>>> values;
  const auto competitors = cfg.resolved_competitors();
  for (const auto& c : competitors) values[c].assign(cps.size(), {});

  for (std::size_t p = 0; p < cfg.sample_paths; ++p) {
    const auto path_index = static_cast<std::uint32_t>(p);
    auto path_rng = make_stream(cfg.seed, detail::kTrainPath, path_index);
    const auto train = newsvendor::generate_newsvendor_path(mix, horizon, path_rng);
    ObservationLog<newsvendor::DemandPair> log;
    for (const auto& d : train) log.append(d.state, d.demand);

    for (const auto& c : competitors) {
      detail::note(progress, "newsvendor path " + std::to_string(p + 1) + "/" + std::to_string(cfg.sample_paths) +
                                 ": " + c);
      auto& out = values[c];
      if (c == "oracle") {
        for (auto& v : out) v.push_back(oracle_value);
      } else if (c == "fbo-kernel" || c == "fbo-dp") {
        KernelWeighter kernel;
        DpWeighter dpw(dp, detail::child_seed(cfg.seed, detail::kDpFbo, path_index));
        for (std::size_t k = 0; k < cps.size(); ++k) {
          const auto states = log.states(cps[k]);
          const auto outcomes = log.outcomes(cps[k]);
          out[k].push_back(newsvendor_test_value(test, problem.params, [&](const StateVector& s) {
            const PlSolution sol = c == "fbo-kernel" ? fbo_decide(s, states, outcomes, kernel, problem, region)
                                                     : fbo_decide(s, states, outcomes, dpw, problem, region);
            return sol.x;
          }));
        }
      } else if (c == "gbo-kernel") {
        KernelWeighter kernel;
        auto rng = make_stream(cfg.seed, detail::kGboKernel, path_index);
        const auto v = run_gbo_path(train, test, problem.params, cps, kernel, kernel, rng);
        for (std::size_t k = 0; k < cps.size(); ++k) out[k].push_back(v[k]);
      } else if (c == "gbo-dp") {
        DpWeighter online(dp, detail::child_seed(cfg.seed, detail::kGboDpOnline, path_index),
                          DpWeighter::WarmStart{cfg.gbo_warm_burn_in, cfg.gbo_warm_thin, cfg.gbo_warm_samples});
        DpWeighter eval(dp, detail::child_seed(cfg.seed, detail::kGboDpEval, path_index));
        auto rng = make_stream(cfg.seed, detail::kGboDpOnline, path_index);
        const auto v = run_gbo_path(train, test, problem.params, cps, online, eval, rng);
        for (std::size_t k = 0; k < cps.size(); ++k) out[k].push_back(v[k]);
      }
    }
  }

  ResultsTable table;
  for (const auto& c : competitors) {
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const auto s = detail::summarize(values[c][k]);
      table.add({c, "newsvendor", static_cast<std::int64_t>(cps[k]), s.mean, 100.0 * s.mean / oracle_value,
                 static_cast<std::int64_t>(cfg.sample_paths), s.sd});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Wind

struct WindData {
  std::vector<wind::WindRecord> records;
  std::vector<double> contract;
  std::vector<double> spot;
  std::string dataset;
};

/// Synthetic series spanning whole calendar years from 2002, or the CSV.
inline WindData prepare_wind_data(const ExperimentConfig& cfg) {
  WindData d;
  if (cfg.synthetic) {
    auto profile = wind::SyntheticWindProfile::amarillo();
    const auto end = wind::make_hour(2002 + static_cast<int>(cfg.years), 1, 1, 0);
    auto rng = make_stream(cfg.seed, detail::kWind);
    d.records = wind::generate_synthetic_wind(profile, static_cast<std::size_t>(end - profile.start), rng);
    d.dataset = "synthetic";
  } else {
    d.records = wind::load_wind_csv(cfg.wind_csv);
    d.dataset = "csv";
  }
  auto contract_rng = make_stream(cfg.seed, detail::kContract);
  d.contract = wind::contract_prices(d.records.size(), contract_rng);
  auto spot_rng = make_stream(cfg.seed, detail::kSpot);
  d.spot = wind::ou_simulate(cfg.ou, d.records.size(), spot_rng, d.records.front().hour);
  return d;
}

inline ResultsTable run_wind_experiment(const ExperimentConfig& cfg, const WindData& data,
                                        std::ostream* progress = nullptr) {
  cfg.validate();
  if (cfg.problem != "wind") throw ConfigError("config problem is not wind");
  const auto samples = wind::build_wind_states(data.records, data.contract, data.spot);

  std::map<int, std::vector<const wind::WindSample*>> by_year;
  for (const auto& s : samples) by_year[wind::calendar_of(s.hour).year].push_back(&s);
  if (by_year.size() < 2) throw std::invalid_argument("insufficient data: need at least two calendar years");

  ObservationLog<wind::WindOutcome> train;
  for (const auto* s : by_year.begin()->second) train.append(s->state, s->outcome);
  std::vector<wind::WindSample> train_samples;
  for (const auto* s : by_year.begin()->second) train_samples.push_back(*s);
  const auto problem = wind::WindProblem::from_training(train_samples);
  const Polytope region = problem.region();
  const auto competitors = cfg.resolved_competitors();

  KernelWeighter kernel;
  DpWeighter dpw(cfg.dpmm(), detail::child_seed(cfg.seed, detail::kDpWind, 0));
  UniformWeighter uniform;
  double ignore_state_x = 0.0;
  if (cfg.runs("ignore-state")) ignore_state_x = fbo_decide(train.states().front(), train, uniform, problem).x[0];
  if (cfg.runs("fbo-dp")) {
    detail::note(progress, "wind: sampling partitions over " + std::to_string(train.size()) + " training states");
    dpw.model_for(train.states());
  }

  ResultsTable table;
  for (auto it = std::next(by_year.begin()); it != by_year.end(); ++it) {
    const int year = it->first;
    auto hours = std::span<const wind::WindSample* const>(it->second);
    if (cfg.max_test_hours > 0 && hours.size() > cfg.max_test_hours) hours = hours.first(cfg.max_test_hours);
    std::map<std::string, std::vector<double>> revenue;
    for (const auto& c : competitors) revenue[c].reserve(hours.size());
    detail::note(progress, "wind: evaluating " + std::to_string(year) + " (" + std::to_string(hours.size()) + " hours)");
    for (const auto* h : hours) {
      const auto& o = h->outcome;
      for (const auto& c : competitors) {
        double x = 0.0;
        if (c == "known-wind") {
          x = o.wind_next;
        } else if (c == "ignore-state") {
          x = ignore_state_x;
        } else if (c == "fbo-kernel") {
          x = fbo_decide(h->state, train, kernel, problem).x[0];
        } else if (c == "fbo-dp") {
          x = fbo_decide(h->state, train, dpw, problem).x[0];
        }
        revenue[c].push_back(wind::wind_revenue(x, o.wind_next, o.contract, o.spot_next));
      }
    }
    double upper = 0.0;
    for (const auto* h : hours) upper += h->outcome.contract * h->outcome.wind_next;
    upper /= static_cast<double>(hours.size());
    for (const auto& c : competitors) {
      const auto s = detail::summarize(revenue[c]);
      table.add({c, data.dataset, year, s.mean, 100.0 * s.mean / upper, static_cast<std::int64_t>(hours.size()), s.sd});
    }
  }
  return table;
}

inline ResultsTable run_wind_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr) {
  cfg.validate();
  return run_wind_experiment(cfg, prepare_wind_data(cfg), progress);
}

}  // namespace statesearch::harness
