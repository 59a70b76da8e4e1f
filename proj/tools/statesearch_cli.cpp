// Command-line front end: experiments, weight inspection and self-checks.
// Exit status: 0 success, 1 invalid usage or configuration, 2 runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "statesearch/statesearch.hpp"

namespace {

using namespace statesearch;
using harness::ConfigError;
using harness::ExperimentConfig;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> competitors;
  std::string weights;
  bool progress = false;
  std::size_t dp_burn_in = 0, dp_thin = 0, dp_samples = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file whose keys mirror the experiment settings");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--out", f.out, "Results CSV path (default: stdout)");
  cmd->add_option("--competitors", f.competitors, "Comma-separated competitor ids")->delimiter(',');
  cmd->add_option("--weights", f.weights, "Restrict weighted competitors to one scheme")
      ->check(CLI::IsMember({"kernel", "dp"}));
  cmd->add_option("--dp-burn-in", f.dp_burn_in, "Gibbs burn-in sweeps");
  cmd->add_option("--dp-thin", f.dp_thin, "Gibbs sweeps between kept samples");
  cmd->add_option("--dp-samples", f.dp_samples, "Kept partition samples");
  cmd->add_flag("--progress", f.progress, "Report progress on stderr");
}

// Explicit flags override the config file, which overrides defaults.
ExperimentConfig resolve(const CLI::App* cmd, const CommonFlags& f, const std::string& problem) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : harness::load_config(f.config_path);
  if (f.config_path.empty()) cfg.problem = problem;
  if (cfg.problem != problem) throw ConfigError("config file is for problem '" + cfg.problem + "'");
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--out")) cfg.output = f.out;
  if (cmd->count("--competitors")) cfg.competitors = f.competitors;
  if (cmd->count("--dp-burn-in")) cfg.dp_burn_in = f.dp_burn_in;
  if (cmd->count("--dp-thin")) cfg.dp_thin = f.dp_thin;
  if (cmd->count("--dp-samples")) cfg.dp_samples = f.dp_samples;
  if (!f.weights.empty()) {
    const std::string drop = f.weights == "kernel" ? "-dp" : "-kernel";
    std::vector<std::string> kept;
    for (const auto& c : cfg.resolved_competitors()) {
      if (c.size() < drop.size() || c.compare(c.size() - drop.size(), drop.size(), drop) != 0) kept.push_back(c);
    }
    cfg.competitors = kept;
  }
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::vector<double> parse_coords(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed query coordinate '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-dependent stochastic search experiments"};
  app.require_subcommand(1);

  CommonFlags nv_flags;
  auto* nv = app.add_subcommand("newsvendor", "Two-product newsvendor learning curves");
  add_common(nv, nv_flags);
  std::size_t paths = 0, test_size = 0;
  std::vector<std::size_t> checkpoints;
  nv->add_option("--paths", paths, "Sample paths");
  nv->add_option("--test-size", test_size, "Fixed test state/demand pairs");
  nv->add_option("--checkpoints", checkpoints, "Comma-separated training lengths")->delimiter(',');

  CommonFlags wind_flags;
  auto* wd = app.add_subcommand("wind", "Hour-ahead wind commitment");
  add_common(wd, wind_flags);
  bool synthetic = false;
  std::string csv;
  std::size_t years = 0, max_hours = 0;
  wd->add_flag("--synthetic", synthetic, "Use the calibrated synthetic wind series");
  wd->add_option("--csv", csv, "Wind CSV with header timestamp,wind");
  wd->add_option("--years", years, "Synthetic calendar years");
  wd->add_option("--max-test-hours", max_hours, "Evaluate at most this many hours per test year");

  auto* wt = app.add_subcommand("weights", "Print the weight vector of a query against a generated dataset");
  std::string dataset = "newsvendor", scheme = "kernel", query_text, wt_out;
  std::uint64_t wt_seed = 1;
  std::size_t wt_n = 100;
  wt->add_option("--dataset", dataset, "newsvendor or wind")->check(CLI::IsMember({"newsvendor", "wind"}));
  wt->add_option("--weights", scheme, "kernel or dp")->check(CLI::IsMember({"kernel", "dp"}));
  wt->add_option("--query", query_text, "Comma-separated query state")->required();
  wt->add_option("--n", wt_n, "Number of observations");
  wt->add_option("--seed", wt_seed, "Seed");
  wt->add_option("--out", wt_out, "Output CSV path (default: stdout)");

  auto* st = app.add_subcommand("selftest", "Run fast invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsageError;
  }

  try {
    if (nv->parsed()) {
      ExperimentConfig cfg = resolve(nv, nv_flags, "newsvendor");
      if (nv->count("--paths")) cfg.sample_paths = paths;
      if (nv->count("--test-size")) cfg.test_size = test_size;
      if (nv->count("--checkpoints")) cfg.checkpoints = checkpoints;
      cfg.validate();
      const auto table = harness::run_newsvendor_experiment(cfg, nv_flags.progress ? &std::cerr : nullptr);
      emit(table.to_csv(), cfg.output);
    } else if (wd->parsed()) {
      ExperimentConfig cfg = resolve(wd, wind_flags, "wind");
      if (wd->count("--csv")) {
        cfg.wind_csv = csv;
        cfg.synthetic = false;
      }
      if (synthetic) cfg.synthetic = true;
      if (wd->count("--years")) cfg.years = years;
      if (wd->count("--max-test-hours")) cfg.max_test_hours = max_hours;
      cfg.validate();
      const auto table = harness::run_wind_experiment(cfg, wind_flags.progress ? &std::cerr : nullptr);
      emit(table.to_csv(), cfg.output);
    } else if (wt->parsed()) {
      const StateVector raw(parse_coords(query_text));
      std::vector<StateVector> states;
      if (dataset == "newsvendor") {
        auto rng = harness::make_stream(wt_seed, 1);
        const auto mix = newsvendor::MixtureParams::draw(rng);
        for (const auto& d : newsvendor::generate_newsvendor_path(mix, wt_n, rng)) states.push_back(d.state);
      } else {
        ExperimentConfig cfg;
        cfg.problem = "wind";
        cfg.seed = wt_seed;
        cfg.years = 2;
        const auto data = harness::prepare_wind_data(cfg);
        for (const auto& s : wind::build_wind_states(data.records, data.contract, data.spot)) {
          if (states.size() == wt_n) break;
          states.push_back(s.state);
        }
      }
      if (states.empty()) throw ConfigError("--n must be positive");
      if (raw.dim() != states.front().dim()) {
        throw ConfigError("query needs " + std::to_string(states.front().dim()) + " coordinates");
      }
      const StateVector query(raw.coords(), states.front().kinds());
      WeightVector w;
      if (scheme == "kernel") {
        KernelWeighter k;
        w = k.weights(query, states);
      } else {
        DpWeighter d(dataset == "wind" ? DpmmConfig::wind_profile() : DpmmConfig::newsvendor_profile(), wt_seed);
        w = d.weights(query, states);
      }
      std::ostringstream os;
      os << "index,weight\n";
      for (std::size_t i = 0; i < w.size(); ++i) os << i << ',' << harness::detail::format_number(w[i]) << '\n';
      emit(os.str(), wt_out);
    } else if (st->parsed()) {
      bool all = true;
      for (const auto& r : harness::run_selftest()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        all = all && r.passed;
      }
      return all ? 0 : kRuntimeError;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
