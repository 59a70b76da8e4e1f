#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "statesearch/statesearch.hpp"

namespace ss = statesearch;
namespace hs = statesearch::harness;

TEST(Results, CsvRoundTripIsExact) {
  hs::ResultsTable t;
  t.add({"fbo-kernel", "newsvendor", 25, 1.0 / 3.0, 97.123456789, 8, 0.1});
  t.add({"oracle", "newsvendor", 500, 52.25, 100.0, 8, 0.0});
  t.add({"ignore-state", "synthetic", 2003, -1e-300, std::numeric_limits<double>::max(), 8760, 3e5});
  const std::string csv = t.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), hs::kResultsHeader);
  const auto back = hs::ResultsTable::from_csv(csv);
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.to_csv(), csv);
  ASSERT_NE(back.find("oracle", "newsvendor", 500), nullptr);
  EXPECT_EQ(back.find("oracle", "newsvendor", 25), nullptr);
}

TEST(Results, RejectsMalformedCsv) {
  EXPECT_THROW(hs::ResultsTable::from_csv("bad header\n"), std::invalid_argument);
  const std::string head = std::string(hs::kResultsHeader) + "\n";
  EXPECT_THROW(hs::ResultsTable::from_csv(head + "a,b,1,2,3,4\n"), std::invalid_argument);
  try {
    hs::ResultsTable::from_csv(head + "a,b,1,2,3,4,5\na,b,x,2,3,4,5\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  hs::ResultsTable t;
  EXPECT_THROW(t.add({"has,comma", "d", 1, 0, 0, 1, 0}), std::invalid_argument);
}

TEST(Config, ParsesEveryKey) {
  const auto j = nlohmann::json::parse(R"({
    "problem": "wind", "competitors": ["fbo-kernel", "known-wind"], "seed": 99, "output": "out.csv",
    "years": 3, "max_test_hours": 100, "dp_alpha": 0.5, "dp_dispersion": 4.0, "dp_burn_in": 7,
    "dp_thin": 3, "dp_samples": 11, "ou_level": 2.5, "ou_kappa": 0.4, "ou_sigma": 0.2,
    "ou_daily_amplitude": 0.1, "ou_seasonal_amplitude": 0.0, "gbo_warm_samples": 4})");
  const auto c = hs::config_from_json(j);
  EXPECT_EQ(c.problem, "wind");
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.years, 3u);
  EXPECT_EQ(c.max_test_hours, 100u);
  EXPECT_EQ(c.ou.level, 2.5);
  EXPECT_EQ(c.ou.kappa, 0.4);
  EXPECT_EQ(c.gbo_warm_samples, 4u);
  const auto dp = c.dpmm();
  EXPECT_EQ(dp.alpha, 0.5);
  EXPECT_EQ(dp.vm_dispersion, 4.0);
  EXPECT_EQ(dp.burn_in, 7u);
  EXPECT_EQ(dp.thin, 3u);
  EXPECT_EQ(dp.num_samples, 11u);
  EXPECT_TRUE(c.runs("known-wind"));
  EXPECT_FALSE(c.runs("fbo-dp"));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ProfilesDependOnProblem) {
  hs::ExperimentConfig c;
  EXPECT_EQ(c.dpmm().burn_in, 200u);
  EXPECT_EQ(c.resolved_competitors(), hs::newsvendor_competitors());
  c.problem = "wind";
  EXPECT_EQ(c.dpmm().burn_in, 1000u);
  EXPECT_EQ(c.dpmm().num_samples, 100u);
  EXPECT_EQ(c.resolved_competitors(), hs::wind_competitors());
}

TEST(Config, RejectsInvalidSettings) {
  EXPECT_THROW(hs::config_from_json(nlohmann::json::parse(R"({"sede": 1})")), hs::ConfigError);
  EXPECT_THROW(hs::config_from_json(nlohmann::json::parse(R"({"seed": "one"})")), hs::ConfigError);
  EXPECT_THROW(hs::config_from_json(nlohmann::json::parse("[1]")), hs::ConfigError);
  auto bad = [](auto mutate) {
    hs::ExperimentConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), hs::ConfigError);
  };
  bad([](auto& c) { c.problem = "inventory"; });
  bad([](auto& c) { c.competitors = {"known-wind"}; });
  bad([](auto& c) { c.sample_paths = 0; });
  bad([](auto& c) { c.checkpoints = {50, 25}; });
  bad([](auto& c) { c.checkpoints = {}; });
  bad([](auto& c) { c.dp_samples = 0; });
  bad([](auto& c) { c.ou.kappa = 0.0; });
  bad([](auto& c) {
    c.problem = "wind";
    c.years = 1;
  });
  bad([](auto& c) {
    c.problem = "wind";
    c.synthetic = false;
  });
}

TEST(Config, MissingFileNamesThePath) {
  try {
    hs::load_config("/no/such/config.json");
    FAIL();
  } catch (const hs::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/no/such/config.json"), std::string::npos);
  }
}

TEST(Config, StreamsAreReproducibleAndDistinct) {
  auto a = hs::make_stream(5, 1, 0), b = hs::make_stream(5, 1, 0), c = hs::make_stream(5, 1, 1),
       d = hs::make_stream(5, 2, 0), e = hs::make_stream(6, 1, 0);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
  EXPECT_NE(va, e());
}

TEST(Summary, MeanAndSampleSd) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto s = hs::detail::summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
  const std::vector<double> same(7, 0.1);
  EXPECT_EQ(hs::detail::summarize(same).mean, 0.1);
  EXPECT_EQ(hs::detail::summarize(same).sd, 0.0);
}

TEST(NewsvendorExperiment, SmallRunShapeAndDeterminism) {
  hs::ExperimentConfig c;
  c.sample_paths = 2;
  c.test_size = 10;
  c.checkpoints = {10, 20};
  c.dp_burn_in = 5;
  c.dp_thin = 1;
  c.dp_samples = 3;
  const auto t = hs::run_newsvendor_experiment(c);
  EXPECT_EQ(t.size(), hs::newsvendor_competitors().size() * 2);
  for (const auto& r : t.rows()) {
    EXPECT_EQ(r.replications, 2);
    EXPECT_TRUE(std::isfinite(r.mean_value));
  }
  const auto* oracle = t.find("oracle", "newsvendor", 20);
  ASSERT_NE(oracle, nullptr);
  EXPECT_EQ(oracle->pct_upper, 100.0);
  EXPECT_EQ(oracle->sd, 0.0);
  EXPECT_EQ(hs::run_newsvendor_experiment(c).to_csv(), t.to_csv());
  c.seed = 2;
  EXPECT_NE(hs::run_newsvendor_experiment(c).to_csv(), t.to_csv());
}

TEST(WindExperiment, SmallRunShape) {
  hs::ExperimentConfig c;
  c.problem = "wind";
  c.years = 3;
  c.max_test_hours = 100;
  c.competitors = {"known-wind", "fbo-kernel", "ignore-state"};
  const auto t = hs::run_wind_experiment(c);
  ASSERT_EQ(t.size(), 6u);
  for (const auto& r : t.rows()) {
    EXPECT_EQ(r.dataset, "synthetic");
    EXPECT_EQ(r.replications, 100);
    EXPECT_TRUE(r.checkpoint_or_year == 2003 || r.checkpoint_or_year == 2004);
  }
  EXPECT_NEAR(t.find("known-wind", "synthetic", 2003)->pct_upper, 100.0, 1e-9);
  EXPECT_EQ(hs::run_wind_experiment(c).to_csv(), t.to_csv());
}

TEST(WindExperiment, NeedsTwoCalendarYears) {
  hs::ExperimentConfig c;
  c.problem = "wind";
  auto data = hs::prepare_wind_data(c);
  data.records.resize(500);
  data.contract.resize(500);
  data.spot.resize(500);
  EXPECT_THROW(hs::run_wind_experiment(c, data), std::invalid_argument);
}

TEST(Selftest, AllChecksPass) {
  for (const auto& r : hs::run_selftest()) EXPECT_TRUE(r.passed) << r.name << " " << r.detail;
}
