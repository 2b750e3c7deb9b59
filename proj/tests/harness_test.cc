// Copyright 2026 The bayesstab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayesstab/harness.hpp"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bayesstab/json_io.hpp"
#include "gtest/gtest.h"

namespace bayesstab {
namespace {

ExperimentConfig LaplaceConfig(std::size_t trials) {
  ExperimentConfig c;
  c.domain = DomainDistribution::Uniform(2);
  c.mechanism = MechanismSpec::Laplace(0.5);
  c.analyst = AnalystSpec::FixedPool(
      std::vector<LinearQuery>(10, LinearQuery::Scalar({0.0, 1.0})));
  c.n = 10;
  c.k = 10;
  c.trials = trials;
  c.seed = 7;
  for (int i = 1; i <= 12; ++i) c.alpha_grid.push_back(0.25 * i);
  return c;
}

TEST(WilsonTest, KnownValues) {
  const WilsonInterval zero = Wilson(0, 100);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, 0.03699, 1e-4);
  const WilsonInterval half = Wilson(50, 100);
  EXPECT_NEAR(half.lo, 0.40383, 1e-4);
  EXPECT_NEAR(half.hi, 0.59617, 1e-4);
  const WilsonInterval all = Wilson(100, 100);
  EXPECT_NEAR(all.lo, 0.96301, 1e-4);
  EXPECT_NEAR(all.hi, 1.0, 1e-12);
}

TEST(RunExperimentTest, EmpiricalMechanismHasNoSampleError) {
  ExperimentConfig c = LaplaceConfig(200);
  c.mechanism = MechanismSpec::Empirical();
  const ExperimentResult r = RunExperiment(c);
  for (const auto& row : r.rows) EXPECT_EQ(row.sample.value, 0.0);
  EXPECT_TRUE(CompareBound(r).all_pass);
}

TEST(RunExperimentTest, LaplaceSampleTailDominated) {
  const ExperimentResult r = RunExperiment(LaplaceConfig(20000));
  const VerdictTable v = CompareBound(r);
  EXPECT_TRUE(v.sample_pass);
  for (const auto& row : r.rows) {
    if (row.alpha == 2.0) {
      EXPECT_LE(row.sample.wilson.lo, std::min(1.0, 10.0 * std::exp(-4.0)));
    }
  }
}

TEST(RunExperimentTest, TailsNonIncreasing) {
  const ExperimentResult r = RunExperiment(LaplaceConfig(3000));
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_LE(r.rows[i].sample.value, r.rows[i - 1].sample.value);
    EXPECT_LE(r.rows[i].dist.value, r.rows[i - 1].dist.value);
  }
}

TEST(RunExperimentTest, DeterministicAcrossRunsAndThreadCounts) {
  ExperimentConfig c = LaplaceConfig(500);
  c.analyst = AnalystSpec::VarianceControlled(0.4, 1.0);
  c.domain = DomainDistribution::Uniform(6);
  c.threads = 1;
  const std::string a = CsvString(RunExperiment(c));
  c.threads = 4;
  const std::string b = CsvString(RunExperiment(c));
  EXPECT_EQ(a, b);
  c.seed = 8;
  EXPECT_NE(CsvString(RunExperiment(c)), a);
}

// Tail estimates are a function of the multiset of trial records, so the
// order in which trials are aggregated does not matter.
TEST(RunExperimentTest, TrialsAreExchangeable) {
  const ExperimentResult r = RunExperiment(LaplaceConfig(1000));
  std::vector<double> errs;
  for (const auto& t : r.trials) errs.push_back(t.errors.err_sample);
  std::reverse(errs.begin(), errs.end());
  for (const auto& row : r.rows) {
    std::size_t above = 0;
    for (double e : errs) above += e > row.alpha;
    EXPECT_DOUBLE_EQ(row.sample.value, static_cast<double>(above) / errs.size());
  }
}

TEST(RunExperimentTest, OracleAddsPosteriorColumns) {
  ExperimentConfig c;
  c.domain = DomainDistribution::Uniform(2);
  c.mechanism = MechanismSpec::Laplace(0.5);
  c.analyst = AnalystSpec::FixedPool({LinearQuery::Scalar({0.0, 1.0}),
                                      LinearQuery::Scalar({1.0, 0.0})});
  c.n = 4;
  c.k = 2;
  c.trials = 200;
  c.alpha_grid = {0.5, 1.0, 1.5};
  c.oracle_enabled = true;
  const ExperimentResult r = RunExperiment(c);
  ASSERT_TRUE(r.rows.front().posterior.has_value());
  for (const auto& t : r.trials) ASSERT_TRUE(t.errors.err_posterior.has_value());
  const std::string csv = CsvString(r);
  EXPECT_NE(csv.find("tail_posterior"), std::string::npos);
  EXPECT_TRUE(CompareBound(r).all_pass);
}

TEST(RunExperimentTest, OracleBeyondCapIsConfigurationError) {
  ExperimentConfig c = LaplaceConfig(10);
  c.domain = DomainDistribution::Uniform(12);
  c.analyst = AnalystSpec::VarianceControlled(0.3, 1.0);
  c.n = 30;
  c.oracle_enabled = true;
  try {
    RunExperiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
}

TEST(RunExperimentTest, ConfigValidation) {
  ExperimentConfig c = LaplaceConfig(10);
  c.alpha_grid = {1.0, 0.5};
  EXPECT_THROW(RunExperiment(c), Error);
  c = LaplaceConfig(0);
  EXPECT_THROW(RunExperiment(c), Error);
}

TEST(CompareBoundTest, VacuousBoundAndZeroTailPass) {
  ExperimentResult r;
  AlphaRow row;
  row.alpha = 1.0;
  row.sample = {0.9, {0.85, 0.95}};
  row.bound_sample = 1.0;
  r.rows.push_back(row);
  EXPECT_TRUE(CompareBound(r).all_pass);
  r.rows[0].sample = {0.0, Wilson(0, 100)};
  r.rows[0].bound_sample = 0.0;
  EXPECT_TRUE(CompareBound(r).all_pass);
  r.rows[0].sample = {0.5, Wilson(50, 100)};
  r.rows[0].bound_sample = 0.3;
  EXPECT_FALSE(CompareBound(r).all_pass);
}

TEST(CsvTest, HeaderAndMetadata) {
  const std::string csv = CsvString(RunExperiment(LaplaceConfig(50)));
  EXPECT_EQ(csv.rfind("# bayesstab", 0), 0u);
  EXPECT_NE(csv.find("\nalpha,tail_sample,tail_sample_wilson_lo,tail_sample_wilson_hi,tail_dist,"
                     "tail_dist_wilson_lo,tail_dist_wilson_hi,bound_sample,bound_dist,"
                     "validity_flag\n"),
            std::string::npos);
  EXPECT_EQ(csv.find("tail_posterior"), std::string::npos);
}

// A single gaussian query already exceeds the stated sample tail: the two-sided
// probability P(|xi| > alpha) is erfc(alpha / (sqrt(2) eta)), twice the bound.
TEST(GaussianTailTest, StatedBoundIsOneSided) {
  const double eta = 0.5, alpha = 1.0;
  const double stated = TailFunction::GaussianSample(1, eta).Evaluate(alpha).value;
  const double exact = std::erfc(alpha / (std::sqrt(2.0) * eta));
  EXPECT_NEAR(exact, 2.0 * stated, 1e-15);
}

// Shipped configurations at their full trial counts: the sample-accuracy tails
// respect their bounds. gaussian.json is exercised by the acceptance suite.
class ShippedConfigTest : public testing::TestWithParam<std::string> {};

TEST_P(ShippedConfigTest, SampleTailsPass) {
  const std::string path = std::string(BAYESSTAB_CONFIG_DIR) + "/" + GetParam();
  ExperimentConfig c = ExperimentFromJson(LoadJsonFile(path));
  const ExperimentResult r = RunExperiment(c);
  const VerdictTable v = CompareBound(r);
  for (const auto& row : v.rows) {
    EXPECT_TRUE(row.sample_pass) << GetParam() << " alpha=" << row.alpha;
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, ShippedConfigTest,
                         testing::Values("laplace.json", "attacker.json",
                                         "calibrated.json", "oracle_small.json"),
                         [](const testing::TestParamInfo<std::string>& info) {
                           std::string name = info.param.substr(0, info.param.find('.'));
                           return name;
                         });

}  // namespace
}  // namespace bayesstab
