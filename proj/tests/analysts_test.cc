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

#include "bayesstab/analysts.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "bayesstab/mechanisms.hpp"
#include "gtest/gtest.h"

namespace bayesstab {
namespace {

TEST(FixedPoolTest, Indexing) {
  const auto D = DomainDistribution::Uniform(2);
  const auto q1 = LinearQuery::Scalar({0.0, 1.0});
  const auto q2 = LinearQuery::Scalar({1.0, 0.0});
  const auto spec = AnalystSpec::FixedPool({q1, q2});
  EXPECT_EQ(NextQuery(spec, View{0, {}}, D), q1);
  EXPECT_EQ(NextQuery(spec, View{0, {{0.3}}}, D), q2);
  try {
    NextQuery(spec, View{0, {{0.3}, {0.1}}}, D);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
}

TEST(AnalystSpecTest, Validation) {
  EXPECT_THROW(AnalystSpec::FixedPool({}).Validate(1), Error);
  EXPECT_NO_THROW(AnalystSpec::RandomSignAttacker(3, 1.0).Validate(4));
  EXPECT_THROW(AnalystSpec::RandomSignAttacker(4, 1.0).Validate(4), Error);
  EXPECT_THROW(AnalystSpec::RandomSignAttacker(0, 1.0).Validate(4), Error);
}

TEST(VarianceControlledTest, TwoPointConstruction) {
  const auto D = DomainDistribution::Uniform(2);
  const auto spec = AnalystSpec::VarianceControlled(0.5, 1.0);
  std::set<double> first_values;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const LinearQuery q = NextQuery(spec, View{seed, {}}, D);
    const double mean = QueryMean(q, D)[0];
    std::vector<double> v(q.values().begin(), q.values().end());
    std::sort(v.begin(), v.end());
    EXPECT_NEAR(v[0], mean - 0.5, 1e-15);
    EXPECT_NEAR(v[1], mean + 0.5, 1e-15);
    first_values.insert(q.values()[0]);
  }
  EXPECT_EQ(first_values.size(), 2u) << "assignment should be random";
}

TEST(VarianceControlledTest, ExactStdAndRangeOnManyDomains) {
  for (std::size_t m = 2; m <= 9; ++m) {
    const auto D = DomainDistribution::Uniform(m);
    for (double sigma : {0.05, 0.2, 0.35, 0.45}) {
      const auto spec = AnalystSpec::VarianceControlled(sigma, 1.0);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LinearQuery q = NextQuery(spec, View{seed + 100 * m, {}}, D);
        const QueryStats s = ComputeQueryStats(q, D);
        EXPECT_NEAR(s.sigma1, sigma, 1e-12) << "m=" << m;
        EXPECT_LE(s.delta, 1.0 + 1e-12);
      }
    }
  }
  // Non-uniform prior.
  const DomainDistribution D({"a", "b", "c", "d"}, {0.1, 0.2, 0.3, 0.4});
  const LinearQuery q = NextQuery(AnalystSpec::VarianceControlled(0.4, 2.0), View{5, {}}, D);
  EXPECT_NEAR(ComputeQueryStats(q, D).sigma1, 0.4, 1e-12);
  EXPECT_LE(ComputeQueryStats(q, D).delta, 2.0 + 1e-12);
}

TEST(VarianceControlledTest, StdAboveHalfRangeIsCapped) {
  const auto D = DomainDistribution::Uniform(4);
  const auto spec = AnalystSpec::VarianceControlled(1.0, 1.0);
  EXPECT_DOUBLE_EQ(spec.EffectiveSigma(), 0.5);
  const QueryStats s = ComputeQueryStats(NextQuery(spec, View{1, {}}, D), D);
  EXPECT_NEAR(s.sigma1, 0.5, 1e-12);
}

TEST(VarianceControlledTest, UnreachableStdIsConfigurationError) {
  // On three equally likely elements no query of range 1 reaches std 1/2.
  const auto D = DomainDistribution::Uniform(3);
  try {
    NextQuery(AnalystSpec::VarianceControlled(0.5, 1.0), View{0, {}}, D);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
}

TEST(AnalystTest, ReplayIsDeterministic) {
  const auto D = DomainDistribution::Uniform(16);
  for (const auto& spec :
       {AnalystSpec::VarianceControlled(0.3, 1.0), AnalystSpec::RandomSignAttacker(3, 1.0)}) {
    const View prefix{77, {{0.1}, {-0.2}, {0.05}}};
    EXPECT_EQ(NextQuery(spec, prefix, D), NextQuery(spec, prefix, D));
  }
}

TEST(AttackerTest, QueriesRespectCaps) {
  const auto D = DomainDistribution::Uniform(50);
  const auto spec = AnalystSpec::RandomSignAttacker(8, 2.0);
  Rng rng = MakeRng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset s = SampleDataset(D, 30, rng);
    const Transcript t = RunSession(MechanismSpec::Empirical(), spec, s, D, 9, trial);
    for (std::size_t i = 0; i < t.queries.size(); ++i) {
      const QueryStats st = ComputeQueryStats(t.queries[i], D);
      EXPECT_LE(st.delta, 2.0 + 1e-12);
      EXPECT_LE(st.sigma1, 1.0 + 1e-12);
      for (double v : t.queries[i].values()) {
        EXPECT_LE(std::abs(v), 1.0 + 1e-12);
        if (i < 8) {
          EXPECT_DOUBLE_EQ(std::abs(v), 1.0);
        }
      }
    }
  }
}

TEST(AttackerTest, AllPositiveResidualsGiveClampedSum) {
  const std::size_t m = 6;
  const auto D = DomainDistribution::Uniform(m);
  const auto spec = AnalystSpec::RandomSignAttacker(4, 1.0);
  View prefix{12, {}};
  std::vector<double> z(m, 0.0);
  for (std::size_t j = 0; j < 4; ++j) {
    const LinearQuery probe = NextQuery(spec, prefix, D);
    prefix.responses.push_back({QueryMean(probe, D)[0] + 1.0});
    for (std::size_t x = 0; x < m; ++x) z[x] += 2.0 * probe.values()[x];
  }
  const LinearQuery last = NextQuery(spec, prefix, D);
  for (std::size_t x = 0; x < m; ++x) {
    EXPECT_NEAR(last.values()[x], 0.5 * std::clamp(z[x] / 2.0, -1.0, 1.0), 1e-15);
  }
}

// The final correlation query overfits the sample when answers are exact.
TEST(AttackerTest, EmpiricalMechanismGapExceedsThreshold) {
  const std::size_t n = 100, k_probe = 50, trials = 2000;
  const auto D = DomainDistribution::Uniform(1000);
  const auto spec = AnalystSpec::RandomSignAttacker(k_probe, 1.0);
  double gap = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = MakeRng(DeriveSeed(2024, t));
    const Dataset s = SampleDataset(D, n, rng);
    const Transcript tr = RunSession(MechanismSpec::Empirical(), spec, s, D, k_probe + 1,
                                     DeriveSeed(t, 1));
    gap += EvaluateQuery(tr.queries.back(), s)[0] - QueryMean(tr.queries.back(), D)[0];
  }
  gap /= static_cast<double>(trials);
  EXPECT_GT(gap, 0.3 * 1.0 * std::sqrt(static_cast<double>(k_probe) / n) / 2.0);
}

}  // namespace
}  // namespace bayesstab
