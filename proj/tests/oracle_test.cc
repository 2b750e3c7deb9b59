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

#include "bayesstab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bayesstab/bounds.hpp"
#include "brute_force.hpp"
#include "gtest/gtest.h"

namespace bayesstab {
namespace {

const DomainDistribution kTwo = DomainDistribution({"a", "b"}, {0.5, 0.5});
const LinearQuery kBit = LinearQuery::Scalar({0.0, 1.0});

TEST(MultisetCountTest, Values) {
  EXPECT_EQ(MultisetCount(2, 2), 3.0);
  EXPECT_EQ(MultisetCount(5, 5), 126.0);
  EXPECT_EQ(MultisetCount(7, 1), 1.0);
  EXPECT_EQ(MultisetCount(10, 11), 184756.0);
  EXPECT_TRUE(Enumerable(10, 11));
  EXPECT_FALSE(Enumerable(20, 12));
}

TEST(ForEachMultisetTest, VisitsEveryCompositionOnce) {
  std::size_t visits = 0;
  ForEachMultiset(4, 3, [&](std::span<const std::size_t> c) {
    std::size_t total = 0;
    for (auto v : c) total += v;
    EXPECT_EQ(total, 4u);
    ++visits;
  });
  EXPECT_EQ(visits, 15u);
}

TEST(PosteriorTest, ZeroRoundsIsPrior) {
  const DomainDistribution D({"a", "b", "c"}, {0.2, 0.3, 0.5});
  const PosteriorReport r =
      PosteriorOverElements(D, 3, MechanismSpec::Laplace(1.0), {}, View{0, {}});
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_EQ(r.posterior.prob(x), D.prob(x));
    EXPECT_EQ(r.bayes_factors[x], 1.0);
  }
  const CovarianceCheck c = CheckCovariance(D, LinearQuery::Scalar({1, 2, 3}), r);
  EXPECT_EQ(c.lhs[0], 0.0);
  EXPECT_EQ(c.rhs[0], 0.0);
  EXPECT_EQ(StabilityLoss(D, r), 0.0);
}

TEST(PosteriorTest, ExactResponseIdentifiesElement) {
  const std::vector<LinearQuery> qs = {kBit};
  const PosteriorReport r =
      PosteriorOverElements(kTwo, 1, MechanismSpec::Empirical(), qs, View{0, {{1.0}}});
  EXPECT_EQ(r.posterior.prob(0), 0.0);
  EXPECT_EQ(r.posterior.prob(1), 1.0);
  EXPECT_NEAR(StabilityLoss(kTwo, r), 0.5, 1e-15);
}

TEST(PosteriorTest, LaplaceTwoSampleExample) {
  const std::vector<LinearQuery> qs = {kBit};
  const PosteriorReport r =
      PosteriorOverElements(kTwo, 2, MechanismSpec::Laplace(1.0), qs, View{0, {{1.0}}});
  // Multisets {a,a}, {a,b}, {b,b}: prior 1/4, 1/2, 1/4, likelihood
  // e^-1, e^-1/2, 1 (each / 2), b-fraction 0, 1/2, 1.
  const double w0 = 0.25 * std::exp(-1.0), w1 = 0.5 * std::exp(-0.5), w2 = 0.25;
  const double expected = (0.5 * w1 + w2) / (w0 + w1 + w2);
  EXPECT_NEAR(r.posterior.prob(1), expected, 1e-14);
  EXPECT_NEAR(r.posterior.prob(1), 0.6224593312018546, 1e-12);
  EXPECT_NEAR(r.log_evidence, std::log((w0 + w1 + w2) / 2.0), 1e-12);

  const CovarianceCheck c = CheckCovariance(kTwo, kBit, r);
  EXPECT_NEAR(c.lhs[0], 0.1224593312018546, 1e-12);
  EXPECT_NEAR(c.rhs[0], c.lhs[0], 1e-12);
  EXPECT_LE(c.gap, 1e-10);
  EXPECT_NEAR(StabilityLoss(kTwo, r), 0.1224593312018546, 1e-12);
}

TEST(PosteriorTest, ConstantQueryHasNoCovariance) {
  const std::vector<LinearQuery> qs = {kBit, kBit};
  const PosteriorReport r = PosteriorOverElements(kTwo, 3, MechanismSpec::Gaussian(0.3), qs,
                                                  View{0, {{0.9}, {0.7}}});
  const CovarianceCheck c = CheckCovariance(kTwo, LinearQuery::Scalar({2.0, 2.0}), r);
  EXPECT_NEAR(c.lhs[0], 0.0, 1e-15);
  EXPECT_NEAR(c.rhs[0], 0.0, 1e-15);
}

TEST(PosteriorTest, Errors) {
  const std::vector<LinearQuery> qs = {kBit};
  try {
    PosteriorOverElements(DomainDistribution::Uniform(12), 20, MechanismSpec::Laplace(1.0), {},
                          View{0, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInstanceTooLarge);
  }
  try {
    PosteriorOverElements(kTwo, 2, MechanismSpec::Empirical(), qs, View{0, {{0.3}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroEvidence);
  }
  EXPECT_THROW(PosteriorOverElements(kTwo, 2, MechanismSpec::Splitting(2), qs, View{0, {{0.5}}}),
               Error);
}

struct RandomInstance {
  DomainDistribution D = DomainDistribution::Uniform(1);
  std::size_t n = 1;
  MechanismSpec mech;
  std::vector<LinearQuery> queries;
  View view;
  std::vector<std::vector<double>> table;
  std::vector<double> responses;
};

RandomInstance MakeInstance(Rng& rng, int index) {
  RandomInstance inst;
  const std::size_t m = 2 + static_cast<std::size_t>(UniformUnit(rng) * 4);  // 2..5
  inst.n = 1 + static_cast<std::size_t>(UniformUnit(rng) * 5);              // 1..5
  const std::size_t k = 1 + static_cast<std::size_t>(UniformUnit(rng) * 3);  // 1..3
  std::vector<double> probs(m);
  double total = 0.0;
  for (auto& p : probs) total += (p = 0.05 + UniformUnit(rng));
  for (auto& p : probs) p /= total;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < m; ++i) labels.push_back("x" + std::to_string(i));
  inst.D = DomainDistribution(labels, probs, 1e-9);
  switch (index % 3) {
    case 0:
      inst.mech = MechanismSpec::Empirical();
      break;
    case 1:
      inst.mech = MechanismSpec::Laplace(0.1 + UniformUnit(rng));
      break;
    default:
      inst.mech = MechanismSpec::Gaussian(0.1 + UniformUnit(rng));
      break;
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> values(m);
    for (auto& v : values) v = UniformUnit(rng) * 2.0 - 1.0;
    inst.table.push_back(values);
    inst.queries.push_back(LinearQuery::Scalar(values));
  }
  const Dataset s = SampleDataset(inst.D, inst.n, rng);
  inst.view = RunSession(inst.mech, AnalystSpec::FixedPool(inst.queries), s, inst.D, k,
                         static_cast<std::uint64_t>(index))
                  .view;
  for (const auto& r : inst.view.responses) inst.responses.push_back(r[0]);
  return inst;
}

// The multiset enumerator agrees with the ordered-tuple reference.
TEST(PosteriorTest, MatchesOrderedTupleReference) {
  Rng rng = MakeRng(31337);
  for (int i = 0; i < 90; ++i) {
    const RandomInstance inst = MakeInstance(rng, i);
    const PosteriorReport r =
        PosteriorOverElements(inst.D, inst.n, inst.mech, inst.queries, inst.view);
    const auto noise = inst.mech.kind == MechanismKind::kEmpirical ? bayesstab_test::Noise::kExact
                       : inst.mech.kind == MechanismKind::kLaplace
                           ? bayesstab_test::Noise::kLaplace
                           : bayesstab_test::Noise::kGaussian;
    const std::vector<double> prior(inst.D.probs().begin(), inst.D.probs().end());
    const auto ref = bayesstab_test::OrderedTuplePosterior(prior, inst.n, noise, inst.mech.eta,
                                                           inst.table, inst.responses);
    double sum = 0.0, unit_mean = 0.0;
    for (std::size_t x = 0; x < inst.D.size(); ++x) {
      EXPECT_NEAR(r.posterior.prob(x), ref[x], 1e-10) << "instance " << i;
      sum += r.posterior.prob(x);
      unit_mean += inst.D.prob(x) * r.bayes_factors[x];
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    EXPECT_NEAR(unit_mean, 1.0, 1e-10);
  }
}

TEST(CovarianceTest, IdentityAndTotalVariationBound) {
  Rng rng = MakeRng(4242);
  for (int i = 0; i < 120; ++i) {
    const RandomInstance inst = MakeInstance(rng, i);
    const PosteriorReport r =
        PosteriorOverElements(inst.D, inst.n, inst.mech, inst.queries, inst.view);
    const double tv = StabilityLoss(inst.D, r);
    for (const auto& q : inst.queries) {
      const CovarianceCheck c = CheckCovariance(inst.D, q, r);
      EXPECT_LE(c.gap, 1e-9);
      EXPECT_LE(Norm(c.lhs), ComputeQueryStats(q, inst.D).delta * tv + 1e-9);
    }
  }
}

// Non-adaptive sessions: reordering (query, response) pairs leaves the
// posterior unchanged.
TEST(PosteriorTest, OrderInvariantForFixedQueries) {
  Rng rng = MakeRng(8);
  for (int i = 0; i < 30; ++i) {
    const RandomInstance inst = MakeInstance(rng, 3 * i + 1);
    std::vector<LinearQuery> qs(inst.queries.rbegin(), inst.queries.rend());
    View v = inst.view;
    std::reverse(v.responses.begin(), v.responses.end());
    const PosteriorReport a =
        PosteriorOverElements(inst.D, inst.n, inst.mech, inst.queries, inst.view);
    const PosteriorReport b = PosteriorOverElements(inst.D, inst.n, inst.mech, qs, v);
    for (std::size_t x = 0; x < inst.D.size(); ++x) {
      EXPECT_NEAR(a.posterior.prob(x), b.posterior.prob(x), 1e-12);
    }
  }
}

TEST(LbiLossTest, Examples) {
  const LbiParams p{0.2, 0.0, 0.0};
  const std::vector<LinearQuery> one = {kBit};
  EXPECT_EQ(LbiLoss(p, one, 1, 1), 0.0);
  EXPECT_NEAR(LbiLoss(p, one, 0, 1), 0.2, 1e-15);
  const std::vector<LinearQuery> two = {kBit, kBit};
  EXPECT_NEAR(LbiLoss({0.2, 0.005, 0.0}, two, 0, 1), 0.2 * std::sqrt(2.0) + 0.01, 1e-15);
}

TEST(ThetaExactTest, ZeroParamsAndConstantQueries) {
  const std::vector<std::vector<LinearQuery>> prefixes = {{kBit}};
  const std::vector<LinearQuery> current = {kBit};
  EXPECT_EQ(ThetaExact({0, 0, 0}, kTwo, prefixes, current), 0.0);
  const std::vector<LinearQuery> flat = {LinearQuery::Scalar({3.0, 3.0})};
  EXPECT_EQ(ThetaExact({5, 1, 0}, kTwo, prefixes, flat), 0.0);
}

// Uniform {a, b}, prefix gap 1, gamma1 = 0.2, current q = (0, 1): only the two
// unequal pairs contribute, each with weight 1/4 and deviation 1/2.
TEST(ThetaExactTest, TwoPointValue) {
  const std::vector<std::vector<LinearQuery>> prefixes = {{kBit}};
  const std::vector<LinearQuery> current = {kBit};
  const double expected = 2.0 * 0.25 * 0.5 * std::expm1(0.2);
  EXPECT_NEAR(ThetaExact({0.2, 0.0, 0.0}, kTwo, prefixes, current), expected, 1e-15);
  EXPECT_NEAR(expected, 0.05535068, 1e-8);
}

TEST(ThetaExactTest, SessionFormMatchesExplicitPrefixes) {
  const auto D = DomainDistribution::Uniform(3);
  const std::vector<LinearQuery> qs = {LinearQuery::Scalar({0, 1, 0.5}),
                                       LinearQuery::Scalar({1, 0, 0}),
                                       LinearQuery::Scalar({0.2, 0.9, 0.4})};
  const std::vector<std::vector<LinearQuery>> prefixes = {{}, {qs[0]}, {qs[0], qs[1]}};
  const LbiParams p{0.7, 0.1, 0.0};
  EXPECT_NEAR(ThetaExactOverSession(p, D, qs), ThetaExact(p, D, prefixes, qs), 1e-15);
}

TEST(ThetaExactTest, OverflowReportsInfinity) {
  const std::vector<std::vector<LinearQuery>> prefixes = {{kBit}};
  const std::vector<LinearQuery> current = {kBit};
  EXPECT_TRUE(std::isinf(ThetaExact({1e6, 0.0, 0.0}, kTwo, prefixes, current)));
}

// With the Laplace mechanism's exact per-query parameters, the posterior
// shift of each query is bounded by the exact Theta of the composed loss.
TEST(LbiCovarianceBoundTest, LaplaceShiftBelowComposedTheta) {
  Rng rng = MakeRng(99);
  const double delta_prime = std::exp(-2.0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 2 + i % 3;
    const std::size_t n = 1 + (i / 3) % 4;
    const std::size_t k = 1 + i % 3;
    const auto D = DomainDistribution::Uniform(m);
    const double eta = 0.2 + UniformUnit(rng);
    std::vector<LinearQuery> qs;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> values(m);
      for (auto& v : values) v = UniformUnit(rng);
      qs.push_back(LinearQuery::Scalar(values));
    }
    const Dataset s = SampleDataset(D, n, rng);
    const Transcript t = RunSession(MechanismSpec::Laplace(eta), AnalystSpec::FixedPool(qs), s,
                                    D, k, static_cast<std::uint64_t>(i));
    const LbiParams composed =
        ComposeLbi(LbiPerQuery(MechanismKind::kLaplace, n, eta), k, delta_prime);
    for (std::size_t j = 0; j < k; ++j) {
      const PosteriorReport r = PosteriorOverElements(D, n, MechanismSpec::Laplace(eta),
                                                      std::span(qs).first(j), t.view.Prefix(j));
      const std::vector<std::vector<LinearQuery>> prefix = {
          std::vector<LinearQuery>(qs.begin(), qs.begin() + static_cast<long>(j))};
      const std::vector<LinearQuery> current = {qs[j]};
      const double theta = ThetaExact(composed, D, prefix, current);
      EXPECT_LE(Norm(CheckCovariance(D, qs[j], r).lhs), theta + 1e-12)
          << "instance " << i << " round " << j;
    }
  }
}

}  // namespace
}  // namespace bayesstab
