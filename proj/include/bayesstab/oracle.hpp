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

// Exact Bayesian computations on small instances.
//
// The posterior over elements given a view is obtained by enumerating every
// dataset multiset of size n over the m-element domain (linear queries only
// see counts, so ordered tuples collapse to multisets with multinomial
// weight). Likelihoods use the mechanism's noise density directly; all
// accumulation is done in log space.

#ifndef BAYESSTAB_ORACLE_HPP_
#define BAYESSTAB_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bayesstab/core.hpp"
#include "bayesstab/error.hpp"
#include "bayesstab/mechanisms.hpp"

namespace bayesstab {

inline constexpr double kMaxMultisets = 1e6;

// (gamma1, gamma2; delta) parameters of the linear-plus-quadratic
// indistinguishability loss.
struct LbiParams {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double delta = 0.0;

  friend bool operator==(const LbiParams&, const LbiParams&) = default;
};

struct PosteriorReport {
  DomainDistribution posterior;
  std::vector<double> bayes_factors;  // posterior(x) / prior(x); 1 where prior(x) = 0
  double log_evidence = 0.0;
};

struct CovarianceCheck {
  Vector lhs;  // q(D^v) - q(D)
  Vector rhs;  // Cov_{X~D}(q(X), T(X|v))
  double gap = 0.0;
};

// C(n + m - 1, m - 1), saturating at +inf.
inline double MultisetCount(std::size_t n, std::size_t m) {
  if (m == 0) return 0.0;
  long double count = 1.0L;
  for (std::size_t i = 1; i < m; ++i) {
    count = count * static_cast<long double>(n + i) / static_cast<long double>(i);
    if (count > 1e30L) return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(std::round(count));
}

inline bool Enumerable(std::size_t n, std::size_t m) {
  return MultisetCount(n, m) <= kMaxMultisets;
}

// Visits every composition of n into m non-negative parts.
template <typename Visitor>
void ForEachMultiset(std::size_t n, std::size_t m, Visitor&& visit) {
  std::vector<std::size_t> counts(m, 0);
  counts[0] = n;
  while (true) {
    visit(std::span<const std::size_t>(counts));
    if (counts[m - 1] == n) break;
    std::size_t i = m - 2;
    while (counts[i] == 0) --i;
    --counts[i];
    const std::size_t tail = counts[m - 1];
    counts[m - 1] = 0;
    counts[i + 1] = tail + 1;
  }
}

inline PosteriorReport PosteriorOverElements(const DomainDistribution& D, std::size_t n,
                                             const MechanismSpec& mechanism,
                                             std::span<const LinearQuery> queries,
                                             const View& view) {
  const std::size_t m = D.size();
  internal::Require(n >= 1, ErrorCode::kInvalidInput, "dataset size must be >= 1");
  internal::Require(queries.size() == view.rounds(), ErrorCode::kInvalidInput,
                    "one query per response is required");
  const double states = MultisetCount(n, m);
  internal::Require(states <= kMaxMultisets, ErrorCode::kInstanceTooLarge,
                    std::to_string(states) + " dataset multisets exceed the cap of 1e6");
  internal::Require(mechanism.kind != MechanismKind::kSplitting, ErrorCode::kUnsupported,
                    "posterior enumeration needs a noise density or exact responses");
  mechanism.Validate();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    internal::Require(queries[i].domain_size() == m, ErrorCode::kInvalidInput,
                      "query over a different domain");
    internal::Require(view.responses[i].size() == queries[i].dim(),
                      ErrorCode::kInvalidInput, "response dimension mismatch");
  }

  if (queries.empty()) {
    return PosteriorReport{D, std::vector<double>(m, 1.0), 0.0};
  }

  std::vector<double> log_prior(m);
  for (std::size_t x = 0; x < m; ++x) {
    log_prior[x] = D.prob(x) > 0 ? std::log(D.prob(x))
                                 : -std::numeric_limits<double>::infinity();
  }
  const double log_n_factorial = std::lgamma(static_cast<double>(n) + 1.0);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Streaming log-sum-exp: totals are stored relative to exp(running_max).
  double running_max = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  std::vector<double> mass(m, 0.0);
  Vector qc;

  ForEachMultiset(n, m, [&](std::span<const std::size_t> c) {
    double logw = log_n_factorial;
    for (std::size_t x = 0; x < m; ++x) {
      if (c[x] == 0) continue;
      if (D.prob(x) == 0.0) return;
      logw += static_cast<double>(c[x]) * log_prior[x] -
              std::lgamma(static_cast<double>(c[x]) + 1.0);
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const LinearQuery& q = queries[i];
      qc.assign(q.dim(), 0.0);
      for (std::size_t x = 0; x < m; ++x) {
        if (c[x] == 0) continue;
        const auto row = q.row(x);
        for (std::size_t j = 0; j < qc.size(); ++j) {
          qc[j] += static_cast<double>(c[x]) * row[j];
        }
      }
      const Vector& r = view.responses[i];
      for (std::size_t j = 0; j < qc.size(); ++j) qc[j] = r[j] - qc[j] * inv_n;
      if (mechanism.kind == MechanismKind::kEmpirical) {
        for (std::size_t j = 0; j < qc.size(); ++j) {
          if (std::abs(qc[j]) > 1e-9 * (1.0 + std::abs(r[j]))) return;
        }
      } else {
        logw += NoiseLogDensity(mechanism, qc);
      }
    }
    if (!(logw > -std::numeric_limits<double>::infinity())) return;
    if (logw > running_max) {
      const double rescale = std::exp(running_max - logw);
      total *= rescale;
      for (double& v : mass) v *= rescale;
      running_max = logw;
    }
    const double w = std::exp(logw - running_max);
    total += w;
    for (std::size_t x = 0; x < m; ++x) {
      if (c[x] != 0) mass[x] += w * static_cast<double>(c[x]) * inv_n;
    }
  });

  internal::Require(total > 0.0, ErrorCode::kZeroEvidence,
                    "no dataset is consistent with the observed responses");

  double mass_total = 0.0;
  for (double v : mass) mass_total += v;
  std::vector<double> post(m);
  std::vector<double> factors(m, 1.0);
  for (std::size_t x = 0; x < m; ++x) {
    post[x] = mass[x] / mass_total;
    if (D.prob(x) > 0.0) factors[x] = post[x] / D.prob(x);
  }
  return PosteriorReport{DomainDistribution(D.labels(), std::move(post), 1e-10),
                         std::move(factors), running_max + std::log(total)};
}

// Both sides of the covariance identity q(D^v) - q(D) = Cov(q(X), T(X|v)).
inline CovarianceCheck CheckCovariance(const DomainDistribution& D, const LinearQuery& q,
                                       const PosteriorReport& report) {
  internal::Require(report.posterior.size() == D.size() && q.domain_size() == D.size(),
                    ErrorCode::kInvalidInput, "report over a different domain");
  CovarianceCheck out;
  const Vector prior_mean = QueryMean(q, D);
  const Vector post_mean = QueryMean(q, report.posterior);
  out.lhs.resize(q.dim());
  out.rhs.assign(q.dim(), 0.0);
  for (std::size_t j = 0; j < q.dim(); ++j) out.lhs[j] = post_mean[j] - prior_mean[j];
  for (std::size_t x = 0; x < D.size(); ++x) {
    const auto row = q.row(x);
    const double tilt = D.prob(x) * (report.bayes_factors[x] - 1.0);
    for (std::size_t j = 0; j < q.dim(); ++j) {
      out.rhs[j] += tilt * (row[j] - prior_mean[j]);
    }
  }
  out.gap = Distance(out.lhs, out.rhs);
  return out;
}

// Total variation distance between prior and posterior over elements.
inline double StabilityLoss(const DomainDistribution& D, const PosteriorReport& report) {
  internal::Require(report.posterior.size() == D.size(), ErrorCode::kInvalidInput,
                    "report over a different domain");
  double sum = 0.0;
  for (std::size_t x = 0; x < D.size(); ++x) {
    sum += std::abs(report.posterior.prob(x) - D.prob(x));
  }
  return 0.5 * sum;
}

namespace internal {

// |qbar(x) - qbar(y)|^2 with qbar stacking every query's value row.
inline double StackedSquaredGap(std::span<const LinearQuery> queries, std::size_t x,
                                std::size_t y) {
  double sum = 0.0;
  for (const auto& q : queries) {
    const double d = Distance(q.row(x), q.row(y));
    sum += d * d;
  }
  return sum;
}

inline double LossFromSquaredGap(const LbiParams& params, double squared_gap) {
  return params.gamma1 * std::sqrt(squared_gap) + params.gamma2 * squared_gap;
}

}  // namespace internal

inline double LbiLoss(const LbiParams& params, std::span<const LinearQuery> queries,
                      std::size_t x, std::size_t y) {
  for (const auto& q : queries) {
    internal::Require(x < q.domain_size() && y < q.domain_size(),
                      ErrorCode::kInvalidInput, "element outside the query domain");
  }
  return internal::LossFromSquaredGap(params, internal::StackedSquaredGap(queries, x, y));
}

namespace internal {

// E_{X,Y~D} |q(X) - q(D)| (exp(loss(X, Y)) - 1) given the pairwise squared
// stacked gaps of the prefix.
inline double ThetaTerm(const LbiParams& params, const DomainDistribution& D,
                        const LinearQuery& current,
                        const std::vector<double>& squared_gaps) {
  const std::size_t m = D.size();
  const Vector mean = QueryMean(current, D);
  double sum = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    if (D.prob(x) == 0.0) continue;
    const double deviation = Distance(current.row(x), mean);
    if (deviation == 0.0) continue;
    double inner = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      if (D.prob(y) == 0.0) continue;
      const double growth = std::expm1(LossFromSquaredGap(params, squared_gaps[x * m + y]));
      if (!std::isfinite(growth)) return std::numeric_limits<double>::infinity();
      inner += D.prob(y) * growth;
    }
    sum += D.prob(x) * deviation * inner;
  }
  return sum;
}

}  // namespace internal

// Max over the supplied (prefix, current query) pairs of the exact double sum
// over the finite domain. This covers only the prefixes handed in, not every
// possible view, so it is a lower estimate of the worst case. Returns +inf
// when the exponential overflows.
inline double ThetaExact(const LbiParams& params, const DomainDistribution& D,
                         std::span<const std::vector<LinearQuery>> prefixes,
                         std::span<const LinearQuery> currents) {
  internal::Require(prefixes.size() == currents.size(), ErrorCode::kInvalidInput,
                    "one current query per prefix is required");
  const std::size_t m = D.size();
  double best = 0.0;
  std::vector<double> gaps(m * m);
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    internal::Require(currents[i].domain_size() == m, ErrorCode::kInvalidInput,
                      "query over a different domain");
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = 0; y < m; ++y) {
        gaps[x * m + y] = internal::StackedSquaredGap(prefixes[i], x, y);
      }
    }
    best = std::max(best, internal::ThetaTerm(params, D, currents[i], gaps));
  }
  return best;
}

// Same quantity for one session: query i is paired with the prefix of the
// queries issued before it.
inline double ThetaExactOverSession(const LbiParams& params, const DomainDistribution& D,
                                    std::span<const LinearQuery> queries) {
  const std::size_t m = D.size();
  std::vector<double> gaps(m * m, 0.0);
  double best = 0.0;
  for (const auto& q : queries) {
    internal::Require(q.domain_size() == m, ErrorCode::kInvalidInput,
                      "query over a different domain");
    best = std::max(best, internal::ThetaTerm(params, D, q, gaps));
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = 0; y < m; ++y) {
        const double d = Distance(q.row(x), q.row(y));
        gaps[x * m + y] += d * d;
      }
    }
  }
  return best;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_ORACLE_HPP_
