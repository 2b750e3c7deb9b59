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

// Query-generating strategies. An analyst is a pure function of the view
// prefix it has seen: all of its randomness is drawn from streams derived
// from the coin seed recorded in the view, so replaying a view replays the
// queries.

#ifndef BAYESSTAB_ANALYSTS_HPP_
#define BAYESSTAB_ANALYSTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "bayesstab/core.hpp"
#include "bayesstab/error.hpp"
#include "bayesstab/random.hpp"

namespace bayesstab {

enum class AnalystKind { kFixedPool, kRandomSignAttacker, kVarianceControlled };

struct AnalystSpec {
  AnalystKind kind = AnalystKind::kFixedPool;
  std::vector<LinearQuery> pool;
  double delta = 1.0;   // target range
  double sigma1 = 0.5;  // target element-level standard deviation
  std::size_t k_probe = 0;

  static AnalystSpec FixedPool(std::vector<LinearQuery> queries) {
    AnalystSpec spec;
    spec.kind = AnalystKind::kFixedPool;
    spec.pool = std::move(queries);
    return spec;
  }

  static AnalystSpec RandomSignAttacker(std::size_t k_probe, double delta) {
    AnalystSpec spec;
    spec.kind = AnalystKind::kRandomSignAttacker;
    spec.k_probe = k_probe;
    spec.delta = delta;
    spec.sigma1 = delta / 2.0;
    return spec;
  }

  static AnalystSpec VarianceControlled(double sigma1, double delta) {
    AnalystSpec spec;
    spec.kind = AnalystKind::kVarianceControlled;
    spec.sigma1 = sigma1;
    spec.delta = delta;
    return spec;
  }

  // Checks the spec against a session of k rounds.
  void Validate(std::size_t k) const {
    switch (kind) {
      case AnalystKind::kFixedPool:
        internal::Require(pool.size() == k, ErrorCode::kConfiguration,
                          "fixed pool must supply exactly k = " +
                              std::to_string(k) + " queries, has " +
                              std::to_string(pool.size()));
        break;
      case AnalystKind::kRandomSignAttacker:
        internal::Require(delta > 0.0, ErrorCode::kConfiguration,
                          "attacker needs delta > 0");
        internal::Require(k_probe >= 1 && k_probe + 1 <= k,
                          ErrorCode::kConfiguration,
                          "attacker needs 1 <= k_probe <= k - 1");
        break;
      case AnalystKind::kVarianceControlled:
        internal::Require(delta >= 0.0 && sigma1 >= 0.0,
                          ErrorCode::kConfiguration,
                          "variance-controlled analyst needs delta, sigma1 >= 0");
        break;
    }
  }

  // Standard deviation every emitted query actually attains. Two-point
  // queries of range delta top out at delta / 2.
  double EffectiveSigma() const {
    return std::min(sigma1, delta / 2.0);
  }
};

namespace internal {

inline Rng AnalystRng(const View& prefix, std::size_t round) {
  return MakeRng(DeriveSeed(prefix.coin_seed, round));
}

// Probe query j: iid +-delta/2 per element, from the coin stream of round j.
inline LinearQuery ProbeQuery(std::uint64_t coin_seed, std::size_t round,
                              std::size_t m, double delta) {
  Rng rng = MakeRng(DeriveSeed(coin_seed, round));
  std::vector<double> values(m);
  const double half = delta / 2.0;
  std::uint64_t bits = 0;
  for (std::size_t x = 0; x < m; ++x) {
    if (x % 64 == 0) bits = rng();
    values[x] = (bits >> (x % 64)) & 1U ? half : -half;
  }
  return LinearQuery::Scalar(std::move(values));
}

inline LinearQuery AttackerFinalQuery(const AnalystSpec& spec, const View& prefix,
                                      const DomainDistribution& D) {
  const std::size_t m = D.size();
  const double scale = 2.0 / spec.delta;
  std::vector<double> z(m, 0.0);
  for (std::size_t j = 0; j < spec.k_probe; ++j) {
    const LinearQuery probe = ProbeQuery(prefix.coin_seed, j, m, spec.delta);
    Require(prefix.responses[j].size() == 1, ErrorCode::kProtocol,
            "attacker expects scalar responses");
    const double residual = prefix.responses[j][0] - QueryMean(probe, D)[0];
    const double sign = residual > 0 ? 1.0 : (residual < 0 ? -1.0 : 0.0);
    if (sign == 0.0) continue;
    const auto values = probe.values();
    for (std::size_t x = 0; x < m; ++x) z[x] += sign * scale * values[x];
  }
  // Normalizing by sqrt(k_probe) keeps the non-member values O(1) while the
  // member bias grows like sqrt(k_probe / n).
  const double norm = std::sqrt(static_cast<double>(spec.k_probe));
  for (auto& v : z) v = (spec.delta / 2.0) * std::clamp(v / norm, -1.0, 1.0);
  return LinearQuery::Scalar(std::move(z));
}

// Fresh query with element std exactly EffectiveSigma() and range at most
// delta. Over a random ordering of the domain, the elements before a split
// sit at delta, the elements after it at 0, and the split element at the
// value that makes the variance exact; the split is drawn uniformly among
// those that work. When no split reaches the target with full range (a
// two-element domain, for instance), a two-level query with a shorter range
// is used instead. Values are finally centered at mean 0.
inline LinearQuery VarianceControlledQuery(const AnalystSpec& spec, Rng& rng,
                                           const DomainDistribution& D) {
  const std::size_t m = D.size();
  const double target = spec.EffectiveSigma();
  if (target <= 0.0 || spec.delta <= 0.0 || m < 2) {
    return LinearQuery::Scalar(std::vector<double>(m, 0.0));
  }
  const double target_var = (target / spec.delta) * (target / spec.delta);  // delta = 1 units

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) {
    const auto j = static_cast<std::size_t>(UniformUnit(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  std::vector<double> prefix_mass(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix_mass[i + 1] = prefix_mass[i] + D.prob(order[i]);

  // Three levels: order[0, j) at 1, order[j] at t, order[j+1, m) at 0, with
  // variance h(1-h) + w(1-w) t^2 - 2hw t (h, w the masses of the top group
  // and of the split element).
  struct Level {
    std::size_t split;
    double t;
  };
  std::vector<Level> exact;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double h = prefix_mass[j];
    const double w = D.prob(order[j]);
    const double low = 1.0 - h - w;
    if (h <= 0.0 || low <= 0.0 || w <= 0.0) continue;
    const double a = w * (1.0 - w), b = 2.0 * h * w, c = h * (1.0 - h) - target_var;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    for (double t : {(b + root) / (2.0 * a), (b - root) / (2.0 * a)}) {
      if (t >= 0.0 && t <= 1.0) {
        exact.push_back({j, t});
        break;
      }
    }
  }

  std::vector<double> values(m, 0.0);
  if (!exact.empty()) {
    const Level pick =
        exact[std::min(exact.size() - 1,
                       static_cast<std::size_t>(UniformUnit(rng) *
                                                static_cast<double>(exact.size())))];
    for (std::size_t i = 0; i < pick.split; ++i) values[order[i]] = spec.delta;
    values[order[pick.split]] = pick.t * spec.delta;
  } else {
    // Two levels: order[0, j) at r, the rest at 0, std = r sqrt(p (1 - p)).
    std::vector<std::pair<std::size_t, double>> shorter;
    for (std::size_t j = 1; j < m; ++j) {
      const double p = prefix_mass[j];
      if (p <= 0.0 || p >= 1.0) continue;
      const double r = target / std::sqrt(p * (1.0 - p));
      if (r <= spec.delta * (1.0 + 1e-12)) shorter.push_back({j, std::min(r, spec.delta)});
    }
    if (shorter.empty()) {
      throw Error(ErrorCode::kConfiguration,
                  "cannot realize element std " + std::to_string(target) + " with range " +
                      std::to_string(spec.delta) + " on this domain");
    }
    const auto pick =
        shorter[std::min(shorter.size() - 1,
                         static_cast<std::size_t>(UniformUnit(rng) *
                                                  static_cast<double>(shorter.size())))];
    for (std::size_t i = 0; i < pick.first; ++i) values[order[i]] = pick.second;
  }
  const double mean = WeightedMean(LinearQuery::Scalar(values), D.probs())[0];
  for (auto& v : values) v -= mean;
  LinearQuery q = LinearQuery::Scalar(std::move(values));
  const QueryStats stats = ComputeQueryStats(q, D);
  Require(std::abs(stats.sigma1 - target) <= 1e-12 * std::max(1.0, target),
          ErrorCode::kConfiguration,
          "element std " + std::to_string(stats.sigma1) + " misses target " +
              std::to_string(target));
  return q;
}

}  // namespace internal

// Query for round prefix.rounds() (0-based), given the responses so far.
inline LinearQuery NextQuery(const AnalystSpec& spec, const View& prefix,
                             const DomainDistribution& D) {
  const std::size_t round = prefix.rounds();
  switch (spec.kind) {
    case AnalystKind::kFixedPool:
      internal::Require(round < spec.pool.size(), ErrorCode::kProtocol,
                        "query pool exhausted at round " + std::to_string(round));
      return spec.pool[round];
    case AnalystKind::kRandomSignAttacker:
      if (round < spec.k_probe) {
        return internal::ProbeQuery(prefix.coin_seed, round, D.size(), spec.delta);
      }
      return internal::AttackerFinalQuery(spec, prefix, D);
    case AnalystKind::kVarianceControlled: {
      Rng rng = internal::AnalystRng(prefix, round);
      return internal::VarianceControlledQuery(spec, rng, D);
    }
  }
  throw Error(ErrorCode::kConfiguration, "unknown analyst kind");
}

// Reconstructs the queries a view induces.
inline std::vector<LinearQuery> ReplayQueries(const AnalystSpec& spec, const View& view,
                                              const DomainDistribution& D) {
  std::vector<LinearQuery> queries;
  queries.reserve(view.rounds());
  for (std::size_t i = 0; i < view.rounds(); ++i) {
    queries.push_back(NextQuery(spec, view.Prefix(i), D));
  }
  return queries;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_ANALYSTS_HPP_
