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

// Data model shared by every other header: a finite prior over data
// elements, iid datasets drawn from it, linear queries, transcripts of
// adaptive sessions, and the three per-session error measures.

#ifndef BAYESSTAB_CORE_HPP_
#define BAYESSTAB_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bayesstab/error.hpp"
#include "bayesstab/random.hpp"

namespace bayesstab {

using Vector = std::vector<double>;

inline double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

inline double Distance(std::span<const double> a, std::span<const double> b) {
  internal::Require(a.size() == b.size(), ErrorCode::kInvalidInput,
                    "vector dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// Finite prior D over data elements.
class DomainDistribution {
 public:
  DomainDistribution(std::vector<std::string> labels, std::vector<double> probs,
                     double tolerance = 1e-12)
      : labels_(std::move(labels)), probs_(std::move(probs)) {
    internal::Require(!labels_.empty(), ErrorCode::kInvalidInput,
                      "domain must contain at least one element");
    internal::Require(labels_.size() == probs_.size(), ErrorCode::kInvalidInput,
                      "labels and probs differ in length");
    std::unordered_set<std::string> seen;
    for (const auto& label : labels_) {
      internal::Require(seen.insert(label).second, ErrorCode::kInvalidInput,
                        "duplicate label '" + label + "'");
    }
    double total = 0.0;
    for (double p : probs_) {
      internal::Require(std::isfinite(p) && p >= 0.0, ErrorCode::kInvalidInput,
                        "probabilities must be finite and non-negative");
      total += p;
    }
    internal::Require(std::abs(total - 1.0) <= tolerance,
                      ErrorCode::kInvalidInput,
                      "probabilities sum to " + std::to_string(total));
  }

  static DomainDistribution Uniform(std::size_t m) {
    internal::Require(m >= 1, ErrorCode::kInvalidInput, "empty domain");
    std::vector<std::string> labels;
    labels.reserve(m);
    for (std::size_t i = 0; i < m; ++i) labels.push_back("e" + std::to_string(i));
    return DomainDistribution(std::move(labels),
                              std::vector<double>(m, 1.0 / static_cast<double>(m)),
                              1e-9);
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> probs() const { return probs_; }
  double prob(std::size_t x) const { return probs_.at(x); }

  std::optional<std::size_t> IndexOf(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

// Ordered sample of n element indices. The histogram is kept alongside so
// query evaluation is O(m) when n is large.
class Dataset {
 public:
  Dataset(std::vector<std::size_t> elems, std::size_t domain_size)
      : elems_(std::move(elems)), counts_(domain_size, 0) {
    internal::Require(!elems_.empty(), ErrorCode::kInvalidInput,
                      "dataset must hold at least one element");
    for (std::size_t e : elems_) {
      internal::Require(e < domain_size, ErrorCode::kInvalidInput,
                        "element index out of domain");
      ++counts_[e];
    }
  }

  std::size_t size() const { return elems_.size(); }
  std::size_t domain_size() const { return counts_.size(); }
  std::span<const std::size_t> elems() const { return elems_; }
  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t operator[](std::size_t i) const { return elems_[i]; }

  // Contiguous sub-range [begin, end) as its own dataset.
  Dataset Slice(std::size_t begin, std::size_t end) const {
    internal::Require(begin < end && end <= elems_.size(),
                      ErrorCode::kInvalidInput, "bad dataset slice");
    return Dataset(std::vector<std::size_t>(elems_.begin() + begin,
                                            elems_.begin() + end),
                   counts_.size());
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.elems_ == b.elems_ && a.counts_.size() == b.counts_.size();
  }

 private:
  std::vector<std::size_t> elems_;
  std::vector<std::size_t> counts_;
};

// Linear query defined by its per-element value table (m rows of dimension
// d, row-major). q(s) is the average of the rows selected by s.
class LinearQuery {
 public:
  LinearQuery(std::size_t domain_size, std::size_t dim, std::vector<double> values)
      : m_(domain_size), d_(dim), values_(std::move(values)) {
    internal::Require(m_ >= 1 && d_ >= 1, ErrorCode::kInvalidInput,
                      "query needs m >= 1 and d >= 1");
    internal::Require(values_.size() == m_ * d_, ErrorCode::kInvalidInput,
                      "query table must have m rows of dimension d");
    for (double v : values_) {
      internal::Require(std::isfinite(v), ErrorCode::kInvalidInput,
                        "query values must be finite");
    }
  }

  static LinearQuery Scalar(std::vector<double> values) {
    const std::size_t m = values.size();
    return LinearQuery(m, 1, std::move(values));
  }

  static LinearQuery FromRows(const std::vector<std::vector<double>>& rows) {
    internal::Require(!rows.empty(), ErrorCode::kInvalidInput, "query has no rows");
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& row : rows) {
      internal::Require(row.size() == d, ErrorCode::kInvalidInput,
                        "query rows differ in dimension");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return LinearQuery(rows.size(), d, std::move(flat));
  }

  std::size_t domain_size() const { return m_; }
  std::size_t dim() const { return d_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(values_).subspan(x * d_, d_);
  }

  friend bool operator==(const LinearQuery& a, const LinearQuery& b) {
    return a.m_ == b.m_ && a.d_ == b.d_ && a.values_ == b.values_;
  }

 private:
  std::size_t m_;
  std::size_t d_;
  std::vector<double> values_;
};

// Transcript of one adaptive session. The analyst's coin seed is part of the
// view so every query is a deterministic function of the preceding prefix.
struct View {
  std::uint64_t coin_seed = 0;
  std::vector<Vector> responses;

  std::size_t rounds() const { return responses.size(); }

  View Prefix(std::size_t rounds) const {
    internal::Require(rounds <= responses.size(), ErrorCode::kInvalidInput,
                      "prefix longer than view");
    return View{coin_seed, std::vector<Vector>(responses.begin(),
                                               responses.begin() + rounds)};
  }

  friend bool operator==(const View&, const View&) = default;
};

struct ErrorRecord {
  double err_sample = 0.0;
  double err_dist = 0.0;
  std::optional<double> err_posterior;
};

struct QueryStats {
  double sigma1 = 0.0;  // sqrt(E_{X~D} |q(X) - q(D)|^2)
  double delta = 0.0;   // max_{x,y} |q(x) - q(y)|
};

inline Vector EvaluateQuery(const LinearQuery& q, const Dataset& s) {
  internal::Require(q.domain_size() == s.domain_size(), ErrorCode::kInvalidInput,
                    "query and dataset are over different domains");
  Vector out(q.dim(), 0.0);
  if (s.domain_size() <= s.size()) {
    const auto counts = s.counts();
    for (std::size_t x = 0; x < counts.size(); ++x) {
      if (counts[x] == 0) continue;
      const auto row = q.row(x);
      const double c = static_cast<double>(counts[x]);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * row[j];
    }
  } else {
    for (std::size_t e : s.elems()) {
      const auto row = q.row(e);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
    }
  }
  const double n = static_cast<double>(s.size());
  for (double& v : out) v /= n;
  return out;
}

// Expectation of q under a weight vector over the domain (prior or
// posterior).
inline Vector WeightedMean(const LinearQuery& q, std::span<const double> weights) {
  internal::Require(q.domain_size() == weights.size(), ErrorCode::kInvalidInput,
                    "query and distribution are over different domains");
  Vector out(q.dim(), 0.0);
  for (std::size_t x = 0; x < weights.size(); ++x) {
    if (weights[x] == 0.0) continue;
    const auto row = q.row(x);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += weights[x] * row[j];
  }
  return out;
}

inline Vector QueryMean(const LinearQuery& q, const DomainDistribution& D) {
  return WeightedMean(q, D.probs());
}

inline QueryStats ComputeQueryStats(const LinearQuery& q,
                                    const DomainDistribution& D) {
  const Vector mean = QueryMean(q, D);
  QueryStats stats;
  double var = 0.0;
  for (std::size_t x = 0; x < D.size(); ++x) {
    const double dist = Distance(q.row(x), mean);
    var += D.prob(x) * dist * dist;
  }
  stats.sigma1 = std::sqrt(var);
  if (q.dim() == 1) {
    const auto v = q.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    stats.delta = *hi - *lo;
  } else {
    for (std::size_t x = 0; x < q.domain_size(); ++x) {
      for (std::size_t y = x + 1; y < q.domain_size(); ++y) {
        stats.delta = std::max(stats.delta, Distance(q.row(x), q.row(y)));
      }
    }
  }
  return stats;
}

// n iid draws from D by inversion of the cumulative distribution.
inline Dataset SampleDataset(const DomainDistribution& D, std::size_t n, Rng& rng) {
  internal::Require(n >= 1, ErrorCode::kInvalidInput, "dataset size must be >= 1");
  std::vector<double> cumulative(D.size());
  std::partial_sum(D.probs().begin(), D.probs().end(), cumulative.begin());
  std::vector<std::size_t> elems(n);
  for (auto& e : elems) {
    const double u = UniformUnit(rng) * cumulative.back();
    // upper_bound never lands on a zero-mass element: its cumulative value
    // equals its predecessor's.
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    e = static_cast<std::size_t>(it - cumulative.begin());
    if (e == D.size()) {
      // u rounded up to the total mass; take the last element with mass.
      e = D.size() - 1;
      while (D.prob(e) == 0.0) --e;
    }
  }
  return Dataset(std::move(elems), D.size());
}

// Everything needed to score one completed session.
struct SessionRecord {
  const Dataset& dataset;
  const View& view;
  std::span<const LinearQuery> queries;
  const DomainDistribution& prior;
};

// `posteriors[i]`, when given, is the posterior over elements after the first
// i responses, i.e. the distribution query i is compared against.
inline ErrorRecord ComputeErrors(
    const SessionRecord& session,
    std::optional<std::span<const DomainDistribution>> posteriors = std::nullopt) {
  const auto& responses = session.view.responses;
  internal::Require(session.queries.size() == responses.size(),
                    ErrorCode::kInvalidInput,
                    "queries and responses differ in length");
  if (posteriors) {
    internal::Require(posteriors->size() == responses.size(),
                      ErrorCode::kInvalidInput,
                      "one posterior per round is required");
  }
  ErrorRecord record;
  if (posteriors) record.err_posterior = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const LinearQuery& q = session.queries[i];
    record.err_sample = std::max(
        record.err_sample, Distance(responses[i], EvaluateQuery(q, session.dataset)));
    record.err_dist = std::max(record.err_dist,
                               Distance(responses[i], QueryMean(q, session.prior)));
    if (posteriors) {
      const Vector post_mean = QueryMean(q, (*posteriors)[i]);
      record.err_posterior =
          std::max(*record.err_posterior, Distance(responses[i], post_mean));
    }
  }
  return record;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_CORE_HPP_
