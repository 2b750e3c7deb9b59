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

// Monte Carlo experiments: many independent sessions, empirical error tails
// with Wilson intervals, and the matching closed-form bounds.
//
// Trials run on a thread pool. Each trial derives its own seeds from the
// master seed and its index (see random.hpp), writes only its own slot, and
// aggregation walks the slots in index order, so results do not depend on
// the thread count.

#ifndef BAYESSTAB_HARNESS_HPP_
#define BAYESSTAB_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bayesstab/analysts.hpp"
#include "bayesstab/bounds.hpp"
#include "bayesstab/core.hpp"
#include "bayesstab/mechanisms.hpp"
#include "bayesstab/oracle.hpp"
#include "bayesstab/random.hpp"

namespace bayesstab {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  DomainDistribution domain = DomainDistribution::Uniform(2);
  MechanismSpec mechanism;
  AnalystSpec analyst;
  std::size_t n = 1;
  std::size_t k = 1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<double> alpha_grid;
  bool oracle_enabled = false;
  std::string output_path;

  // Distribution-bound inputs. Without delta_prime the distribution bound is
  // reported as vacuous.
  Regime regime = Regime::kBounded;
  std::optional<double> delta_prime;
  std::optional<double> delta;  // gaussian per-query failure mass

  std::size_t threads = 0;  // 0: hardware concurrency

  void Validate() const {
    internal::Require(n >= 1 && k >= 1, ErrorCode::kConfiguration, "n and k must be >= 1");
    internal::Require(trials >= 1, ErrorCode::kConfiguration, "trials must be >= 1");
    internal::Require(!alpha_grid.empty(), ErrorCode::kConfiguration,
                      "alpha grid must not be empty");
    for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
      internal::Require(alpha_grid[i] > alpha_grid[i - 1], ErrorCode::kConfiguration,
                        "alpha grid must be strictly increasing");
    }
    mechanism.Validate();
    analyst.Validate(k);
    if (mechanism.kind == MechanismKind::kSplitting) {
      internal::Require(mechanism.chunks >= k && mechanism.chunks <= n,
                        ErrorCode::kConfiguration,
                        "splitting needs k <= chunks <= n");
    }
    if (oracle_enabled) {
      internal::Require(mechanism.kind != MechanismKind::kSplitting,
                        ErrorCode::kConfiguration,
                        "the oracle has no likelihood for the splitting mechanism");
      internal::Require(Enumerable(n, domain.size()), ErrorCode::kConfiguration,
                        "oracle requested beyond the enumeration cap: " +
                            std::to_string(MultisetCount(n, domain.size())) +
                            " dataset multisets");
    }
  }
};

struct TrialRecord {
  ErrorRecord errors;
  double final_dist_error = 0.0;  // |r_k - q_k(D)|
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// 95% Wilson score interval for `successes` out of `trials`.
inline WilsonInterval Wilson(std::size_t successes, std::size_t trials) {
  constexpr double z = 1.959963984540054;
  if (trials == 0) return {0.0, 1.0};
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  // The edges are exact at the extremes; rounding would otherwise leave a
  // lower edge of ~1e-18 above an exact zero bound.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

struct TailEstimate {
  double value = 0.0;
  WilsonInterval wilson;
};

struct AlphaRow {
  double alpha = 0.0;
  TailEstimate sample;
  TailEstimate dist;
  std::optional<TailEstimate> posterior;
  double bound_sample = 1.0;
  double bound_dist = 1.0;
  std::optional<double> bound_posterior;
  bool sample_valid = true;
  bool dist_valid = false;
  bool posterior_valid = false;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<AlphaRow> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string mechanism;
  std::string analyst;

  double MeanFinalDistError() const {
    double sum = 0.0;
    for (const auto& t : trials) sum += t.final_dist_error;
    return trials.empty() ? 0.0 : sum / static_cast<double>(trials.size());
  }
};

inline std::string AnalystName(AnalystKind kind) {
  switch (kind) {
    case AnalystKind::kFixedPool:
      return "fixed_pool";
    case AnalystKind::kRandomSignAttacker:
      return "random_sign_attacker";
    case AnalystKind::kVarianceControlled:
      return "variance_controlled";
  }
  return "unknown";
}

namespace internal {

inline void HashBytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
}

inline void HashDouble(std::uint64_t& h, double v) { HashBytes(h, &v, sizeof v); }
inline void HashCount(std::uint64_t& h, std::uint64_t v) { HashBytes(h, &v, sizeof v); }

// FNV-1a over every field that influences the result.
inline std::string ConfigHash(const ExperimentConfig& c) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (double p : c.domain.probs()) HashDouble(h, p);
  HashCount(h, static_cast<std::uint64_t>(c.mechanism.kind));
  HashDouble(h, c.mechanism.eta);
  HashCount(h, c.mechanism.chunks);
  HashCount(h, static_cast<std::uint64_t>(c.analyst.kind));
  HashDouble(h, c.analyst.delta);
  HashDouble(h, c.analyst.sigma1);
  HashCount(h, c.analyst.k_probe);
  for (const auto& q : c.analyst.pool) {
    for (double v : q.values()) HashDouble(h, v);
  }
  HashCount(h, c.n);
  HashCount(h, c.k);
  HashCount(h, c.trials);
  HashCount(h, c.seed);
  for (double a : c.alpha_grid) HashDouble(h, a);
  HashCount(h, c.oracle_enabled ? 1 : 0);
  HashCount(h, static_cast<std::uint64_t>(c.regime));
  HashDouble(h, c.delta_prime.value_or(-1.0));
  HashDouble(h, c.delta.value_or(-1.0));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Largest element std and range any query of the analyst can have.
inline QueryStats AnalystCaps(const AnalystSpec& analyst, const DomainDistribution& D) {
  QueryStats caps;
  switch (analyst.kind) {
    case AnalystKind::kFixedPool:
      for (const auto& q : analyst.pool) {
        const QueryStats s = ComputeQueryStats(q, D);
        caps.sigma1 = std::max(caps.sigma1, s.sigma1);
        caps.delta = std::max(caps.delta, s.delta);
      }
      break;
    case AnalystKind::kRandomSignAttacker:
      caps = {analyst.delta / 2.0, analyst.delta};
      break;
    case AnalystKind::kVarianceControlled:
      caps = {analyst.EffectiveSigma(), analyst.delta};
      break;
  }
  return caps;
}

inline TrialRecord RunTrial(const ExperimentConfig& c, std::size_t index) {
  const std::uint64_t trial_seed = DeriveSeed(c.seed, index);
  Rng data_rng = MakeRng(DeriveSeed(trial_seed, 0));
  const Dataset s = SampleDataset(c.domain, c.n, data_rng);
  const Transcript t = RunSession(c.mechanism, c.analyst, s, c.domain, c.k,
                                  DeriveSeed(trial_seed, 1));
  TrialRecord record;
  const SessionRecord session{s, t.view, t.queries, c.domain};
  if (c.oracle_enabled) {
    std::vector<DomainDistribution> posteriors;
    posteriors.reserve(c.k);
    for (std::size_t i = 0; i < c.k; ++i) {
      posteriors.push_back(PosteriorOverElements(c.domain, c.n, c.mechanism,
                                                 std::span(t.queries).first(i),
                                                 t.view.Prefix(i))
                               .posterior);
    }
    record.errors = ComputeErrors(session, std::span<const DomainDistribution>(posteriors));
  } else {
    record.errors = ComputeErrors(session);
  }
  record.final_dist_error =
      Distance(t.view.responses.back(), QueryMean(t.queries.back(), c.domain));
  return record;
}

inline TailEstimate EstimateTail(const std::vector<double>& sorted, double alpha) {
  const auto above = static_cast<std::size_t>(
      sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), alpha));
  return {static_cast<double>(above) / static_cast<double>(sorted.size()),
          Wilson(above, sorted.size())};
}

}  // namespace internal

inline ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentResult result;
  result.trials.resize(config.trials);
  result.seed = config.seed;
  result.config_hash = internal::ConfigHash(config);
  result.mechanism = MechanismName(config.mechanism.kind);
  result.analyst = AnalystName(config.analyst.kind);

  std::size_t workers = config.threads;
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.trials) return;
      try {
        result.trials[i] = internal::RunTrial(config, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.trials);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> sample, dist, post;
  sample.reserve(config.trials);
  dist.reserve(config.trials);
  for (const auto& t : result.trials) {
    sample.push_back(t.errors.err_sample);
    dist.push_back(t.errors.err_dist);
    if (t.errors.err_posterior) post.push_back(*t.errors.err_posterior);
  }
  std::sort(sample.begin(), sample.end());
  std::sort(dist.begin(), dist.end());
  std::sort(post.begin(), post.end());

  // Bound curves.
  std::optional<MechanismTailPair> tails;
  std::optional<TailFunction> dist_tail;
  if (config.mechanism.adds_noise()) {
    tails = MechanismTails(config.mechanism.kind, config.k, config.mechanism.eta);
    if (config.delta_prime) {
      const QueryStats caps = internal::AnalystCaps(config.analyst, config.domain);
      DistributionTailInputs in;
      in.kind = config.mechanism.kind;
      in.n = config.n;
      in.eta = config.mechanism.eta;
      in.k = config.k;
      in.sigma1 = caps.sigma1;
      in.range = caps.delta;
      in.regime = config.regime;
      in.d = config.analyst.kind == AnalystKind::kFixedPool && !config.analyst.pool.empty()
                 ? config.analyst.pool.front().dim()
                 : 1;
      in.delta = config.delta.value_or(0.0);
      in.delta_prime = *config.delta_prime;
      try {
        dist_tail = DistributionTail(in);
      } catch (const ValidityError&) {
        // delta' outside the proven window: the bound stays vacuous.
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasible) throw;
      }
    }
  }

  for (double alpha : config.alpha_grid) {
    AlphaRow row;
    row.alpha = alpha;
    row.sample = internal::EstimateTail(sample, alpha);
    row.dist = internal::EstimateTail(dist, alpha);
    if (config.mechanism.kind == MechanismKind::kEmpirical) {
      row.bound_sample = 0.0;  // responses are the sample values
    } else if (tails) {
      const TailValue v = tails->phi.Evaluate(alpha);
      row.bound_sample = v.value;
      row.sample_valid = v.in_validity;
    } else {
      row.bound_sample = 1.0;
      row.sample_valid = false;
    }
    if (dist_tail) {
      const TailValue v = dist_tail->Evaluate(alpha);
      row.bound_dist = v.value;
      row.dist_valid = v.in_validity;
    }
    if (config.oracle_enabled) {
      row.posterior = internal::EstimateTail(post, alpha);
      row.bound_posterior = 1.0;
      if (tails) {
        const TailValue v = tails->phi_post.Evaluate(alpha);
        row.bound_posterior = v.value;
        row.posterior_valid = v.in_validity;
      }
    }
    result.rows.push_back(row);
  }
  return result;
}

struct Verdict {
  double alpha = 0.0;
  bool sample_pass = true;
  bool dist_pass = true;
  bool posterior_pass = true;
  bool dist_checked = false;
  bool posterior_checked = false;
};

struct VerdictTable {
  std::vector<Verdict> rows;
  bool all_pass = true;
  bool sample_pass = true;
};

// PASS at a grid point when the Wilson lower edge of the empirical tail does
// not exceed the bound. Only in-validity points enter the overall verdict.
inline VerdictTable CompareBound(const ExperimentResult& result) {
  VerdictTable table;
  for (const auto& row : result.rows) {
    Verdict v;
    v.alpha = row.alpha;
    if (row.sample_valid) v.sample_pass = row.sample.wilson.lo <= row.bound_sample;
    v.dist_checked = row.dist_valid;
    if (row.dist_valid) v.dist_pass = row.dist.wilson.lo <= row.bound_dist;
    v.posterior_checked = row.posterior.has_value() && row.posterior_valid;
    if (v.posterior_checked) v.posterior_pass = row.posterior->wilson.lo <= *row.bound_posterior;
    table.sample_pass = table.sample_pass && v.sample_pass;
    table.all_pass = table.all_pass && v.sample_pass && v.dist_pass && v.posterior_pass;
    table.rows.push_back(v);
  }
  return table;
}

// One metadata comment line, a header, then one row per alpha. Posterior
// columns are appended only when the oracle ran.
inline void WriteCsv(const ExperimentResult& result, std::ostream& out) {
  const bool with_posterior = !result.rows.empty() && result.rows.front().posterior.has_value();
  out << "# bayesstab " << result.version << " mechanism=" << result.mechanism
      << " analyst=" << result.analyst << " trials=" << result.trials.size()
      << " seed=" << result.seed << " config_hash=" << result.config_hash << '\n';
  out << "alpha,tail_sample,tail_sample_wilson_lo,tail_sample_wilson_hi,tail_dist,"
         "tail_dist_wilson_lo,tail_dist_wilson_hi,bound_sample,bound_dist,validity_flag";
  if (with_posterior) {
    out << ",tail_posterior,tail_posterior_wilson_lo,tail_posterior_wilson_hi,bound_posterior";
  }
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << buf;
  };
  for (const auto& row : result.rows) {
    put(row.alpha);
    for (const TailEstimate* t : {&row.sample, &row.dist}) {
      out << ',';
      put(t->value);
      out << ',';
      put(t->wilson.lo);
      out << ',';
      put(t->wilson.hi);
    }
    out << ',';
    put(row.bound_sample);
    out << ',';
    put(row.bound_dist);
    out << ',' << (row.dist_valid ? 1 : 0);
    if (with_posterior) {
      out << ',';
      put(row.posterior->value);
      out << ',';
      put(row.posterior->wilson.lo);
      out << ',';
      put(row.posterior->wilson.hi);
      out << ',';
      put(row.bound_posterior.value_or(1.0));
    }
    out << '\n';
  }
}

inline std::string CsvString(const ExperimentResult& result) {
  std::ostringstream out;
  WriteCsv(result, out);
  return out.str();
}

}  // namespace bayesstab

#endif  // BAYESSTAB_HARNESS_HPP_
