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

// JSON documents for domains, queries, experiments and oracle instances.
//
//   domain:     {"labels": [...], "probs": [...]}  or  {"uniform": m}
//   query:      {"values": [v_1, ..., v_m]}  or  {"values": [[...], ...]}
//   mechanism:  {"kind": "laplace", "eta": 0.05}, {"kind": "splitting", "chunks": 10}
//   analyst:    {"kind": "fixed_pool", "queries": [...]},
//               {"kind": "random_sign_attacker", "k_probe": 63, "delta": 1.0},
//               {"kind": "variance_controlled", "sigma1": 0.5, "delta": 1.0}
//
// Malformed documents raise Error with ErrorCode::kConfiguration.

#ifndef BAYESSTAB_JSON_IO_HPP_
#define BAYESSTAB_JSON_IO_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bayesstab/analysts.hpp"
#include "bayesstab/bounds.hpp"
#include "bayesstab/core.hpp"
#include "bayesstab/error.hpp"
#include "bayesstab/harness.hpp"
#include "bayesstab/mechanisms.hpp"

namespace bayesstab {

using Json = nlohmann::json;

namespace internal {

[[noreturn]] inline void ConfigFail(const std::string& what) {
  throw Error(ErrorCode::kConfiguration, what);
}

inline const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) ConfigFail(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T Get(const Json& j, const char* key) {
  try {
    return Field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    ConfigFail(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T GetOr(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return Get<T>(j, key);
}

inline std::size_t GetCount(const Json& j, const char* key) {
  const double v = Get<double>(j, key);
  if (!(v >= 0.0) || v != std::floor(v)) {
    ConfigFail(std::string("field '") + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace internal

inline Json ParseJson(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    internal::ConfigFail(std::string("invalid JSON: ") + e.what());
  }
}

inline Json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) internal::ConfigFail("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseJson(buffer.str());
}

// Probabilities must sum to 1 within 1e-9; they are then renormalized.
inline DomainDistribution DomainFromJson(const Json& j) {
  if (j.is_object() && j.contains("uniform")) {
    const std::size_t m = internal::GetCount(j, "uniform");
    if (m == 0) internal::ConfigFail("uniform domain needs m >= 1");
    return DomainDistribution::Uniform(m);
  }
  auto probs = internal::Get<std::vector<double>>(j, "probs");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    labels = internal::Get<std::vector<std::string>>(j, "labels");
  } else {
    for (std::size_t i = 0; i < probs.size(); ++i) labels.push_back("e" + std::to_string(i));
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-9) {
    internal::ConfigFail("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (double& p : probs) p /= total;
  try {
    return DomainDistribution(std::move(labels), std::move(probs));
  } catch (const Error& e) {
    internal::ConfigFail(e.what());
  }
}

inline LinearQuery QueryFromJson(const Json& j) {
  const Json& values = internal::Field(j, "values");
  if (!values.is_array() || values.empty()) internal::ConfigFail("query values must be an array");
  try {
    if (values.front().is_array()) {
      return LinearQuery::FromRows(values.get<std::vector<std::vector<double>>>());
    }
    return LinearQuery::Scalar(values.get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    internal::ConfigFail(std::string("query values: ") + e.what());
  } catch (const Error& e) {
    internal::ConfigFail(e.what());
  }
}

inline std::vector<LinearQuery> QueriesFromJson(const Json& j, std::size_t m) {
  if (!j.is_array()) internal::ConfigFail("queries must be an array");
  std::vector<LinearQuery> out;
  for (const auto& q : j) {
    out.push_back(QueryFromJson(q));
    if (out.back().domain_size() != m) {
      internal::ConfigFail("query has " + std::to_string(out.back().domain_size()) +
                           " rows but the domain has " + std::to_string(m) + " elements");
    }
  }
  return out;
}

inline MechanismSpec MechanismFromJson(const Json& j) {
  const auto kind = internal::Get<std::string>(j, "kind");
  MechanismSpec spec;
  if (kind == "empirical") {
    spec = MechanismSpec::Empirical();
  } else if (kind == "laplace") {
    spec = MechanismSpec::Laplace(internal::Get<double>(j, "eta"));
  } else if (kind == "gaussian") {
    spec = MechanismSpec::Gaussian(internal::Get<double>(j, "eta"));
  } else if (kind == "splitting") {
    spec = MechanismSpec::Splitting(internal::GetCount(j, "chunks"));
  } else {
    internal::ConfigFail("unknown mechanism kind '" + kind + "'");
  }
  spec.Validate();
  return spec;
}

// `fallback_queries` lets a fixed pool reuse the queries of the domain block.
inline AnalystSpec AnalystFromJson(const Json& j, const DomainDistribution& D,
                                   const Json* fallback_queries = nullptr) {
  const auto kind = internal::Get<std::string>(j, "kind");
  if (kind == "fixed_pool") {
    const Json* queries = j.contains("queries") ? &j.at("queries") : fallback_queries;
    if (queries == nullptr) internal::ConfigFail("fixed_pool analyst needs 'queries'");
    return AnalystSpec::FixedPool(QueriesFromJson(*queries, D.size()));
  }
  if (kind == "random_sign_attacker") {
    return AnalystSpec::RandomSignAttacker(internal::GetCount(j, "k_probe"),
                                           internal::GetOr<double>(j, "delta", 1.0));
  }
  if (kind == "variance_controlled") {
    return AnalystSpec::VarianceControlled(internal::GetOr<double>(j, "sigma1", 0.5),
                                           internal::GetOr<double>(j, "delta", 1.0));
  }
  internal::ConfigFail("unknown analyst kind '" + kind + "'");
}

// alpha_grid is either an explicit list or {"from": a, "to": b, "count": c}
// (evenly spaced, inclusive).
inline std::vector<double> AlphaGridFromJson(const Json& j) {
  if (j.is_array()) {
    try {
      return j.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      internal::ConfigFail(std::string("alpha_grid: ") + e.what());
    }
  }
  const double from = internal::Get<double>(j, "from");
  const double to = internal::Get<double>(j, "to");
  const std::size_t count = internal::GetCount(j, "count");
  if (count < 1) internal::ConfigFail("alpha_grid count must be >= 1");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = count == 1 ? from
                         : from + (to - from) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
  }
  return grid;
}

inline ExperimentConfig ExperimentFromJson(const Json& j) {
  ExperimentConfig c;
  const Json& domain = internal::Field(j, "domain");
  c.domain = DomainFromJson(domain);
  c.mechanism = MechanismFromJson(internal::Field(j, "mechanism"));
  const Json* pool = domain.is_object() && domain.contains("queries") ? &domain.at("queries")
                                                                      : nullptr;
  c.analyst = AnalystFromJson(internal::Field(j, "analyst"), c.domain, pool);
  c.n = internal::GetCount(j, "n");
  c.k = internal::GetCount(j, "k");
  c.trials = internal::GetCount(j, "trials");
  c.seed = internal::GetOr<std::uint64_t>(j, "seed", 0);
  c.alpha_grid = AlphaGridFromJson(internal::Field(j, "alpha_grid"));
  c.oracle_enabled = internal::GetOr<bool>(j, "oracle", false);
  c.output_path = internal::GetOr<std::string>(j, "output", "");
  try {
    c.regime = ParseRegime(internal::GetOr<std::string>(j, "regime", "bounded"));
  } catch (const Error& e) {
    internal::ConfigFail(e.what());
  }
  if (j.contains("delta_prime")) c.delta_prime = internal::Get<double>(j, "delta_prime");
  if (j.contains("delta")) c.delta = internal::Get<double>(j, "delta");
  c.threads = internal::GetOr<std::size_t>(j, "threads", 0);
  try {
    c.Validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfiguration) throw;
    internal::ConfigFail(e.what());
  }
  return c;
}

// A small instance for exact posterior checks. The view is either given
// explicitly ("view": {"coin_seed": s, "responses": [...]}) or generated by
// running a session of the fixed query list on a dataset drawn with "seed".
struct OracleInstance {
  DomainDistribution domain = DomainDistribution::Uniform(1);
  std::size_t n = 1;
  MechanismSpec mechanism;
  std::vector<LinearQuery> queries;
  View view;
};

inline OracleInstance OracleInstanceFromJson(const Json& j) {
  OracleInstance inst;
  const Json& domain = internal::Field(j, "domain");
  inst.domain = DomainFromJson(domain);
  inst.n = internal::GetCount(j, "n");
  if (inst.n < 1) internal::ConfigFail("n must be >= 1");
  inst.mechanism = MechanismFromJson(internal::Field(j, "mechanism"));
  const Json& queries = j.contains("queries") ? j.at("queries") : internal::Field(domain, "queries");
  inst.queries = QueriesFromJson(queries, inst.domain.size());
  if (j.contains("view")) {
    const Json& view = j.at("view");
    inst.view.coin_seed = internal::GetOr<std::uint64_t>(view, "coin_seed", 0);
    const Json& responses = internal::Field(view, "responses");
    if (!responses.is_array()) internal::ConfigFail("responses must be an array");
    for (const auto& r : responses) {
      try {
        inst.view.responses.push_back(r.is_array() ? r.get<Vector>() : Vector{r.get<double>()});
      } catch (const nlohmann::json::exception& e) {
        internal::ConfigFail(std::string("responses: ") + e.what());
      }
    }
    if (inst.view.responses.size() != inst.queries.size()) {
      internal::ConfigFail("one response per query is required");
    }
  } else {
    const auto seed = internal::GetOr<std::uint64_t>(j, "seed", 0);
    Rng rng = MakeRng(DeriveSeed(seed, 0));
    const Dataset s = SampleDataset(inst.domain, inst.n, rng);
    const AnalystSpec analyst = AnalystSpec::FixedPool(inst.queries);
    if (inst.queries.empty()) internal::ConfigFail("instance needs at least one query");
    inst.view = RunSession(inst.mechanism, analyst, s, inst.domain, inst.queries.size(),
                           DeriveSeed(seed, 1))
                    .view;
  }
  return inst;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_JSON_IO_HPP_
