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

#ifndef BAYESSTAB_MECHANISMS_HPP_
#define BAYESSTAB_MECHANISMS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bayesstab/analysts.hpp"
#include "bayesstab/core.hpp"
#include "bayesstab/error.hpp"
#include "bayesstab/random.hpp"

namespace bayesstab {

enum class MechanismKind { kEmpirical, kLaplace, kGaussian, kSplitting };

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kEmpirical;
  double eta = 0.0;         // noise scale, query units
  std::size_t chunks = 0;   // splitting only

  static MechanismSpec Empirical() { return {}; }
  static MechanismSpec Laplace(double eta) {
    return {MechanismKind::kLaplace, eta, 0};
  }
  static MechanismSpec Gaussian(double eta) {
    return {MechanismKind::kGaussian, eta, 0};
  }
  static MechanismSpec Splitting(std::size_t chunks) {
    return {MechanismKind::kSplitting, 0.0, chunks};
  }

  bool adds_noise() const {
    return kind == MechanismKind::kLaplace || kind == MechanismKind::kGaussian;
  }

  void Validate() const {
    if (adds_noise()) {
      internal::Require(std::isfinite(eta) && eta > 0.0, ErrorCode::kConfiguration,
                        "noise mechanisms need eta > 0");
    }
    if (kind == MechanismKind::kSplitting) {
      internal::Require(chunks >= 1, ErrorCode::kConfiguration,
                        "splitting needs at least one chunk");
    }
  }
};

inline std::string MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kEmpirical:
      return "empirical";
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kGaussian:
      return "gaussian";
    case MechanismKind::kSplitting:
      return "splitting";
  }
  return "unknown";
}

// Chunk `round` of a dataset cut into `chunks` contiguous parts whose sizes
// differ by at most one.
inline Dataset SplittingChunk(const Dataset& s, std::size_t chunks, std::size_t round) {
  internal::Require(chunks <= s.size(), ErrorCode::kConfiguration,
                    "more chunks than dataset elements");
  internal::Require(round < chunks, ErrorCode::kProtocol,
                    "round " + std::to_string(round) + " exceeds the " +
                        std::to_string(chunks) + " available chunks");
  const std::size_t n = s.size();
  return s.Slice(round * n / chunks, (round + 1) * n / chunks);
}

inline Vector Respond(const MechanismSpec& spec, const Dataset& s, const LinearQuery& q,
                      std::size_t round, Rng& rng) {
  spec.Validate();
  switch (spec.kind) {
    case MechanismKind::kEmpirical:
      return EvaluateQuery(q, s);
    case MechanismKind::kLaplace: {
      Vector r = EvaluateQuery(q, s);
      for (double& v : r) v += SampleLaplace(rng, spec.eta);
      return r;
    }
    case MechanismKind::kGaussian: {
      Vector r = EvaluateQuery(q, s);
      for (double& v : r) v += SampleGaussian(rng, spec.eta);
      return r;
    }
    case MechanismKind::kSplitting:
      return EvaluateQuery(q, SplittingChunk(s, spec.chunks, round));
  }
  throw Error(ErrorCode::kConfiguration, "unknown mechanism kind");
}

// Log of the product of per-coordinate noise densities at `offset`.
inline double NoiseLogDensity(const MechanismSpec& spec, std::span<const double> offset) {
  spec.Validate();
  switch (spec.kind) {
    case MechanismKind::kLaplace: {
      double total = 0.0;
      const double log_norm = -std::log(2.0 * spec.eta);
      for (double x : offset) total += log_norm - std::abs(x) / spec.eta;
      return total;
    }
    case MechanismKind::kGaussian: {
      double total = 0.0;
      const double log_norm = -0.5 * std::log(2.0 * 3.14159265358979323846) - std::log(spec.eta);
      for (double x : offset) total += log_norm - 0.5 * (x / spec.eta) * (x / spec.eta);
      return total;
    }
    case MechanismKind::kEmpirical:
    case MechanismKind::kSplitting:
      break;
  }
  throw Error(ErrorCode::kUnsupported,
              MechanismName(spec.kind) + " mechanism has no noise density");
}

// A completed session: the view plus the queries it induced.
struct Transcript {
  View view;
  std::vector<LinearQuery> queries;
};

// Runs the adaptive loop q_i <- A(v_{i-1}), r_i <- M(s, q_i) for k rounds.
// Seeds follow the scheme documented in random.hpp.
inline Transcript RunSession(const MechanismSpec& mechanism, const AnalystSpec& analyst,
                             const Dataset& s, const DomainDistribution& D,
                             std::size_t k, std::uint64_t seed) {
  internal::Require(k >= 1, ErrorCode::kInvalidInput, "session needs k >= 1");
  internal::Require(s.domain_size() == D.size(), ErrorCode::kInvalidInput,
                    "dataset and prior are over different domains");
  mechanism.Validate();
  Transcript out;
  out.view.coin_seed = DeriveSeed(seed, 0);
  out.view.responses.reserve(k);
  out.queries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    LinearQuery q = NextQuery(analyst, out.view, D);
    internal::Require(q.domain_size() == D.size(), ErrorCode::kProtocol,
                      "analyst emitted a query over a different domain");
    Rng noise = MakeRng(DeriveSeed(seed, i + 1));
    out.view.responses.push_back(Respond(mechanism, s, q, i, noise));
    out.queries.push_back(std::move(q));
  }
  return out;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_MECHANISMS_HPP_
