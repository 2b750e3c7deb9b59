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

#ifndef BAYESSTAB_RANDOM_HPP_
#define BAYESSTAB_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace bayesstab {

using Rng = std::mt19937_64;

// Stream splitting. Every consumer of randomness gets its own child seed
// derived from a parent seed and a stream index:
//
//   trial i of an experiment   -> DeriveSeed(master, i)
//   dataset draw of a trial    -> DeriveSeed(trial, 0)
//   session of a trial         -> DeriveSeed(trial, 1)
//   analyst coins of a session -> DeriveSeed(session, 0)
//   noise of round r           -> DeriveSeed(session, r + 1)
//   analyst draw for round r   -> DeriveSeed(coin_seed, r)
//
// The mixer is splitmix64, so nearby (parent, stream) pairs give unrelated
// children.
constexpr std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t stream) {
  std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

// Uniform on [0, 1) from the top 53 bits; portable across standard libraries.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1).
inline double UniformOpenUnit(Rng& rng) {
  double u;
  do {
    u = UniformUnit(rng);
  } while (u == 0.0);
  return u;
}

// Laplace(0, scale) by inversion.
inline double SampleLaplace(Rng& rng, double scale) {
  const double u = UniformOpenUnit(rng) - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

// N(0, scale^2) by Box-Muller; one variate per call keeps the stream layout
// trivial to reason about.
inline double SampleGaussian(Rng& rng, double scale) {
  const double u1 = UniformOpenUnit(rng);
  const double u2 = UniformUnit(rng);
  return scale * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace bayesstab

#endif  // BAYESSTAB_RANDOM_HPP_
