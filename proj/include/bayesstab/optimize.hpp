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

#ifndef BAYESSTAB_OPTIMIZE_HPP_
#define BAYESSTAB_OPTIMIZE_HPP_

#include <cmath>
#include <cstddef>
#include <limits>

namespace bayesstab {

struct Minimum {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

// Golden-section search for a minimum of f on [lo, hi]. Stops once the
// bracket is narrower than rel_tol * max(|x|, 1e-300) or after max_iter steps.
template <typename F>
Minimum GoldenSection(F&& f, double lo, double hi, double rel_tol = 1e-4,
                      int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter; ++it) {
    const double scale = std::max(std::abs(0.5 * (a + b)), 1e-300);
    if (b - a <= rel_tol * scale) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

// Minimizes f over [lo, hi] (0 < lo < hi): a coarse scan on a log grid picks
// the best cell, golden section refines it in log coordinates, and the result
// is finally compared against both endpoints so that a non-unimodal objective
// can never report a value worse than the bracket ends.
template <typename F>
Minimum MinimizeLogBracket(F&& f, double lo, double hi, std::size_t scan_points = 48,
                           double rel_tol = 1e-4) {
  if (!(lo > 0.0) || !(hi > lo)) {
    const double x = std::max(lo, 0.0) > 0.0 ? lo : hi;
    return {x, f(x)};
  }
  const double tlo = std::log(lo);
  const double thi = std::log(hi);
  const std::size_t points = scan_points < 3 ? 3 : scan_points;
  const double step = (thi - tlo) / static_cast<double>(points - 1);
  Minimum best;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = i + 1 == points ? hi : std::exp(tlo + step * static_cast<double>(i));
    const double v = f(x);
    if (v < best.value) {
      best = {x, v};
      best_index = i;
    }
  }
  const double a = tlo + step * static_cast<double>(best_index == 0 ? 0 : best_index - 1);
  const double b = std::min(thi, tlo + step * static_cast<double>(best_index + 1));
  // Relative tolerance on c maps to an absolute tolerance on log c.
  const Minimum refined = GoldenSection(
      [&](double t) { return f(std::exp(t)); }, a, b,
      rel_tol / std::max(std::abs(0.5 * (a + b)), 1.0));
  if (refined.value < best.value) best = {std::exp(refined.x), refined.value};
  const double f_lo = f(lo);
  if (f_lo < best.value) best = {lo, f_lo};
  const double f_hi = f(hi);
  if (f_hi < best.value) best = {hi, f_hi};
  return best;
}

}  // namespace bayesstab

#endif  // BAYESSTAB_OPTIMIZE_HPP_
