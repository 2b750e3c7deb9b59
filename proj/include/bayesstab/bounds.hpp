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

// Closed-form generalization bounds.
//
// A tail function maps a threshold alpha to an upper bound on the probability
// that some error exceeds alpha. Closed forms are kept unclamped internally
// (Raw) because the integral transforms below must see the formula itself;
// Evaluate clamps to [0, 1] and reports whether alpha lies in the range where
// the formula is proven.

#ifndef BAYESSTAB_BOUNDS_HPP_
#define BAYESSTAB_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bayesstab/error.hpp"
#include "bayesstab/mechanisms.hpp"
#include "bayesstab/optimize.hpp"
#include "bayesstab/oracle.hpp"

namespace bayesstab {

enum class TailFamily {
  kLaplaceSample,
  kLaplacePosterior,
  kGaussianSample,
  kGaussianPosterior,
  kComposed,
  kTabulated,
};

inline std::string TailFamilyName(TailFamily family) {
  switch (family) {
    case TailFamily::kLaplaceSample:
      return "laplace_sample";
    case TailFamily::kLaplacePosterior:
      return "laplace_posterior";
    case TailFamily::kGaussianSample:
      return "gaussian_sample";
    case TailFamily::kGaussianPosterior:
      return "gaussian_posterior";
    case TailFamily::kComposed:
      return "composed";
    case TailFamily::kTabulated:
      return "tabulated";
  }
  return "unknown";
}

struct TailValue {
  double value = 1.0;
  bool in_validity = true;
};

class TailFunction {
 public:
  // phi(alpha) = k exp(-alpha / eta).
  static TailFunction LaplaceSample(double k, double eta) {
    return ClosedForm(TailFamily::kLaplaceSample, k, eta,
                      -std::numeric_limits<double>::infinity());
  }
  // Phi(alpha) = k exp(1 - alpha / eta), proven for alpha >= eta.
  static TailFunction LaplacePosterior(double k, double eta) {
    return ClosedForm(TailFamily::kLaplacePosterior, k, eta, eta);
  }
  // phi(alpha) = (k / 2) erfc(alpha / (sqrt(2) eta)).
  static TailFunction GaussianSample(double k, double eta) {
    return ClosedForm(TailFamily::kGaussianSample, k, eta,
                      -std::numeric_limits<double>::infinity());
  }
  // Phi(alpha) = k alpha / (sqrt(2 pi) eta) exp(1 - alpha^2 / (2 eta^2)),
  // proven for alpha >= sqrt(2) eta.
  static TailFunction GaussianPosterior(double k, double eta) {
    return ClosedForm(TailFamily::kGaussianPosterior, k, eta, std::numbers::sqrt2 * eta);
  }

  // Phi(alpha) = inf_c [post(alpha - eps - c) + slack / c], where post is the
  // posterior tail of `noise` with (k, eta).
  static TailFunction Composed(MechanismKind noise, double k, double eta, double eps,
                               double slack) {
    internal::Require(noise == MechanismKind::kLaplace || noise == MechanismKind::kGaussian,
                      ErrorCode::kUnsupported, "composed tails need a noise mechanism");
    internal::Require(eps >= 0.0 && slack >= 0.0, ErrorCode::kInvalidInput,
                      "composed tail needs eps, slack >= 0");
    TailFunction t = noise == MechanismKind::kLaplace ? LaplacePosterior(k, eta)
                                                      : GaussianPosterior(k, eta);
    t.post_floor_ = t.floor_;
    t.post_family_ = t.family_;
    t.family_ = TailFamily::kComposed;
    t.eps_ = eps;
    t.slack_ = slack;
    t.floor_ = eps + t.post_floor_;
    return t;
  }

  // Left-step table: the value at alpha is the value at the largest grid
  // point not above alpha, and 1 below the first grid point. For a
  // non-increasing tail this never undershoots the tabulated function.
  static TailFunction Tabulated(std::vector<double> grid, std::vector<double> values,
                                std::vector<bool> valid = {}) {
    internal::Require(!grid.empty() && grid.size() == values.size(),
                      ErrorCode::kInvalidInput, "table needs matching non-empty columns");
    if (valid.empty()) valid.assign(grid.size(), true);
    internal::Require(valid.size() == grid.size(), ErrorCode::kInvalidInput,
                      "validity column length mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      internal::Require(grid[i] > grid[i - 1], ErrorCode::kInvalidInput,
                        "table grid must be strictly increasing");
    }
    for (double v : values) {
      internal::Require(v >= 0.0 && std::isfinite(v), ErrorCode::kInvalidInput,
                        "table values must be finite and non-negative");
    }
    TailFunction t;
    t.family_ = TailFamily::kTabulated;
    t.floor_ = grid.front();
    t.grid_ = std::move(grid);
    t.values_ = std::move(values);
    t.valid_ = std::move(valid);
    return t;
  }

  // A single (eps, delta) stability guarantee seen as a tail: 1 below eps,
  // delta from eps on.
  static TailFunction PointBound(double eps, double delta) {
    return Tabulated({eps}, {delta});
  }

  TailFamily family() const { return family_; }
  double k() const { return k_; }
  double eta() const { return eta_; }
  double epsilon() const { return eps_; }
  double slack() const { return slack_; }
  double scale() const { return scale_; }
  double validity_floor() const { return floor_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

  TailFunction Scaled(double factor) const {
    internal::Require(factor >= 0.0 && std::isfinite(factor), ErrorCode::kInvalidInput,
                      "scale factor must be finite and non-negative");
    TailFunction t = *this;
    if (family_ == TailFamily::kTabulated) {
      for (double& v : t.values_) v *= factor;
    } else {
      t.scale_ *= factor;
    }
    return t;
  }

  // The unclamped formula (the minimized objective for composed tails).
  double Raw(double alpha) const {
    switch (family_) {
      case TailFamily::kLaplaceSample:
      case TailFamily::kLaplacePosterior:
      case TailFamily::kGaussianSample:
      case TailFamily::kGaussianPosterior:
        return scale_ * ClosedFormRaw(family_, alpha);
      case TailFamily::kComposed:
        return scale_ * ComposedRaw(alpha);
      case TailFamily::kTabulated:
        return Lookup(alpha).value;
    }
    return 1.0;
  }

  TailValue Evaluate(double alpha) const {
    if (family_ == TailFamily::kTabulated) {
      TailValue v = Lookup(alpha);
      v.value = std::clamp(v.value, 0.0, 1.0);
      return v;
    }
    // A composed tail needs room for a positive slack c beyond its floor.
    const bool below = family_ == TailFamily::kComposed ? !(alpha > floor_) : alpha < floor_;
    if (below) return {1.0, false};
    return {std::clamp(Raw(alpha), 0.0, 1.0), true};
  }

  // Integral of Raw over [a, infinity).
  double TailIntegral(double a) const {
    constexpr double kSqrtPi = 1.7724538509055160273;
    switch (family_) {
      case TailFamily::kLaplaceSample:
        return scale_ * k_ * eta_ * std::exp(-a / eta_);
      case TailFamily::kLaplacePosterior:
        return scale_ * k_ * eta_ * std::exp(1.0 - a / eta_);
      case TailFamily::kGaussianSample: {
        const double s = std::numbers::sqrt2 * eta_;
        const double u = a / s;
        return scale_ * 0.5 * k_ * s * (std::exp(-u * u) / kSqrtPi - u * std::erfc(u));
      }
      case TailFamily::kGaussianPosterior:
        return scale_ * k_ * eta_ * std::exp(1.0 - a * a / (2.0 * eta_ * eta_)) /
               std::sqrt(2.0 * std::numbers::pi);
      case TailFamily::kComposed:
        break;
      case TailFamily::kTabulated: {
        internal::Require(values_.back() == 0.0, ErrorCode::kUnsupported,
                          "tabulated tail does not vanish, integral diverges");
        double total = 0.0;
        if (a < grid_.front()) total += grid_.front() - a;
        for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
          const double lo = std::max(a, grid_[i]);
          const double hi = grid_[i + 1];
          if (hi > lo) total += values_[i] * (hi - lo);
        }
        return total;
      }
    }
    throw Error(ErrorCode::kUnsupported, "no closed-form integral for a composed tail");
  }

 private:
  static TailFunction ClosedForm(TailFamily family, double k, double eta, double floor) {
    internal::Require(k >= 1.0, ErrorCode::kInvalidInput, "tails need k >= 1");
    internal::Require(eta > 0.0 && std::isfinite(eta), ErrorCode::kInvalidInput,
                      "tails need eta > 0");
    TailFunction t;
    t.family_ = family;
    t.k_ = k;
    t.eta_ = eta;
    t.floor_ = floor;
    return t;
  }

  double ClosedFormRaw(TailFamily family, double alpha) const {
    switch (family) {
      case TailFamily::kLaplaceSample:
        return k_ * std::exp(-alpha / eta_);
      case TailFamily::kLaplacePosterior:
        return k_ * std::exp(1.0 - alpha / eta_);
      case TailFamily::kGaussianSample:
        return 0.5 * k_ * std::erfc(alpha / (std::numbers::sqrt2 * eta_));
      case TailFamily::kGaussianPosterior:
        return k_ * alpha / (std::sqrt(2.0 * std::numbers::pi) * eta_) *
               std::exp(1.0 - alpha * alpha / (2.0 * eta_ * eta_));
      default:
        return 1.0;
    }
  }

  // inf over c in [1e-6 alpha, alpha - eps - post_floor] so that the posterior
  // tail is only ever used where it is proven.
  double ComposedRaw(double alpha) const {
    const double reach = alpha - eps_;
    if (!(reach > post_floor_)) return 1.0;
    if (slack_ == 0.0) return ClosedFormRaw(post_family_, reach);
    auto objective = [&](double c) { return ClosedFormRaw(post_family_, reach - c) + slack_ / c; };
    const double lo = 1e-6 * alpha;
    const double hi = reach - post_floor_;
    if (!(hi > lo)) return objective(hi);
    return MinimizeLogBracket(objective, lo, hi, 48, 1e-10).value;
  }

  TailValue Lookup(double alpha) const {
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), alpha);
    if (it == grid_.begin()) return {1.0, false};
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
    return {values_[i], valid_[i]};
  }

  TailFunction() = default;

  TailFamily family_ = TailFamily::kTabulated;
  TailFamily post_family_ = TailFamily::kLaplacePosterior;
  double k_ = 1.0;
  double eta_ = 1.0;
  double eps_ = 0.0;
  double slack_ = 0.0;
  double scale_ = 1.0;
  double floor_ = 0.0;
  double post_floor_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<bool> valid_;
};

struct MechanismTailPair {
  TailFunction phi;       // sample accuracy
  TailFunction phi_post;  // posterior accuracy
};

inline MechanismTailPair MechanismTails(MechanismKind kind, std::size_t k, double eta) {
  internal::Require(k >= 1, ErrorCode::kInvalidInput, "tails need k >= 1");
  const double kd = static_cast<double>(k);
  switch (kind) {
    case MechanismKind::kLaplace:
      return {TailFunction::LaplaceSample(kd, eta), TailFunction::LaplacePosterior(kd, eta)};
    case MechanismKind::kGaussian:
      return {TailFunction::GaussianSample(kd, eta), TailFunction::GaussianPosterior(kd, eta)};
    default:
      throw Error(ErrorCode::kUnsupported,
                  "no closed-form tails for the " + MechanismName(kind) + " mechanism");
  }
}

// inf over c in (0, alpha) of (1/c) * integral_{alpha - c}^inf phi.
inline double SampleToPosteriorAt(const TailFunction& phi, double alpha) {
  if (!(alpha > 0.0)) return 1.0;
  auto objective = [&](double c) { return phi.TailIntegral(alpha - c) / c; };
  return std::clamp(MinimizeLogBracket(objective, 1e-6 * alpha, alpha, 48, 1e-8).value,
                    0.0, 1.0);
}

inline TailFunction SampleToPosterior(const TailFunction& phi, const std::vector<double>& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = SampleToPosteriorAt(phi, grid[i]);
  return TailFunction::Tabulated(grid, std::move(values));
}

namespace internal {

inline double TransformUnclamped(const TailFunction& phi, double reach) {
  if (!(reach > 0.0)) return 1.0;
  auto objective = [&](double c) { return phi.TailIntegral(reach - c) / c; };
  return MinimizeLogBracket(objective, 1e-6 * reach, reach, 48, 1e-8).value;
}

}  // namespace internal

// inf over (eps, c) of (1/c) integral_{alpha - eps - c}^inf phi + psi(eps).
// The eps search scans 0, psi's breakpoints and a log grid, then refines the
// best interior candidate by golden section.
inline double CombineAccuracyAt(const TailFunction& phi, const TailFunction& psi,
                                double alpha) {
  if (!(alpha > 0.0)) return 1.0;
  auto objective = [&](double eps) {
    return internal::TransformUnclamped(phi, alpha - eps) + psi.Evaluate(eps).value;
  };
  std::vector<double> candidates = {0.0};
  if (psi.family() == TailFamily::kTabulated) {
    for (double g : psi.grid()) {
      if (g >= 0.0 && g < alpha) candidates.push_back(g);
    }
  }
  constexpr int kScan = 48;
  for (int i = 0; i < kScan; ++i) {
    candidates.push_back(1e-6 * alpha * std::pow(1e6, static_cast<double>(i) / (kScan - 1)));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = objective(candidates[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best > 0 && best + 1 < candidates.size()) {
    const Minimum refined =
        GoldenSection(objective, candidates[best - 1], candidates[best + 1], 1e-8);
    best_value = std::min(best_value, refined.value);
  }
  return std::clamp(best_value, 0.0, 1.0);
}

inline TailFunction CombineAccuracy(const TailFunction& phi, const TailFunction& psi,
                                    const std::vector<double>& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = CombineAccuracyAt(phi, psi, grid[i]);
  return TailFunction::Tabulated(grid, std::move(values));
}

// --- LBI calculus ----------------------------------------------------------

inline LbiParams LbiPerQuery(MechanismKind kind, std::size_t n, double eta, double delta = 0.0) {
  internal::Require(n >= 1, ErrorCode::kInvalidInput, "n must be >= 1");
  internal::Require(eta > 0.0, ErrorCode::kInvalidInput, "eta must be > 0");
  const double scale = static_cast<double>(n) * eta;
  switch (kind) {
    case MechanismKind::kLaplace:
      return {1.0 / scale, 0.0, 0.0};
    case MechanismKind::kGaussian:
      internal::Require(delta > 0.0 && delta <= 1.0, ErrorCode::kInvalidInput,
                        "gaussian LBI needs 0 < delta <= 1");
      return {std::sqrt(2.0 * std::log(1.0 / delta)) / scale, 1.0 / (2.0 * scale * scale),
              delta};
    default:
      throw Error(ErrorCode::kUnsupported,
                  MechanismName(kind) + " mechanism has no LBI parameters");
  }
}

inline LbiParams ComposeLbi(const LbiParams& per_query, std::size_t k, double delta_prime) {
  internal::Require(delta_prime > 0.0 && delta_prime < 1.0, ErrorCode::kInvalidInput,
                    "delta' must lie in (0, 1)");
  return {per_query.gamma1 * std::sqrt(2.0 * std::log(1.0 / delta_prime)),
          per_query.gamma2 + 0.5 * per_query.gamma1 * per_query.gamma1,
          static_cast<double>(k) * per_query.delta + delta_prime};
}

enum class Regime { kBounded, kSubGaussian };

inline std::string RegimeName(Regime regime) {
  return regime == Regime::kBounded ? "bounded" : "subgaussian";
}

inline Regime ParseRegime(const std::string& name) {
  if (name == "bounded") return Regime::kBounded;
  if (name == "subgaussian" || name == "sub-gaussian" || name == "sub_gaussian") {
    return Regime::kSubGaussian;
  }
  throw Error(ErrorCode::kConfiguration, "unknown regime '" + name + "'");
}

struct Window {
  double lo = 0.0;
  double hi = 1.0;
};

namespace internal {

// exp(-1 / x) with x = 0 mapped to 0.
inline double ExpNegInv(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

inline void CheckWindow(const Window& w, double delta_prime, const std::string& what) {
  if (w.lo > w.hi) {
    throw Error(ErrorCode::kInfeasible, what + ": admissible delta' window is empty [" +
                                            std::to_string(w.lo) + ", " +
                                            std::to_string(w.hi) + "]");
  }
  if (delta_prime < w.lo || delta_prime > w.hi) {
    throw ValidityError(what + ": delta' = " + std::to_string(delta_prime) +
                            " is outside the admissible window",
                        w.lo, w.hi);
  }
}

}  // namespace internal

// Admissible delta' for the Theta bound. `range` is the query range (bounded
// regime); the sub-Gaussian window uses sigma1.
inline Window ThetaWindow(Regime regime, double gamma1, double sigma1, std::size_t k,
                          std::size_t d, double range) {
  const double kd = static_cast<double>(k);
  if (regime == Regime::kBounded) {
    return {internal::ExpNegInv(4.0 * kd * gamma1 * gamma1 * range * range), std::exp(-1.0)};
  }
  return {internal::ExpNegInv(156.0 * kd * static_cast<double>(d) * gamma1 * gamma1 * sigma1 *
                              sigma1),
          std::exp(-4.0)};
}

// Upper bound on the Theta term for k adaptively chosen queries whose
// element-level standard deviation (or sub-Gaussian parameter) is sigma1.
inline double ThetaBound(Regime regime, double gamma1, double sigma1, std::size_t k,
                         std::size_t d, double delta_prime, double range) {
  internal::Require(gamma1 >= 0.0 && sigma1 >= 0.0 && k >= 1 && d >= 1,
                    ErrorCode::kInvalidInput, "theta bound needs gamma1, sigma1 >= 0, k, d >= 1");
  internal::Require(regime == Regime::kSubGaussian || range > 0.0, ErrorCode::kInvalidInput,
                    "bounded regime needs a positive range");
  internal::CheckWindow(ThetaWindow(regime, gamma1, sigma1, k, d, range), delta_prime,
                        "theta bound");
  const double kd = static_cast<double>(k);
  const double log_inv = std::log(1.0 / delta_prime);
  if (regime == Regime::kBounded) {
    return 2.0 * gamma1 * sigma1 * sigma1 * std::sqrt(3.0 * kd * log_inv);
  }
  return 29.0 * gamma1 * sigma1 * sigma1 * std::sqrt(kd * static_cast<double>(d) * log_inv);
}

struct DistributionTailInputs {
  MechanismKind kind = MechanismKind::kLaplace;
  std::size_t n = 0;
  double eta = 0.0;
  std::size_t k = 1;
  double sigma1 = 0.0;
  double range = 1.0;  // bounded regime only
  Regime regime = Regime::kBounded;
  std::size_t d = 1;
  double delta = 0.0;  // gaussian only
  double delta_prime = 0.0;
};

struct DistributionTailPlan {
  double eps = 0.0;
  double slack = 0.0;
  Window window;
};

inline DistributionTailPlan PlanDistributionTail(const DistributionTailInputs& in) {
  internal::Require(in.n >= 1 && in.k >= 1 && in.d >= 1, ErrorCode::kInvalidInput,
                    "n, k, d must be >= 1");
  internal::Require(in.eta > 0.0 && in.sigma1 >= 0.0, ErrorCode::kInvalidInput,
                    "need eta > 0 and sigma1 >= 0");
  internal::Require(in.regime == Regime::kSubGaussian || in.range > 0.0,
                    ErrorCode::kInvalidInput, "bounded regime needs a positive range");
  internal::Require(in.delta_prime > 0.0 && in.delta_prime < 1.0, ErrorCode::kInvalidInput,
                    "delta' must lie in (0, 1)");
  const double kd = static_cast<double>(in.k);
  const double dd = static_cast<double>(in.d);
  const double ne = static_cast<double>(in.n) * in.eta;
  const double ne2 = ne * ne;
  const double s2 = in.sigma1 * in.sigma1;
  const double log_inv_dp = std::log(1.0 / in.delta_prime);
  DistributionTailPlan plan;
  double delta = 0.0;
  if (in.kind == MechanismKind::kLaplace) {
    if (in.regime == Regime::kBounded) {
      plan.eps = 2.0 * s2 / ne * std::sqrt(3.0 * kd * log_inv_dp);
      plan.window = {std::exp(-ne2 / (4.0 * kd * in.range * in.range)), std::exp(-1.0)};
    } else {
      plan.eps = 29.0 * s2 / ne * std::sqrt(kd * dd * log_inv_dp);
      plan.window = {s2 > 0 ? std::exp(-ne2 / (156.0 * kd * dd * s2)) : 0.0, std::exp(-4.0)};
    }
  } else if (in.kind == MechanismKind::kGaussian) {
    internal::Require(in.delta > 0.0 && in.delta < 1.0, ErrorCode::kInvalidInput,
                      "gaussian tail needs delta in (0, 1)");
    delta = in.delta;
    const double log_inv_d = std::log(1.0 / in.delta);
    if (in.regime == Regime::kBounded) {
      plan.eps = 2.0 * s2 / ne * std::sqrt(6.0 * kd * log_inv_d * log_inv_dp);
      plan.window = {std::exp(-ne2 / (8.0 * kd * in.range * in.range * log_inv_d)),
                     std::exp(-1.0)};
    } else {
      plan.eps = 29.0 * s2 / ne * std::sqrt(2.0 * kd * dd * log_inv_dp);
      plan.window = {s2 > 0 ? std::exp(-ne2 / (312.0 * kd * dd * s2)) : 0.0, std::exp(-4.0)};
    }
  } else {
    throw Error(ErrorCode::kUnsupported,
                "no distribution tail for the " + MechanismName(in.kind) + " mechanism");
  }
  plan.slack = in.sigma1 * (kd * delta + in.delta_prime);
  return plan;
}

// Distribution-accuracy tail of a noise mechanism answering k adaptive
// queries on n samples.
inline TailFunction DistributionTail(const DistributionTailInputs& in) {
  const DistributionTailPlan plan = PlanDistributionTail(in);
  internal::CheckWindow(plan.window, in.delta_prime, "distribution tail");
  return TailFunction::Composed(in.kind, static_cast<double>(in.k), in.eta, plan.eps,
                                plan.slack);
}

// --- sample-size calibration -----------------------------------------------

struct Calibration {
  std::string method;
  std::size_t n = 0;
  double eta = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
};

namespace internal {

inline void CheckCalibrationInputs(double alpha, double beta, std::size_t k, double sigma1,
                                   double range, Regime regime) {
  Require(alpha > 0.0 && sigma1 > 0.0 && k >= 1, ErrorCode::kInvalidInput,
          "calibration needs alpha > 0, sigma1 > 0, k >= 1");
  Require(regime == Regime::kSubGaussian || range > 0.0, ErrorCode::kInvalidInput,
          "bounded regime needs a positive range");
  Require(beta > 0.0 && beta <= 0.125, ErrorCode::kOutOfTheorem,
          "calibration is only proven for 0 < beta <= 1/8");
}

inline std::size_t CeilCount(double x) {
  Require(std::isfinite(x) && x < 1e18, ErrorCode::kInfeasible, "sample size overflows");
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace internal

inline Calibration LaplaceSampleSize(double alpha, double beta, std::size_t k, double sigma1,
                                     double range, Regime regime) {
  internal::CheckCalibrationInputs(alpha, beta, k, sigma1, range, regime);
  const double kd = static_cast<double>(k);
  const double floor = std::min(sigma1, alpha);
  const double log_term = std::log(kd * sigma1 / (floor * beta * beta));
  const double power = std::pow(log_term, 1.5) * std::sqrt(kd);
  const double ratio2 = (sigma1 / alpha) * (sigma1 / alpha);
  Calibration out;
  out.method = "laplace";
  out.eta = alpha / (2.0 * log_term);
  out.delta_prime = floor * beta * beta / (kd * sigma1);
  if (regime == Regime::kBounded) {
    out.n = internal::CeilCount(
        2.0 * power * std::max(range / alpha, 8.0 * std::sqrt(3.0) * ratio2));
  } else {
    out.n = internal::CeilCount(232.0 * power * ratio2);
  }
  return out;
}

inline Calibration GaussianSampleSize(double alpha, double beta, std::size_t k, double sigma1,
                                      double range, Regime regime) {
  internal::CheckCalibrationInputs(alpha, beta, k, sigma1, range, regime);
  const double kd = static_cast<double>(k);
  const double floor = std::min(sigma1, alpha);
  const double log_term = std::log((kd + 1.0) * sigma1 / (floor * beta * beta));
  const double ratio2 = (sigma1 / alpha) * (sigma1 / alpha);
  Calibration out;
  out.method = "gaussian";
  out.eta = alpha / (3.0 * std::sqrt(2.0 * log_term));
  out.delta = floor * beta * beta / ((kd + 1.0) * sigma1);
  out.delta_prime = out.delta;
  if (regime == Regime::kBounded) {
    out.n = internal::CeilCount(2.0 * std::numbers::sqrt2 * std::pow(log_term, 1.5) *
                                std::sqrt(kd) *
                                std::max(range / alpha, 12.0 * std::sqrt(6.0) * ratio2));
  } else {
    // The sub-Gaussian branch keeps k (not k + 1) inside the logarithm.
    const double log_k = std::log(kd * sigma1 / (floor * beta * beta));
    out.n = internal::CeilCount(696.0 * std::pow(log_k, 1.5) * std::sqrt(kd) * ratio2);
  }
  return out;
}

// Fresh data per query: Bernstein on each of k chunks plus a union bound.
inline Calibration SplittingSampleSize(double alpha, double beta, std::size_t k, double sigma1,
                                       double range) {
  internal::Require(alpha > 0.0 && sigma1 >= 0.0 && range > 0.0 && k >= 1,
                    ErrorCode::kInvalidInput,
                    "splitting needs alpha > 0, sigma1 >= 0, range > 0, k >= 1");
  internal::Require(beta > 0.0 && beta < 1.0, ErrorCode::kInvalidInput,
                    "beta must lie in (0, 1)");
  const double kd = static_cast<double>(k);
  const double chunk = (2.0 / 3.0) * std::log(2.0 * kd / beta) *
                       (3.0 * sigma1 * sigma1 / (alpha * alpha) + range / alpha);
  Calibration out;
  out.method = "splitting";
  out.n = k * internal::CeilCount(chunk);
  return out;
}

// --- stability conversions -------------------------------------------------

struct StabilityBudget {
  LbiParams lbi;           // composed parameters
  double theta_eps = 0.0;  // bound on the Theta term
  double slack_b = 1.0;
  double slack_c = 1.0;
  double delta_prime = 0.5;

  void Validate() const {
    internal::Require(slack_b > 0.0 && slack_c > 0.0, ErrorCode::kInvalidInput,
                      "slack parameters must be positive");
    internal::Require(delta_prime > 0.0 && delta_prime < 1.0, ErrorCode::kInvalidInput,
                      "delta' must lie in (0, 1)");
  }
};

struct BayesStability {
  double eps = 0.0;
  double del = 0.0;
};

// (theta + c, sigma (k delta + delta') / c).
inline BayesStability LbiToBayes(const StabilityBudget& budget, double theta, double sigma1,
                                 std::size_t k, double per_query_delta) {
  budget.Validate();
  const double mass = static_cast<double>(k) * per_query_delta + budget.delta_prime;
  return {theta + budget.slack_c, sigma1 * mass / budget.slack_c};
}

// Local statistical stability (eps, delta) to Bayes stability with slack c.
inline BayesStability LssToBayes(double eps, double delta, double sigma1, double c) {
  internal::Require(c > 0.0, ErrorCode::kInvalidInput, "slack c must be positive");
  return {sigma1 * (eps + c), delta / c};
}

}  // namespace bayesstab

#endif  // BAYESSTAB_BOUNDS_HPP_
