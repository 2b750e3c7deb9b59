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

// Command-line front end.
//
//   bayesstab simulate --config exp.json --out results.csv
//   bayesstab oracle-verify --config inst.json
//   bayesstab bounds --kind laplace --k 100 --eta 0.05 --n 7191 --sigma 1
//                    --regime bounded --out curve.csv
//   bayesstab calibrate --mechanism laplace --alpha 1 --beta 0.125 --k 100
//                       --sigma 1 --delta-range 1
//
// Exit status: 0 when every check passes, 2 when any check fails, 1 on a
// configuration or input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bayesstab/bayesstab.hpp"
#include "bayesstab/json_io.hpp"

namespace {

using bayesstab::Json;

constexpr int kExitPass = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFail = 2;

int Simulate(const std::string& config_path, const std::string& out_path,
             std::optional<std::size_t> threads) {
  bayesstab::ExperimentConfig config =
      bayesstab::ExperimentFromJson(bayesstab::LoadJsonFile(config_path));
  if (threads) config.threads = *threads;
  const bayesstab::ExperimentResult result = bayesstab::RunExperiment(config);
  const std::string path = out_path.empty() ? config.output_path : out_path;
  if (path.empty() || path == "-") {
    bayesstab::WriteCsv(result, std::cout);
  } else {
    std::ofstream out(path);
    if (!out) {
      throw bayesstab::Error(bayesstab::ErrorCode::kConfiguration, "cannot write '" + path + "'");
    }
    bayesstab::WriteCsv(result, out);
  }
  const bayesstab::VerdictTable table = bayesstab::CompareBound(result);
  for (const auto& v : table.rows) {
    std::fprintf(stderr, "alpha=%-10.6g sample=%s dist=%s%s\n", v.alpha,
                 v.sample_pass ? "PASS" : "FAIL",
                 v.dist_checked ? (v.dist_pass ? "PASS" : "FAIL") : "n/a",
                 v.posterior_checked ? (v.posterior_pass ? " posterior=PASS" : " posterior=FAIL")
                                     : "");
  }
  std::fprintf(stderr, "overall: %s (mean final-round distribution error %.6g)\n",
               table.all_pass ? "PASS" : "FAIL", result.MeanFinalDistError());
  return table.all_pass ? kExitPass : kExitFail;
}

Json VectorJson(const bayesstab::Vector& v) {
  return v.size() == 1 ? Json(v[0]) : Json(v);
}

int OracleVerify(const std::string& config_path) {
  const bayesstab::OracleInstance inst =
      bayesstab::OracleInstanceFromJson(bayesstab::LoadJsonFile(config_path));
  const bayesstab::PosteriorReport report = bayesstab::PosteriorOverElements(
      inst.domain, inst.n, inst.mechanism, inst.queries, inst.view);
  const double tv = bayesstab::StabilityLoss(inst.domain, report);
  bool pass = true;
  Json checks = Json::array();
  for (const auto& q : inst.queries) {
    const bayesstab::CovarianceCheck cov = bayesstab::CheckCovariance(inst.domain, q, report);
    const double range = bayesstab::ComputeQueryStats(q, inst.domain).delta;
    const bool identity_ok = cov.gap <= 1e-9;
    const bool tv_ok = bayesstab::Norm(cov.lhs) <= range * tv + 1e-9;
    pass = pass && identity_ok && tv_ok;
    checks.push_back({{"lhs", VectorJson(cov.lhs)},
                      {"rhs", VectorJson(cov.rhs)},
                      {"gap", cov.gap},
                      {"range", range},
                      {"identity", identity_ok ? "PASS" : "FAIL"},
                      {"tv_dominance", tv_ok ? "PASS" : "FAIL"}});
  }
  Json posterior = Json::object();
  for (std::size_t x = 0; x < inst.domain.size(); ++x) {
    posterior[inst.domain.labels()[x]] = report.posterior.prob(x);
  }
  Json responses = Json::array();
  for (const auto& r : inst.view.responses) responses.push_back(VectorJson(r));
  const Json out = {{"posterior", posterior},
                    {"bayes_factors", report.bayes_factors},
                    {"log_evidence", report.log_evidence},
                    {"stability_loss", tv},
                    {"responses", responses},
                    {"checks", checks},
                    {"verdict", pass ? "PASS" : "FAIL"}};
  std::cout << out.dump(2) << '\n';
  return pass ? kExitPass : kExitFail;
}

struct BoundsArgs {
  std::string kind = "laplace";
  std::size_t k = 1;
  double eta = 0.0;
  std::size_t n = 1;
  double sigma = 0.0;
  double range = 1.0;
  std::string regime = "bounded";
  std::size_t d = 1;
  double delta = 1e-6;
  double delta_prime = 1e-4;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::size_t points = 50;
  std::string out;
};

int Bounds(const BoundsArgs& a) {
  const bayesstab::MechanismKind kind = bayesstab::MechanismFromJson(
      Json{{"kind", a.kind}, {"eta", a.eta}}).kind;
  const bayesstab::MechanismTailPair tails = bayesstab::MechanismTails(kind, a.k, a.eta);
  bayesstab::DistributionTailInputs in;
  in.kind = kind;
  in.n = a.n;
  in.eta = a.eta;
  in.k = a.k;
  in.sigma1 = a.sigma;
  in.range = a.range;
  in.regime = bayesstab::ParseRegime(a.regime);
  in.d = a.d;
  in.delta = a.delta;
  in.delta_prime = a.delta_prime;
  const bayesstab::TailFunction dist = bayesstab::DistributionTail(in);

  const double lo = a.alpha_min > 0.0 ? a.alpha_min : a.eta / 2.0;
  const double hi = a.alpha_max > 0.0 ? a.alpha_max : 20.0 * a.eta + dist.epsilon();
  if (!(hi > lo) || a.points < 2) {
    throw bayesstab::Error(bayesstab::ErrorCode::kConfiguration,
                           "alpha range must be increasing with at least two points");
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out);
    if (!file) {
      throw bayesstab::Error(bayesstab::ErrorCode::kConfiguration, "cannot write '" + a.out + "'");
    }
    out = &file;
  }
  *out << "alpha,phi,Phi_post,Phi_dist,validity_flag\n";
  char buf[160];
  for (std::size_t i = 0; i < a.points; ++i) {
    const double alpha =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(a.points - 1);
    const auto phi = tails.phi.Evaluate(alpha);
    const auto post = tails.phi_post.Evaluate(alpha);
    const auto d = dist.Evaluate(alpha);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%d\n", alpha, phi.value, post.value,
                  d.value, post.in_validity && d.in_validity ? 1 : 0);
    *out << buf;
  }
  return kExitPass;
}

struct CalibrateArgs {
  std::string mechanism = "laplace";
  double alpha = 1.0;
  double beta = 0.125;
  std::size_t k = 1;
  double sigma = 1.0;
  double range = 1.0;
  std::string regime = "bounded";
};

int Calibrate(const CalibrateArgs& a) {
  const bayesstab::Regime regime = bayesstab::ParseRegime(a.regime);
  bayesstab::Calibration cal;
  bool pass = true;
  Json certificate;
  if (a.mechanism == "laplace" || a.mechanism == "gaussian") {
    const bool laplace = a.mechanism == "laplace";
    cal = laplace ? bayesstab::LaplaceSampleSize(a.alpha, a.beta, a.k, a.sigma, a.range, regime)
                  : bayesstab::GaussianSampleSize(a.alpha, a.beta, a.k, a.sigma, a.range, regime);
    bayesstab::DistributionTailInputs in;
    in.kind = laplace ? bayesstab::MechanismKind::kLaplace : bayesstab::MechanismKind::kGaussian;
    in.n = cal.n;
    in.eta = cal.eta;
    in.k = a.k;
    in.sigma1 = a.sigma;
    in.range = a.range;
    in.regime = regime;
    in.delta = cal.delta;
    in.delta_prime = cal.delta_prime;
    const bayesstab::TailValue v = bayesstab::DistributionTail(in).Evaluate(a.alpha);
    pass = v.in_validity && v.value <= a.beta;
    certificate = {{"Phi_dist_at_alpha", v.value},
                   {"in_validity", v.in_validity},
                   {"verdict", pass ? "PASS" : "FAIL"}};
  } else if (a.mechanism == "splitting") {
    cal = bayesstab::SplittingSampleSize(a.alpha, a.beta, a.k, a.sigma, a.range);
  } else {
    throw bayesstab::Error(bayesstab::ErrorCode::kConfiguration,
                           "unknown mechanism '" + a.mechanism + "'");
  }
  Json out = {{"n", cal.n},
              {"eta", cal.eta},
              {"method", cal.method},
              {"inputs",
               {{"alpha", a.alpha},
                {"beta", a.beta},
                {"k", a.k},
                {"sigma", a.sigma},
                {"delta_range", a.range},
                {"regime", bayesstab::RegimeName(regime)}}}};
  if (cal.method != "splitting") {
    out["delta_prime"] = cal.delta_prime;
    if (cal.method == "gaussian") out["delta"] = cal.delta;
    out["certificate"] = certificate;
  }
  std::cout << out.dump(2) << '\n';
  return pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive data analysis: simulation, exact posteriors and stability bounds"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::size_t> threads;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error tails against bounds");
  simulate->add_option("--config", config_path, "experiment JSON")->required();
  simulate->add_option("--out", out_path, "CSV output path (default: config 'output' or stdout)");
  simulate->add_option("--threads", threads, "worker threads (default: hardware concurrency)");

  std::string instance_path;
  auto* oracle = app.add_subcommand("oracle-verify", "exact posterior and covariance identity");
  oracle->add_option("--config", instance_path, "instance JSON")->required();

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "tail curves as CSV");
  bounds->add_option("--kind", bounds_args.kind, "laplace or gaussian")->required();
  bounds->add_option("--k", bounds_args.k, "number of queries")->required();
  bounds->add_option("--eta", bounds_args.eta, "noise scale")->required();
  bounds->add_option("--n", bounds_args.n, "dataset size")->required();
  bounds->add_option("--sigma", bounds_args.sigma, "element-level standard deviation")->required();
  bounds->add_option("--delta-range", bounds_args.range, "query range (bounded regime)");
  bounds->add_option("--regime", bounds_args.regime, "bounded or subgaussian");
  bounds->add_option("--d", bounds_args.d, "query dimension");
  bounds->add_option("--delta", bounds_args.delta, "gaussian per-query failure mass");
  bounds->add_option("--delta-prime", bounds_args.delta_prime, "composition failure mass");
  bounds->add_option("--alpha-min", bounds_args.alpha_min, "first alpha (default eta/2)");
  bounds->add_option("--alpha-max", bounds_args.alpha_max, "last alpha");
  bounds->add_option("--points", bounds_args.points, "number of alpha values");
  bounds->add_option("--out", bounds_args.out, "CSV output path (default stdout)");

  CalibrateArgs cal_args;
  auto* calibrate = app.add_subcommand("calibrate", "sample size and noise scale");
  calibrate->add_option("--mechanism", cal_args.mechanism, "laplace, gaussian or splitting")
      ->required();
  calibrate->add_option("--alpha", cal_args.alpha, "accuracy target")->required();
  calibrate->add_option("--beta", cal_args.beta, "failure probability")->required();
  calibrate->add_option("--k", cal_args.k, "number of queries")->required();
  calibrate->add_option("--sigma", cal_args.sigma, "element-level standard deviation")
      ->required();
  calibrate->add_option("--delta-range", cal_args.range, "query range");
  calibrate->add_option("--regime", cal_args.regime, "bounded or subgaussian");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return Simulate(config_path, out_path, threads);
    if (*oracle) return OracleVerify(instance_path);
    if (*bounds) return Bounds(bounds_args);
    if (*calibrate) return Calibrate(cal_args);
  } catch (const bayesstab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
