// SPDX-License-Identifier: Apache-2.0
//
// gbsim: group-blind detection for pilot-contaminated massive MIMO uplinks
// Copyright 2026 The gbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "gbsim/asymptotics.hpp"
#include "gbsim/cli.hpp"
#include "gbsim/engine.hpp"
#include "gbsim/metrics.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace gbsim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("GBSIM_THREADS"); env && *env) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

ScenarioConfig<double> two_cell(double b1, double b2, double P, double eps) {
  ScenarioConfig<double> cfg;
  cfg.num_cells = 2;
  cfg.num_users = 1;
  cfg.power = P;
  cfg.training_eps = eps;
  cfg.gains = RMatrix<double>(2, 1);
  cfg.gains << b1, b2;
  return cfg;
}

const MetricsRecord& pick(const std::vector<MetricsRecord>& rs, DetectorKind d, Index n,
                          Index user = 0) {
  for (const auto& r : rs)
    if (r.detector == d && r.antennas == n && r.user == user) return r;
  throw std::runtime_error("missing record");
}

/// User-averaged rate and its 95% half-width (users are averaged per trial
/// point, so the half-width is the mean of the per-user half-widths).
std::pair<double, double> cell_rate(const std::vector<MetricsRecord>& rs, DetectorKind d,
                                    Index n, Index users) {
  double m = 0, ci = 0;
  for (Index k = 0; k < users; ++k) {
    const auto& r = pick(rs, d, n, k);
    if (r.status != RecordStatus::Ok) return {NAN, NAN};
    m += r.mean_rate;
    ci += r.rate_ci95;
  }
  return {m / users, ci / users};
}

// Two-cell symmetric point at n = 1024, shared by criteria 1 to 4.
std::vector<MetricsRecord> symmetric_run() {
  static std::vector<MetricsRecord> cache;
  if (cache.empty()) {
    ExperimentPlan plan;
    plan.scenario_id = "two_cell_symmetric";
    plan.base = two_cell(1.0, 1.0, 100.0, 1e-4);
    plan.antenna_counts = {1024};
    plan.detectors = {DetectorKind::MatchedFilter, DetectorKind::GroupBlind};
    plan.trials = 200;
    plan.seed = 20260101;
    plan.threads = worker_threads();
    cache = run_plan(plan);
  }
  return cache;
}

Outcome criterion1() {
  const auto& gb = pick(symmetric_run(), DetectorKind::GroupBlind, 1024);
  const double target = asymptotic_gb_sinr(1.0, 1.0, 1e-4);
  const double rel = std::abs(gb.mean_sinr - target) / target;
  return {gb.status == RecordStatus::Ok && rel <= 0.05,
          fmt("GB mean SINR %.4f, limit %.4f, rel err %.3f", gb.mean_sinr, target, rel)};
}

Outcome criterion2() {
  const auto& mf = pick(symmetric_run(), DetectorKind::MatchedFilter, 1024);
  const double rel = std::abs(mf.mean_sinr - 1.0);
  return {mf.status == RecordStatus::Ok && rel <= 0.05,
          fmt("MF mean SINR %.4f, limit 1, rel err %.3f", mf.mean_sinr, rel)};
}

Outcome criterion3() {
  const auto rs = symmetric_run();
  const double eta = pick(rs, DetectorKind::GroupBlind, 1024).mean_sinr /
                     pick(rs, DetectorKind::MatchedFilter, 1024).mean_sinr;
  return {eta >= 1.8 && eta <= 2.2, fmt("eta %.4f", eta)};
}

Outcome criterion4() {
  const auto rs = symmetric_run();
  const double dr = pick(rs, DetectorKind::GroupBlind, 1024).mean_rate -
                    pick(rs, DetectorKind::MatchedFilter, 1024).mean_rate;
  const double target = std::log2(3.0) - 1.0;
  return {std::abs(dr - target) <= 0.1, fmt("delta R %.4f, target %.4f", dr, target)};
}

Outcome criterion5() {
  const double b2 = 0.1;
  std::vector<std::pair<double, double>> rates;
  std::string detail;
  for (double ratio : {0.1, 1.0, 10.0}) {
    ExperimentPlan plan;
    plan.scenario_id = "training_sweep";
    plan.base = two_cell(1.0, b2, 10.0, ratio * b2);
    plan.antenna_counts = {512};
    plan.detectors = {DetectorKind::GroupBlind};
    plan.trials = 200;
    plan.seed = 7;
    plan.threads = worker_threads();
    const auto& r = pick(run_plan(plan), DetectorKind::GroupBlind, 512);
    rates.emplace_back(r.mean_rate, r.rate_ci95);
    detail += fmt("eps/b2=%g: %.3f+-%.3f; ", ratio, r.mean_rate, r.rate_ci95);
  }
  const double ngb_rate = std::log2(1.0 + asymptotic_ngb_sinr(RVector<double>{{1.0, b2}}));
  const bool decreasing = rates[0].first > rates[1].first && rates[1].first > rates[2].first;
  const bool above = rates[2].first - rates[2].second > ngb_rate;
  detail += fmt("NGB noise-free limit rate %.3f", ngb_rate);
  return {decreasing && above, detail};
}

Outcome criterion6() {
  const auto cfg = two_cell(1.0, 1.0, 100.0, 0.0).with_antennas(1024);
  const double tol = 5.0 / std::sqrt(1024.0);
  int pass = 0;
  const int runs = 20;
  double worst = 0;
  for (int t = 0; t < runs; ++t) {
    RandomStream rng = seed_substream(606, 1024, t);
    const auto ch = draw_channel_realization(cfg, rng);
    const auto est = estimate_channels(cfg, ch, rng);
    const auto cov = genie_covariance(cfg, ch, est);
    const auto inner = inner_mmse(est, cfg.power).weights;
    const auto gb = group_blind_detector(est, cov, genie_signal_basis(ch), cfg.power);
    const auto p = detection_projections(ch, est, inner.col(0), gb.weights.col(0), 0);
    const double e = std::max({std::abs(p.signal - 0.5), std::abs(p.contamination - 0.25),
                               std::abs(p.error - 0.25)});
    worst = std::max(worst, e);
    if (e <= tol) ++pass;
  }
  return {pass == runs, fmt("%d/%d realizations within %.4f, worst deviation %.4f", pass, runs,
                            tol, worst)};
}

Outcome criterion7() {
  const Index n = 1 << 14;
  ScenarioConfig<double> cfg;
  cfg.num_cells = 2;
  cfg.num_users = 2;
  cfg.num_antennas = n;
  cfg.power = 10.0;
  cfg.training_eps = 0.1;
  cfg.gains = RMatrix<double>(2, 2);
  cfg.gains << 1.0, 0.8, 0.5, 0.2;
  const auto phi = training_coefficients(cfg);
  const double root_n = std::sqrt(static_cast<double>(n));
  int pass = 0;
  for (int seed = 0; seed < 100; ++seed) {
    RandomStream rng = seed_substream(7007, n, seed);
    const auto ch = draw_channel_realization(cfg, rng);
    const auto est = estimate_channels(cfg, ch, rng);
    bool ok = true;
    for (Index k = 0; k < 2; ++k) {
      const double b1 = cfg.gains(0, k), b2 = cfg.gains(1, k);
      const auto gh = est.estimate.col(k);
      const double same = std::abs(gh.dot(ch.scaled[1].col(k)) / double(n) - phi(k) / b1 * b2);
      ok = ok && same <= 5.0 * std::sqrt(phi(k) * b2) / root_n;
      for (Index j = 0; j < 2; ++j) {
        if (j == k) continue;
        ok = ok && std::abs(gh.dot(ch.scaled[1].col(j))) / double(n) <= 5.0 / root_n;
      }
    }
    if (ok) ++pass;
  }
  return {pass >= 95, fmt("%d/100 seeds within bounds", pass)};
}

Outcome criterion8() {
  double worst = 0;
  Index max_outer = 0;
  for (Index n : {3, 4, 8, 64, 256}) {
    ScenarioConfig<double> cfg;
    cfg.num_cells = 1;
    cfg.num_users = 3;
    cfg.num_antennas = n;
    cfg.power = 10.0;
    cfg.training_eps = 0.0;
    cfg.gains = RMatrix<double>(1, 3);
    cfg.gains << 1.0, 0.5, 2.0;
    for (int t = 0; t < 10; ++t) {
      RandomStream rng = seed_substream(808, static_cast<std::uint64_t>(n), t);
      const auto ch = draw_channel_realization(cfg, rng);
      const auto est = estimate_channels(cfg, ch, rng);
      const auto inner = inner_mmse(est, cfg.power).weights;
      const auto gb = group_blind_detector(est, genie_covariance(cfg, ch, est),
                                           genie_signal_basis(ch), cfg.power);
      worst = std::max(worst, (gb.weights - inner).norm() / inner.norm());
      max_outer = std::max(max_outer, gb.complement.cols());
    }
  }
  return {worst <= 1e-10 && max_outer == 0,
          fmt("max relative deviation %.3g, complement dimension %ld", worst, long(max_outer))};
}

Outcome criterion9() {
  std::string detail;
  bool ok = true;
  std::pair<double, double> drop{0, 0};  // GB, NGB rate at K=1 minus K=10, n=256
  for (Index K : {1, 10}) {
    ExperimentPlan plan;
    plan.scenario_id = "four_cell";
    plan.base.num_cells = 4;
    plan.base.num_users = K;
    plan.base.power = 10.0;
    plan.base.training_eps = 0.0;
    plan.base.gains = RMatrix<double>::Constant(4, K, 0.1);
    plan.base.gains.row(0).setOnes();
    plan.antenna_counts = K == 1 ? std::vector<Index>{4, 8, 16, 32, 64, 128, 256}
                                 : std::vector<Index>{40, 64, 128, 256};
    plan.detectors = {DetectorKind::NgbMmse, DetectorKind::GroupBlind};
    plan.trials = 200;
    plan.seed = 909;
    plan.threads = worker_threads();
    const auto rs = run_plan(plan);
    int separated = 0;
    for (Index n : plan.antenna_counts) {
      const auto gb = cell_rate(rs, DetectorKind::GroupBlind, n, K);
      const auto ngb = cell_rate(rs, DetectorKind::NgbMmse, n, K);
      if (gb.first - gb.second > ngb.first + ngb.second) ++separated;
    }
    ok = ok && separated == static_cast<int>(plan.antenna_counts.size());
    const auto gb256 = cell_rate(rs, DetectorKind::GroupBlind, 256, K);
    const auto ngb256 = cell_rate(rs, DetectorKind::NgbMmse, 256, K);
    const double sign = K == 1 ? 1.0 : -1.0;
    drop.first += sign * gb256.first;
    drop.second += sign * ngb256.first;
    detail += fmt("K=%ld: %d/%zu points separated, n=256 GB %.3f NGB %.3f; ", long(K), separated,
                  plan.antenna_counts.size(), gb256.first, ngb256.first);
  }
  detail += fmt("drop GB %.3f NGB %.3f", drop.first, drop.second);
  return {ok && drop.first < drop.second, detail};
}

Outcome criterion10() {
  ScenarioConfig<double> cfg;
  cfg.num_cells = 3;
  cfg.num_users = 2;
  cfg.num_antennas = 8;
  cfg.power = 5.0;
  cfg.training_eps = 0.3;
  cfg.gains = RMatrix<double>(3, 2);
  cfg.gains << 1.0, 0.7, 0.5, 0.3, 0.2, 0.9;
  RandomStream rng(1010);
  const auto ch = draw_channel_realization(cfg, rng);
  const auto est = estimate_channels(cfg, ch, rng);
  const auto model = conditional_covariance(cfg, est);

  const int draws = 100000;
  oracle::ConditionalSampler cov_sampler{cfg, est.estimate, std::mt19937_64(11)};
  const auto mc = cov_sampler.covariance(draws);
  const double cov_err = (model.matrix - mc).norm() / mc.norm();

  const auto w = inner_mmse(est, cfg.power).weights;
  oracle::ConditionalSampler sampler{cfg, est.estimate, std::mt19937_64(12)};
  std::vector<double> contam(2, 0.0), error(2, 0.0), other(2, 0.0);
  for (int t = 0; t < draws; ++t) {
    const auto d = sampler.draw();
    for (Index k = 0; k < 2; ++k) {
      const auto wk = w.col(k);
      error[k] += std::norm(d.error.col(k).dot(wk));
      for (Index l = 0; l < 3; ++l)
        for (Index j = 0; j < 2; ++j) {
          const double p = std::norm(d.channels[l].col(j).dot(wk));
          if (j != k) other[k] += p;
          else if (l > 0) contam[k] += p;
        }
    }
  }
  double term_err = 0;
  for (Index k = 0; k < 2; ++k) {
    const auto b = conditional_sinr(cfg, est, w.col(k), k);
    const double P = cfg.power / draws;
    term_err = std::max({term_err, std::abs(b.contamination - P * contam[k]) / (P * contam[k]),
                         std::abs(b.estimation_error - P * error[k]) / (P * error[k]),
                         std::abs(b.other_interference - P * other[k]) / (P * other[k])});
  }
  return {cov_err <= 0.02 && term_err <= 0.02,
          fmt("covariance rel Frobenius %.4f, worst SINR term rel err %.4f", cov_err, term_err)};
}

Outcome criterion11() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gbsim_acceptance";
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "determinism.json").string();
  std::ofstream(cfg_path) << R"({
    "scenario": {"id": "determinism", "L": 3, "K": 2, "P_dB": 10, "eps": 0.05,
                 "beta_dB": [[0, 0], [-6, -3], [-10, -8]]},
    "sweep": {"n_list": [4, 8, 32, 64], "trials": 40},
    "detectors": ["mf", "ngb_mmse", "gb"],
    "cov_mode": "genie",
    "seed": 1111
  })";
  auto run_to = [&](const std::string& name, const char* threads) {
    const std::string out = (dir / name).string();
    const char* argv[] = {"gbsim", "run", "--config", cfg_path.c_str(), "--out", out.c_str(),
                          "--threads", threads};
    std::ostringstream o, e;
    const int code = cli::run(8, argv, o, e);
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return std::pair{code, ss.str()};
  };
  const auto a = run_to("a.csv", "1");
  const auto b = run_to("b.csv", "1");
  const auto c = run_to("c.csv", "4");
  const bool identical = a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second;

  // compare the mean_rate column
  auto column = [](const std::string& csv) {
    std::vector<std::string> col;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string f;
      for (int i = 0; i <= 11; ++i) std::getline(ls, f, ',');
      col.push_back(f);
    }
    return col;
  };
  const auto ca = column(a.second), cc = column(c.second);
  double worst = 0;
  bool shape = c.first == 0 && ca.size() == cc.size();
  for (std::size_t i = 0; shape && i < ca.size(); ++i) {
    if (ca[i] == cc[i]) continue;
    if (ca[i] == "infeasible" || cc[i] == "infeasible") {
      shape = false;
      break;
    }
    const double x = std::stod(ca[i]), y = std::stod(cc[i]);
    worst = std::max(worst, std::abs(x - y) / std::abs(x));
  }
  return {identical && shape && worst <= 1e-9,
          fmt("single-threaded reruns %s, multi-threaded mean_rate max rel diff %.3g",
              identical ? "byte-identical" : "differ", worst)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,  criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu: %s  %s  (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
