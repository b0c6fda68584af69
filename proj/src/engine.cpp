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

#include "gbsim/engine.hpp"

#include "gbsim/asymptotics.hpp"
#include "gbsim/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace gbsim {

BasisMode ExperimentPlan::effective_basis_mode() const {
  if (basis_mode) return *basis_mode;
  return covariance_mode == CovarianceMode::Genie ? BasisMode::Genie : BasisMode::Eigen;
}

void ExperimentPlan::validate() const {
  ScenarioConfig<double> cfg = base;
  cfg.num_antennas = 1;
  cfg.validate();
  if (antenna_counts.empty()) throw PlanError("n_list must not be empty");
  for (std::size_t i = 0; i < antenna_counts.size(); ++i) {
    if (antenna_counts[i] < 1) throw PlanError("n_list entries must be >= 1");
    if (i > 0 && antenna_counts[i] <= antenna_counts[i - 1]) {
      throw PlanError("n_list must be strictly ascending");
    }
  }
  if (detectors.empty()) throw PlanError("detector set must not be empty");
  if (trials < 1) throw PlanError("trials must be >= 1");
  if (frames < 0) throw PlanError("frames must be >= 0");
  const bool needs_frames =
      covariance_mode == CovarianceMode::Sample &&
      std::find(detectors.begin(), detectors.end(), DetectorKind::GroupBlind) != detectors.end();
  if (needs_frames && frames < 1) throw PlanError("sample covariance needs frames >= 1");
  if (threads < 1) throw PlanError("threads must be >= 1");
}

std::optional<double> asymptotic_sinr(const ScenarioConfig<double>& cfg, DetectorKind kind,
                                      Index user) {
  if (cfg.num_cells != 2) return std::nullopt;
  const double ref = cfg.gains(0, user);
  const double other = cfg.gains(1, user);
  if (kind == DetectorKind::GroupBlind) return asymptotic_gb_sinr(ref, other, cfg.training_eps);
  const RVector<double> col = cfg.gains.col(user);
  return asymptotic_ngb_sinr(col);
}

namespace {

// Per-trial outcome of one detector: SINR per user, or a failure.
struct DetectorTrial {
  std::vector<double> sinr;
  bool failed = false;
  bool degenerate = false;
};

struct TrialResult {
  std::vector<DetectorTrial> per_detector;
};

bool feasible(const ExperimentPlan& plan, DetectorKind kind, Index n, std::string* why) {
  if (kind != DetectorKind::GroupBlind) return true;
  const Index kl = plan.base.num_users * plan.base.num_cells;
  if (n < kl) {
    if (why) *why = "n < KL = " + std::to_string(kl);
    return false;
  }
  if (plan.covariance_mode == CovarianceMode::Sample && plan.frames < n) {
    if (why) *why = "sample covariance needs frames >= n";
    return false;
  }
  return true;
}

double evaluate(const ExperimentPlan& plan, const ScenarioConfig<double>& cfg,
                const ChannelRealization<double>& ch, const PilotEstimate<double>& est,
                const CMatrix<double>& weights, Index k) {
  const auto w = weights.col(k);
  if (plan.sinr_evaluation == SinrEvaluation::Conditional) {
    return conditional_sinr(cfg, est, w, k).sinr();
  }
  return realized_sinr(cfg, ch, est, w, k).sinr();
}

TrialResult run_trial(const ExperimentPlan& plan, Index n, Index trial) {
  const ScenarioConfig<double> cfg = plan.base.with_antennas(n);
  RandomStream rng = seed_substream(plan.seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial));
  const ChannelRealization<double> ch = draw_channel_realization(cfg, rng);
  const PilotEstimate<double> est = estimate_channels(cfg, ch, rng);

  TrialResult out;
  out.per_detector.resize(plan.detectors.size());

  // Covariance and bases are shared by every group-blind evaluation of the trial.
  std::optional<CovarianceModel<double>> cov;
  std::optional<CMatrix<double>> signal;
  std::vector<SymbolFrame<double>> frames;

  for (std::size_t d = 0; d < plan.detectors.size(); ++d) {
    const DetectorKind kind = plan.detectors[d];
    DetectorTrial& slot = out.per_detector[d];
    if (!feasible(plan, kind, n, nullptr)) continue;
    try {
      DetectorBank<double> bank;
      switch (kind) {
        case DetectorKind::MatchedFilter:
          bank = matched_filter(est);
          break;
        case DetectorKind::NgbMmse:
          bank = inner_mmse(est, cfg.power);
          break;
        case DetectorKind::GroupBlind: {
          if (!cov) {
            if (plan.covariance_mode == CovarianceMode::Sample) {
              frames.reserve(static_cast<std::size_t>(plan.frames));
              for (Index t = 0; t < plan.frames; ++t) {
                frames.push_back(synthesize_symbol_period(cfg, ch, rng));
              }
            }
            CovarianceInputs<double> in{&ch, &est, frames};
            cov = covariance(plan.covariance_mode, cfg, in);
            signal = signal_basis(plan.effective_basis_mode(), cfg, &ch, &*cov);
          }
          bank = group_blind_detector(est, *cov, *signal, cfg.power);
          break;
        }
      }
      slot.degenerate = bank.degenerate;
      slot.sinr.resize(static_cast<std::size_t>(cfg.num_users));
      for (Index k = 0; k < cfg.num_users; ++k) {
        slot.sinr[static_cast<std::size_t>(k)] = evaluate(plan, cfg, ch, est, bank.weights, k);
      }
    } catch (const RankError&) {
      slot.failed = true;
      slot.sinr.clear();
    }
  }
  return out;
}

}  // namespace

std::vector<MetricsRecord> run_plan(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t points = plan.antenna_counts.size();
  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  const std::size_t units = points * trials;

  std::vector<TrialResult> results(units);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> errored{false};

  auto worker = [&]() {
    for (;;) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units || errored.load()) return;
      const std::size_t p = u / trials;
      const std::size_t t = u % trials;
      try {
        results[u] = run_trial(plan, plan.antenna_counts[p], static_cast<Index>(t));
      } catch (...) {
        if (!errored.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };

  const unsigned workers = std::max(1U, std::min<unsigned>(plan.threads, static_cast<unsigned>(units)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  const Index K = plan.base.num_users;
  std::vector<MetricsRecord> records;
  records.reserve(plan.detectors.size() * points * static_cast<std::size_t>(K));
  for (std::size_t d = 0; d < plan.detectors.size(); ++d) {
    const DetectorKind kind = plan.detectors[d];
    for (std::size_t p = 0; p < points; ++p) {
      const Index n = plan.antenna_counts[p];
      std::string why;
      const bool ok = feasible(plan, kind, n, &why);
      for (Index k = 0; k < K; ++k) {
        MetricsRecord r;
        r.scenario = plan.scenario_id;
        r.cells = plan.base.num_cells;
        r.users = K;
        r.antennas = n;
        r.user = k;
        r.snr_db = 10.0 * std::log10(plan.base.power);
        r.eps = plan.base.training_eps;
        r.detector = kind;
        r.covariance_mode = plan.covariance_mode;
        r.asym_sinr = asymptotic_sinr(plan.base, kind, k);
        if (r.asym_sinr) r.asym_rate = std::log2(1.0 + *r.asym_sinr);
        if (!ok) {
          r.status = RecordStatus::Infeasible;
          r.message = why;
          records.push_back(std::move(r));
          continue;
        }
        std::vector<double> sinrs;
        sinrs.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
          const DetectorTrial& dt = results[p * trials + t].per_detector[d];
          if (dt.failed) {
            ++r.degenerate_trials;
            continue;
          }
          if (dt.degenerate) ++r.degenerate_trials;
          sinrs.push_back(dt.sinr[static_cast<std::size_t>(k)]);
        }
        r.trials = static_cast<Index>(sinrs.size());
        if (sinrs.empty()) {
          r.status = RecordStatus::Failed;
          r.message = "every trial failed";
        } else {
          double sum = 0;
          for (double g : sinrs) sum += g;
          r.mean_sinr = sum / static_cast<double>(sinrs.size());
          const RateEstimate<double> rate = achievable_rate<double>(sinrs);
          r.mean_rate = rate.mean;
          r.rate_ci95 = rate.ci95;
        }
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

}  // namespace gbsim
