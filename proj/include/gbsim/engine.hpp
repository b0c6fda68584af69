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

#ifndef GBSIM_ENGINE_HPP
#define GBSIM_ENGINE_HPP

#include "gbsim/detect.hpp"
#include "gbsim/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gbsim {

/// How the per-trial SINR is evaluated.
///  - Realized: expectation over symbols and noise on the drawn channels.
///  - Conditional: closed-form expectation given the in-cell estimates.
enum class SinrEvaluation { Realized, Conditional };

struct ExperimentPlan {
  std::string scenario_id = "scenario";
  /// `num_antennas` is ignored; the sweep supplies it.
  ScenarioConfig<double> base;
  std::vector<Index> antenna_counts;
  std::vector<DetectorKind> detectors{DetectorKind::MatchedFilter, DetectorKind::GroupBlind};
  CovarianceMode covariance_mode = CovarianceMode::Genie;
  /// Defaults to Genie under the genie covariance and Eigen otherwise.
  std::optional<BasisMode> basis_mode;
  SinrEvaluation sinr_evaluation = SinrEvaluation::Realized;
  Index trials = 200;
  /// Symbol periods per trial used by the SAMPLE covariance.
  Index frames = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  BasisMode effective_basis_mode() const;
  /// Throws PlanError, DomainError or DimensionError.
  void validate() const;
};

enum class RecordStatus { Ok, Infeasible, Failed };

struct MetricsRecord {
  std::string scenario;
  Index cells = 0;
  Index users = 0;
  Index antennas = 0;
  Index user = 0;
  double snr_db = 0;
  double eps = 0;
  DetectorKind detector = DetectorKind::MatchedFilter;
  CovarianceMode covariance_mode = CovarianceMode::Genie;
  RecordStatus status = RecordStatus::Ok;
  /// Trials that entered the means.
  Index trials = 0;
  double mean_sinr = 0;
  double mean_rate = 0;
  double rate_ci95 = 0;
  /// Present for two-cell scenarios only.
  std::optional<double> asym_sinr;
  std::optional<double> asym_rate;
  /// Trials excluded for rank failure plus trials with a reduced-rank complement.
  Index degenerate_trials = 0;
  std::string message;
};

/// Runs every (antenna count, trial) pair, drawing all randomness from
/// seed_substream(seed, n, trial), and reduces per-trial values in trial
/// order. Output is ordered by detector (plan order), antenna count, user.
std::vector<MetricsRecord> run_plan(const ExperimentPlan& plan);

/// Asymptotic SINR prediction for a detector kind, or nullopt when the
/// scenario has no closed form (L != 2).
std::optional<double> asymptotic_sinr(const ScenarioConfig<double>& cfg, DetectorKind kind,
                                      Index user);

}  // namespace gbsim

#endif  // GBSIM_ENGINE_HPP
