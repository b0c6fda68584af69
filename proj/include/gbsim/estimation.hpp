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

#ifndef GBSIM_ESTIMATION_HPP
#define GBSIM_ESTIMATION_HPP

#include "gbsim/channel.hpp"

#include <span>

namespace gbsim {

/// Contaminated MMSE estimates of the in-cell channels.
template <typename Real>
struct PilotEstimate {
  /// n x K, column k estimates in-cell channel k.
  CMatrix<Real> estimate;
  /// n x K, true in-cell channels minus `estimate`.
  CMatrix<Real> error;
  /// Per-antenna variance of each estimate column.
  RVector<Real> quality;
  /// Per-antenna variance of each error column, gain(0,k) - quality(k).
  RVector<Real> error_variance;

  Index num_users() const { return estimate.cols(); }
  Index num_antennas() const { return estimate.rows(); }
};

/// Training coefficient of pilot k: gain_ref^2 / (eps + sum over cells of the
/// gains on that pilot). `pilot_gains[0]` is the reference-cell gain.
template <typename Real>
Real training_coefficient(std::span<const Real> pilot_gains, Real eps) {
  if (pilot_gains.empty()) throw DimensionError("training_coefficient: no gains");
  if (!(eps >= Real(0))) throw DomainError("training_coefficient: eps must be >= 0");
  Real sum = eps;
  for (Real b : pilot_gains) {
    if (!(b > Real(0))) throw DomainError("training_coefficient: gains must be > 0");
    sum += b;
  }
  return pilot_gains[0] * (pilot_gains[0] / sum);
}

template <typename Real>
Real training_coefficient(const RVector<Real>& pilot_gains, Real eps) {
  return training_coefficient(std::span<const Real>(pilot_gains.data(), pilot_gains.size()), eps);
}

/// Per-pilot training coefficients for every in-cell user of `cfg`.
template <typename Real>
RVector<Real> training_coefficients(const ScenarioConfig<Real>& cfg) {
  RVector<Real> q(cfg.num_users);
  for (Index k = 0; k < cfg.num_users; ++k) {
    const RVector<Real> col = cfg.gains.col(k);
    q(k) = training_coefficient(col, cfg.training_eps);
  }
  return q;
}

/// Forms the reference-cell estimates from the post-correlation pilot
/// statistic: for each pilot k, the sum over cells of the channels that
/// reused it plus sqrt(eps) times fresh CN(0, I) training noise, scaled by
/// gain(0,k) / (eps + pilot gain sum).
template <typename Real>
PilotEstimate<Real> estimate_channels(const ScenarioConfig<Real>& cfg,
                                      const ChannelRealization<Real>& ch, RandomStream& rng) {
  const Index n = ch.num_antennas();
  const Index K = cfg.num_users;
  PilotEstimate<Real> est;
  est.quality = training_coefficients(cfg);
  est.error_variance = cfg.gains.row(0).transpose() - est.quality;
  est.estimate.resize(n, K);

  const Real root_eps = std::sqrt(cfg.training_eps);
  for (Index k = 0; k < K; ++k) {
    CVector<Real> observed = rng.complex_normal_matrix<Real>(n, 1);
    observed *= root_eps;
    Real pilot_power = cfg.training_eps;
    for (Index l = 0; l < cfg.num_cells; ++l) {
      observed += ch.scaled[l].col(k);
      pilot_power += cfg.gains(l, k);
    }
    // quality/gain, written so that a single noise-free cell scales by exactly 1
    est.estimate.col(k) = observed * (cfg.gains(0, k) / pilot_power);
  }
  est.error = ch.scaled[0] - est.estimate;
  return est;
}

/// Effective received signal of one frame: the estimated in-cell channels
/// carry the in-cell symbols, the estimation error carries the independent
/// copy `error_symbols`, plus out-of-cell terms and noise.
template <typename Real>
CVector<Real> effective_signal(const ChannelRealization<Real>& ch, const PilotEstimate<Real>& est,
                               const SymbolFrame<Real>& frame) {
  CVector<Real> y = frame.noise;
  y.noalias() += est.estimate * frame.symbols.row(0).transpose();
  y.noalias() += est.error * frame.error_symbols;
  for (Index l = 1; l < ch.num_cells(); ++l) {
    y.noalias() += ch.scaled[l] * frame.symbols.row(l).transpose();
  }
  return y;
}

}  // namespace gbsim

#endif  // GBSIM_ESTIMATION_HPP
