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

#ifndef GBSIM_ASYMPTOTICS_HPP
#define GBSIM_ASYMPTOTICS_HPP

// Large-antenna limits. Closed forms are for two cells (one dominant
// interferer); only the traditional-detector limit is general in L.

#include "gbsim/estimation.hpp"

#include <array>
#include <cmath>
#include <span>

namespace gbsim {

namespace detail {

template <typename Real>
void require_gains(Real gain_ref, Real gain_int, Real eps) {
  if (!(gain_ref > Real(0)) || !(gain_int > Real(0))) throw DomainError("gains must be > 0");
  if (!(eps >= Real(0))) throw DomainError("eps must be >= 0");
}

}  // namespace detail

/// Limit of n^-1 ghat_{1k}^H g_{lj}: quality * gain_lj / gain_1k on a shared
/// pilot, zero otherwise.
template <typename Real>
Real contamination_limit(Real quality, Real gain_ref, Real gain_other, bool same_pilot) {
  if (!(gain_ref > Real(0)) || !(gain_other > Real(0))) throw DomainError("gains must be > 0");
  return same_pilot ? quality * gain_other / gain_ref : Real(0);
}

/// Coefficients of the detector output n^-1 w^H y' on the desired symbol,
/// the same-pilot interferer and the estimation-error symbol, and the
/// normalizer lambda.
template <typename Real>
struct PostDetectionCoefficients {
  Real signal;
  Real contamination;
  Real error;
  Real lambda;

  Real sinr() const { return signal * signal / (contamination * contamination + error * error); }
};

template <typename Real>
PostDetectionCoefficients<Real> lemma1_coefficients(Real gain_ref, Real gain_int, Real eps) {
  detail::require_gains(gain_ref, gain_int, eps);
  const std::array<Real, 2> pilot{gain_ref, gain_int};
  const Real quality = training_coefficient<Real>(pilot, eps);
  const Real q = quality * gain_int / gain_ref;
  const Real residual = gain_ref - quality;
  const Real lambda = residual * residual + q * q;
  return {quality, q - q * q * q / lambda, q * q * residual / lambda, lambda};
}

/// Group-blind limit, [1 + 1/(1 + eps/gain_int)^2] (gain_ref/gain_int)^2.
template <typename Real>
Real asymptotic_gb_sinr(Real gain_ref, Real gain_int, Real eps) {
  detail::require_gains(gain_ref, gain_int, eps);
  const Real rho = gain_ref / gain_int;
  const Real t = Real(1) + eps / gain_int;
  return (Real(1) + Real(1) / (t * t)) * rho * rho;
}

/// Traditional-detector limit gain_1k^2 / sum_{l>1} gain_lk^2. `pilot_gains`
/// holds gain_lk for l = 1..L, reference cell first.
template <typename Real>
Real asymptotic_ngb_sinr(std::span<const Real> pilot_gains) {
  if (pilot_gains.empty() || !(pilot_gains[0] > Real(0))) {
    throw DomainError("reference gain must be > 0");
  }
  Real denom = 0;
  for (std::size_t l = 1; l < pilot_gains.size(); ++l) {
    if (pilot_gains[l] < Real(0)) throw DomainError("gains must be >= 0");
    denom += pilot_gains[l] * pilot_gains[l];
  }
  if (denom == Real(0)) throw NoInterferenceError("no same-pilot interferer: limit is unbounded");
  return pilot_gains[0] * pilot_gains[0] / denom;
}

template <typename Real>
Real asymptotic_ngb_sinr(const RVector<Real>& pilot_gains) {
  return asymptotic_ngb_sinr(std::span<const Real>(pilot_gains.data(), pilot_gains.size()));
}

/// Ratio of the group-blind to the traditional limit, 1 + 1/(1 + eps/gain_int)^2.
template <typename Real>
Real sinr_gain(Real gain_int, Real eps) {
  if (!(gain_int > Real(0))) throw DomainError("gain must be > 0");
  if (!(eps >= Real(0))) throw DomainError("eps must be >= 0");
  const Real t = Real(1) + eps / gain_int;
  return Real(1) + Real(1) / (t * t);
}

/// log2(1 + gb) - log2(1 + ngb), b/s/Hz.
template <typename Real>
Real delta_rate(Real gb_sinr, Real ngb_sinr) {
  if (!(gb_sinr >= Real(0)) || !(ngb_sinr >= Real(0))) throw DomainError("sinr must be >= 0");
  return std::log2(Real(1) + gb_sinr) - std::log2(Real(1) + ngb_sinr);
}

template <typename Real>
struct AsymptoticReport {
  Real gamma_bar;
  Real gamma_bar_prime;
  Real eta_bar;
  Real delta_rate;
  PostDetectionCoefficients<Real> coefficients;
  Real rho;
};

template <typename Real>
AsymptoticReport<Real> asymptotic_report(Real gain_ref, Real gain_int, Real eps) {
  detail::require_gains(gain_ref, gain_int, eps);
  AsymptoticReport<Real> r;
  r.gamma_bar = asymptotic_gb_sinr(gain_ref, gain_int, eps);
  const std::array<Real, 2> pilot{gain_ref, gain_int};
  r.gamma_bar_prime = asymptotic_ngb_sinr<Real>(pilot);
  r.eta_bar = sinr_gain(gain_int, eps);
  r.delta_rate = delta_rate(r.gamma_bar, r.gamma_bar_prime);
  r.coefficients = lemma1_coefficients(gain_ref, gain_int, eps);
  r.rho = gain_ref / gain_int;
  return r;
}

}  // namespace gbsim

#endif  // GBSIM_ASYMPTOTICS_HPP
