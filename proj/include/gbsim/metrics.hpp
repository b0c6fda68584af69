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

#ifndef GBSIM_METRICS_HPP
#define GBSIM_METRICS_HPP

#include "gbsim/estimation.hpp"

#include <cmath>
#include <numeric>
#include <span>

namespace gbsim {

/// Post-detection power split of one user. Every term is scaled by the
/// transmit power, so `noise` is ||w||^2 and sinr() = signal / (rest).
template <typename Real>
struct SinrBreakdown {
  Real signal = 0;
  /// Same-pilot out-of-cell users.
  Real contamination = 0;
  /// The user's own estimation error.
  Real estimation_error = 0;
  /// Other in-cell users and out-of-cell users on other pilots.
  Real other_interference = 0;
  Real noise = 0;

  Real interference_plus_noise() const {
    return contamination + estimation_error + other_interference + noise;
  }
  Real sinr() const { return signal / interference_plus_noise(); }
};

namespace detail {

template <typename Real, typename Derived>
void require_nonzero(const Eigen::MatrixBase<Derived>& w) {
  if (w.size() == 0 || w.squaredNorm() == Real(0)) throw ZeroVectorError("receive vector is zero");
}

}  // namespace detail

/// SINR of receive vector `w` for in-cell user k, with the expectation over
/// the unknown channels taken in closed form given the in-cell estimates.
/// Exact for receivers that depend on the estimates only.
template <typename Real, typename Derived>
SinrBreakdown<Real> conditional_sinr(const ScenarioConfig<Real>& cfg,
                                     const PilotEstimate<Real>& est,
                                     const Eigen::MatrixBase<Derived>& w, Index k) {
  detail::require_nonzero<Real>(w);
  const Real P = cfg.power;
  const Real wnorm2 = w.squaredNorm();
  const RVector<Real> proj = (est.estimate.adjoint() * w).cwiseAbs2();

  SinrBreakdown<Real> out;
  out.signal = P * proj(k);
  out.noise = wnorm2;
  out.estimation_error = P * est.error_variance(k) * wnorm2;
  for (Index j = 0; j < cfg.num_users; ++j) {
    const Real pilot_power = cfg.training_eps + cfg.gains.col(j).sum();
    Real same_pilot = 0;
    for (Index l = 1; l < cfg.num_cells; ++l) {
      const Real b = cfg.gains(l, j);
      const Real r = b / cfg.gains(0, j);
      same_pilot += r * r * proj(j) + (b - b * b / pilot_power) * wnorm2;
    }
    if (j == k) {
      out.contamination = P * same_pilot;
    } else {
      out.other_interference += P * (proj(j) + est.error_variance(j) * wnorm2 + same_pilot);
    }
  }
  return out;
}

/// SINR of `w` for in-cell user k on the realized channels: the expectation
/// runs over symbols and noise only.
template <typename Real, typename Derived>
SinrBreakdown<Real> realized_sinr(const ScenarioConfig<Real>& cfg,
                                  const ChannelRealization<Real>& ch,
                                  const PilotEstimate<Real>& est,
                                  const Eigen::MatrixBase<Derived>& w, Index k) {
  detail::require_nonzero<Real>(w);
  const Real P = cfg.power;
  SinrBreakdown<Real> out;
  out.signal = P * std::norm(est.estimate.col(k).dot(w));
  out.estimation_error = P * std::norm(est.error.col(k).dot(w));
  out.noise = w.squaredNorm();
  for (Index l = 0; l < cfg.num_cells; ++l) {
    const RVector<Real> proj = (ch.scaled[l].adjoint() * w).cwiseAbs2();
    for (Index j = 0; j < cfg.num_users; ++j) {
      if (j == k) {
        if (l > 0) out.contamination += P * proj(j);
      } else {
        out.other_interference += P * proj(j);
      }
    }
  }
  return out;
}

/// Frame-averaged power of each additive term of the received signal after
/// projection on `w`, attributing the in-cell channel of user k to its
/// estimate and its error (the error carries the frame's independent symbol).
template <typename Real, typename Derived>
SinrBreakdown<Real> empirical_sinr(const ScenarioConfig<Real>& cfg,
                                   const ChannelRealization<Real>& ch,
                                   const PilotEstimate<Real>& est,
                                   std::span<const SymbolFrame<Real>> frames,
                                   const Eigen::MatrixBase<Derived>& w, Index k) {
  if (frames.empty()) throw EmptyStreamError("empirical_sinr: no frames");
  detail::require_nonzero<Real>(w);

  const std::complex<Real> sig = est.estimate.col(k).dot(w);
  const std::complex<Real> err = est.error.col(k).dot(w);
  std::vector<CVector<Real>> proj;
  proj.reserve(cfg.num_cells);
  for (Index l = 0; l < cfg.num_cells; ++l) proj.push_back(ch.scaled[l].adjoint() * w);

  SinrBreakdown<Real> acc;
  for (const auto& f : frames) {
    acc.signal += std::norm(sig * f.symbols(0, k));
    acc.estimation_error += std::norm(err * f.error_symbols(k));
    acc.noise += std::norm(f.noise.dot(w));
    for (Index l = 0; l < cfg.num_cells; ++l) {
      for (Index j = 0; j < cfg.num_users; ++j) {
        const Real p = std::norm(proj[l](j) * f.symbols(l, j));
        if (j == k) {
          if (l > 0) acc.contamination += p;
        } else {
          acc.other_interference += p;
        }
      }
    }
  }
  const Real T = static_cast<Real>(frames.size());
  acc.signal /= T;
  acc.estimation_error /= T;
  acc.contamination /= T;
  acc.other_interference /= T;
  acc.noise /= T;
  return acc;
}

template <typename Real>
struct RateEstimate {
  /// Mean of log2(1 + sinr), b/s/Hz.
  Real mean = 0;
  /// 95% normal-approximation half width.
  Real ci95 = 0;
  Index samples = 0;
};

template <typename Real>
RateEstimate<Real> achievable_rate(std::span<const Real> sinrs) {
  RateEstimate<Real> out;
  out.samples = static_cast<Index>(sinrs.size());
  if (sinrs.empty()) return out;
  Real sum = 0;
  for (Real g : sinrs) sum += std::log2(Real(1) + g);
  out.mean = sum / static_cast<Real>(sinrs.size());
  if (sinrs.size() > 1) {
    Real ss = 0;
    for (Real g : sinrs) {
      const Real d = std::log2(Real(1) + g) - out.mean;
      ss += d * d;
    }
    const Real sd = std::sqrt(ss / static_cast<Real>(sinrs.size() - 1));
    out.ci95 = Real(1.959963984540054) * sd / std::sqrt(static_cast<Real>(sinrs.size()));
  }
  return out;
}

/// Normalized projections n^-1 v^H (estimate_k, g_{cell,k}, error_k), where v
/// is `w` rescaled so that its component inside range(estimate) matches the
/// estimate itself along estimate_k. For a single user this makes the inner
/// part of v equal to estimate_k, the normalization of the post-detection
/// coefficients of the two-cell analysis.
template <typename Real>
struct DetectionProjections {
  std::complex<Real> signal;
  std::complex<Real> contamination;
  std::complex<Real> error;
};

template <typename Real, typename D1, typename D2>
DetectionProjections<Real> detection_projections(const ChannelRealization<Real>& ch,
                                                 const PilotEstimate<Real>& est,
                                                 const Eigen::MatrixBase<D1>& inner,
                                                 const Eigen::MatrixBase<D2>& w, Index k,
                                                 Index interfering_cell = 1) {
  const auto gk = est.estimate.col(k);
  const std::complex<Real> scale = gk.dot(inner) / gk.squaredNorm();
  const CVector<Real> v = w / scale;
  const Real n = static_cast<Real>(est.num_antennas());
  return {v.dot(gk) / n, v.dot(ch.scaled[interfering_cell].col(k)) / n,
          v.dot(est.error.col(k)) / n};
}

}  // namespace gbsim

#endif  // GBSIM_METRICS_HPP
