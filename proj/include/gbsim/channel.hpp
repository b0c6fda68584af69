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

#ifndef GBSIM_CHANNEL_HPP
#define GBSIM_CHANNEL_HPP

#include "gbsim/random.hpp"
#include "gbsim/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace gbsim {

/// Uplink scenario seen from the reference base station (cell index 0).
///
/// Noise variance is normalized to one, so `power` is the per-user receive
/// SNR of a user with unit gain. `gains(l, k)` is the large-scale power gain
/// from user k of cell l toward the reference base station.
template <typename Real>
struct ScenarioConfig {
  Index num_cells = 1;
  Index num_users = 1;
  Index num_antennas = 1;
  Real power = Real(1);
  /// Inverse effective training SNR.
  Real training_eps = Real(0);
  RMatrix<Real> gains = RMatrix<Real>::Ones(1, 1);

  /// Throws DomainError or DimensionError on the first violated invariant.
  void validate() const {
    if (num_cells < 1) throw DomainError("num_cells must be >= 1");
    if (num_users < 1) throw DomainError("num_users must be >= 1");
    if (num_antennas < 1) throw DomainError("num_antennas must be >= 1");
    if (!(power > Real(0)) || !std::isfinite(power)) throw DomainError("power must be finite and > 0");
    if (!(training_eps >= Real(0)) || !std::isfinite(training_eps)) {
      throw DomainError("training_eps must be finite and >= 0");
    }
    if (gains.rows() != num_cells || gains.cols() != num_users) {
      throw DimensionError("gain matrix must be num_cells x num_users");
    }
    for (Index l = 0; l < num_cells; ++l) {
      for (Index k = 0; k < num_users; ++k) {
        if (!(gains(l, k) > Real(0)) || !std::isfinite(gains(l, k))) {
          throw DomainError("gain(" + std::to_string(l) + "," + std::to_string(k) +
                            ") must be finite and > 0");
        }
      }
    }
  }

  /// Same scenario at a different antenna count.
  ScenarioConfig with_antennas(Index n) const {
    ScenarioConfig c = *this;
    c.num_antennas = n;
    return c;
  }
};

/// One draw of all small-scale channels toward the reference base station.
/// `small_scale[l]` and `scaled[l]` are n x K; column k of `scaled[l]` is
/// sqrt(gain(l,k)) times column k of `small_scale[l]`.
template <typename Real>
struct ChannelRealization {
  std::vector<CMatrix<Real>> small_scale;
  std::vector<CMatrix<Real>> scaled;

  Index num_cells() const { return static_cast<Index>(scaled.size()); }
  Index num_antennas() const { return scaled.empty() ? 0 : scaled.front().rows(); }
  Index num_users() const { return scaled.empty() ? 0 : scaled.front().cols(); }

  /// [G_1 ... G_L], n x KL, cell-major.
  CMatrix<Real> stacked() const {
    const Index n = num_antennas();
    const Index k = num_users();
    CMatrix<Real> out(n, k * num_cells());
    for (Index l = 0; l < num_cells(); ++l) out.middleCols(l * k, k) = scaled[l];
    return out;
  }
};

enum class SymbolAlphabet { Gaussian, Qpsk };

/// One symbol period. `symbols(l, k)` is the symbol of user k in cell l.
/// `error_symbols` is an independent copy of the in-cell symbol vector with
/// the same covariance; it drives the estimation-error term of the
/// effective received signal. Noise is stored so the received vector can be
/// split into its additive terms afterwards.
template <typename Real>
struct SymbolFrame {
  CMatrix<Real> symbols;
  CVector<Real> error_symbols;
  CVector<Real> noise;
  CVector<Real> received;
};

template <typename Real>
ChannelRealization<Real> draw_channel_realization(const ScenarioConfig<Real>& cfg,
                                                  RandomStream& rng) {
  ChannelRealization<Real> ch;
  ch.small_scale.reserve(cfg.num_cells);
  ch.scaled.reserve(cfg.num_cells);
  for (Index l = 0; l < cfg.num_cells; ++l) {
    CMatrix<Real> h = rng.complex_normal_matrix<Real>(cfg.num_antennas, cfg.num_users);
    const RVector<Real> root = cfg.gains.row(l).transpose().cwiseSqrt();
    CMatrix<Real> g = h * root.template cast<std::complex<Real>>().asDiagonal();
    ch.small_scale.push_back(std::move(h));
    ch.scaled.push_back(std::move(g));
  }
  return ch;
}

namespace detail {

template <typename Real>
std::complex<Real> draw_symbol(RandomStream& rng, Real power, SymbolAlphabet alphabet) {
  if (alphabet == SymbolAlphabet::Gaussian) return rng.complex_normal<Real>(power);
  const Real a = std::sqrt(power / Real(2));
  const auto bits = rng.engine()();
  return {(bits & 1U) ? a : -a, (bits & 2U) ? a : -a};
}

}  // namespace detail

/// Received vector sum_l G_l x_l + noise for one symbol period.
template <typename Real>
SymbolFrame<Real> synthesize_symbol_period(const ScenarioConfig<Real>& cfg,
                                           const ChannelRealization<Real>& ch, RandomStream& rng,
                                           SymbolAlphabet alphabet = SymbolAlphabet::Gaussian) {
  SymbolFrame<Real> f;
  f.symbols.resize(cfg.num_cells, cfg.num_users);
  for (Index l = 0; l < cfg.num_cells; ++l) {
    for (Index k = 0; k < cfg.num_users; ++k) {
      f.symbols(l, k) = detail::draw_symbol(rng, cfg.power, alphabet);
    }
  }
  f.error_symbols.resize(cfg.num_users);
  for (Index k = 0; k < cfg.num_users; ++k) {
    f.error_symbols(k) = detail::draw_symbol(rng, cfg.power, alphabet);
  }
  f.noise = rng.complex_normal_matrix<Real>(cfg.num_antennas, 1);
  f.received = f.noise;
  for (Index l = 0; l < cfg.num_cells; ++l) {
    f.received.noalias() += ch.scaled[l] * f.symbols.row(l).transpose();
  }
  return f;
}

}  // namespace gbsim

#endif  // GBSIM_CHANNEL_HPP
