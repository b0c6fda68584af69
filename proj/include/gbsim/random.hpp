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

#ifndef GBSIM_RANDOM_HPP
#define GBSIM_RANDOM_HPP

#include "gbsim/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace gbsim {

/// A single-owner random stream. Copies are independent replicas of the
/// current state, so copying before a draw reproduces that draw exactly.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  RandomStream() = default;
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

  engine_type& engine() { return engine_; }

  template <typename Real>
  Real uniform() {
    return std::uniform_real_distribution<Real>(Real(0), Real(1))(engine_);
  }

  template <typename Real>
  Real normal(Real stddev = Real(1)) {
    return std::normal_distribution<Real>(Real(0), stddev)(engine_);
  }

  /// CN(0, variance): real and imaginary parts independent N(0, variance/2).
  template <typename Real>
  std::complex<Real> complex_normal(Real variance = Real(1)) {
    if (variance == Real(0)) return {};
    const Real s = std::sqrt(variance / Real(2));
    std::normal_distribution<Real> dist(Real(0), s);
    const Real re = dist(engine_);
    const Real im = dist(engine_);
    return {re, im};
  }

  /// Fills a dense complex matrix column-major with i.i.d. CN(0, variance).
  template <typename Derived>
  void fill_complex_normal(Eigen::MatrixBase<Derived>& m,
                           typename Derived::RealScalar variance = 1) {
    using Real = typename Derived::RealScalar;
    if (variance == Real(0)) {
      m.setZero();
      return;
    }
    const Real s = std::sqrt(variance / Real(2));
    std::normal_distribution<Real> dist(Real(0), s);
    for (Index c = 0; c < m.cols(); ++c) {
      for (Index r = 0; r < m.rows(); ++r) {
        const Real re = dist(engine_);
        const Real im = dist(engine_);
        m(r, c) = {re, im};
      }
    }
  }

  template <typename Real>
  CMatrix<Real> complex_normal_matrix(Index rows, Index cols, Real variance = Real(1)) {
    CMatrix<Real> m(rows, cols);
    fill_complex_normal(m, variance);
    return m;
  }

 private:
  engine_type engine_;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives the stream for one (grid point, trial) pair. The derivation is a
/// pure function of the triple, so a trial draws the same numbers no matter
/// which worker runs it or in which order the grid is visited.
inline RandomStream seed_substream(std::uint64_t master_seed, std::uint64_t point_index,
                                   std::uint64_t trial_index) {
  const std::uint64_t a = detail::splitmix64(master_seed);
  const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(point_index + 0x632be59bd9b4e019ULL));
  const std::uint64_t c = detail::splitmix64(b ^ detail::splitmix64(trial_index + 0x85157af5ULL));
  const std::uint64_t d = detail::splitmix64(c + 0x2545f4914f6cdd1dULL);
  const std::array<std::uint32_t, 8> words{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return RandomStream(seq);
}

}  // namespace gbsim

#endif  // GBSIM_RANDOM_HPP
