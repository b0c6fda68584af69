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

#ifndef GBSIM_TYPES_HPP
#define GBSIM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace gbsim {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the engine, the CLI) can catch one type and still dispatch on kind.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its mathematical domain (beta <= 0, P <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix shapes are incompatible, or n < KL where the detector needs n >= KL.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A set of vectors that must be linearly independent is numerically not.
class RankError : public Error {
 public:
  using Error::Error;
};

/// SAMPLE covariance requested with fewer snapshots than antennas.
class InsufficientFramesError : public Error {
 public:
  using Error::Error;
};

/// A covariance or basis mode was asked for without the input it needs.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

/// Empirical SINR requested over an empty frame stream.
class EmptyStreamError : public Error {
 public:
  using Error::Error;
};

/// Traditional-detector asymptote undefined: no same-pilot interferer.
class NoInterferenceError : public Error {
 public:
  using Error::Error;
};

/// An experiment plan violates its own invariants (empty sweep, no trials...).
class PlanError : public Error {
 public:
  using Error::Error;
};

/// Receive vector is identically zero.
class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbsim

#endif  // GBSIM_TYPES_HPP
