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

#ifndef GBSIM_DETECT_HPP
#define GBSIM_DETECT_HPP

#include "gbsim/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <limits>
#include <optional>
#include <span>
#include <string_view>

namespace gbsim {

enum class DetectorKind { MatchedFilter, NgbMmse, GroupBlind };
enum class CovarianceMode { Genie, Sample, Conditional };
enum class BasisMode { Genie, Eigen };

constexpr std::string_view to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::MatchedFilter: return "mf";
    case DetectorKind::NgbMmse: return "ngb_mmse";
    case DetectorKind::GroupBlind: return "gb";
  }
  return "?";
}

constexpr std::string_view to_string(CovarianceMode m) {
  switch (m) {
    case CovarianceMode::Genie: return "genie";
    case CovarianceMode::Sample: return "sample";
    case CovarianceMode::Conditional: return "conditional";
  }
  return "?";
}

constexpr std::string_view to_string(BasisMode m) {
  return m == BasisMode::Genie ? "genie" : "eigen";
}

inline std::optional<DetectorKind> parse_detector_kind(std::string_view s) {
  if (s == "mf") return DetectorKind::MatchedFilter;
  if (s == "ngb_mmse") return DetectorKind::NgbMmse;
  if (s == "gb") return DetectorKind::GroupBlind;
  return std::nullopt;
}

inline std::optional<CovarianceMode> parse_covariance_mode(std::string_view s) {
  if (s == "genie") return CovarianceMode::Genie;
  if (s == "sample") return CovarianceMode::Sample;
  if (s == "conditional") return CovarianceMode::Conditional;
  return std::nullopt;
}

inline std::optional<BasisMode> parse_basis_mode(std::string_view s) {
  if (s == "genie") return BasisMode::Genie;
  if (s == "eigen") return BasisMode::Eigen;
  return std::nullopt;
}

/// Second-order statistics of the effective received signal, as used by the
/// outer detector component. Immutable once built.
template <typename Real>
struct CovarianceModel {
  CovarianceMode mode = CovarianceMode::Genie;
  /// Snapshot count for SAMPLE, zero otherwise.
  Index snapshots = 0;
  /// SAMPLE with fewer than 2n snapshots.
  bool undersampled = false;
  CMatrix<Real> matrix;
};

/// Per-user receive vectors of one detector. Column k of `weights` detects
/// in-cell user k.
template <typename Real>
struct DetectorBank {
  DetectorKind kind = DetectorKind::MatchedFilter;
  CMatrix<Real> weights;

  // Group-blind only.
  CMatrix<Real> complement;
  std::optional<CovarianceMode> covariance_mode;
  /// Complement rank differs from K(L-1).
  bool degenerate = false;
  /// Projected covariance condition number above 1e12.
  bool ill_conditioned = false;
};

namespace detail {

template <typename Real>
CMatrix<Real> hermitian_part(const CMatrix<Real>& m) {
  return (m + m.adjoint()) * Real(0.5);
}

/// Orthonormal basis of range(a) and its numerical rank, from a thin SVD.
/// Singular values below rel_tol * sigma_max count as zero.
template <typename Real>
std::pair<CMatrix<Real>, Index> orthonormal_range(const CMatrix<Real>& a, Real rel_tol) {
  if (a.cols() == 0) return {CMatrix<Real>(a.rows(), 0), 0};
  Eigen::JacobiSVD<CMatrix<Real>> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const Real cutoff = rel_tol * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return {svd.matrixU().leftCols(rank), rank};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Detectors that use only the in-cell estimates.

template <typename Real>
DetectorBank<Real> matched_filter(const PilotEstimate<Real>& est) {
  DetectorBank<Real> bank;
  bank.kind = DetectorKind::MatchedFilter;
  bank.weights = est.estimate;
  return bank;
}

/// In-cell MMSE, (G G^H + I/P)^{-1} G evaluated as G (G^H G + I/P)^{-1} so the
/// columns lie in range(G) by construction. An infinite power gives the
/// zero-forcing limit G (G^H G)^{-1}.
template <typename Real>
DetectorBank<Real> inner_mmse(const PilotEstimate<Real>& est, Real power) {
  if (!(power > Real(0))) throw DomainError("inner_mmse: power must be > 0");
  const Index K = est.num_users();
  CMatrix<Real> gram = est.estimate.adjoint() * est.estimate;
  if (std::isfinite(power)) {
    gram.diagonal().array() += Real(1) / power;
  }
  Eigen::LDLT<CMatrix<Real>> ldlt(detail::hermitian_part(gram));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw RankError("inner_mmse: in-cell Gram matrix is singular");
  }
  DetectorBank<Real> bank;
  bank.kind = DetectorKind::NgbMmse;
  bank.weights = est.estimate * ldlt.solve(CMatrix<Real>::Identity(K, K));
  return bank;
}

// ---------------------------------------------------------------------------
// Covariance of the effective received signal.

/// Conditioned on every channel: P (Ghat Ghat^H + Gerr Gerr^H + sum_{l>1} G_l G_l^H) + I.
template <typename Real>
CovarianceModel<Real> genie_covariance(const ScenarioConfig<Real>& cfg,
                                       const ChannelRealization<Real>& ch,
                                       const PilotEstimate<Real>& est) {
  const Index n = ch.num_antennas();
  const Index K = cfg.num_users;
  CMatrix<Real> factor(n, K * (cfg.num_cells + 1));
  factor.leftCols(K) = est.estimate;
  factor.middleCols(K, K) = est.error;
  for (Index l = 1; l < cfg.num_cells; ++l) factor.middleCols((l + 1) * K, K) = ch.scaled[l];

  CovarianceModel<Real> cov;
  cov.mode = CovarianceMode::Genie;
  cov.matrix = CMatrix<Real>::Identity(n, n);
  if (cfg.power != Real(0)) {
    CMatrix<Real> outer = factor * factor.adjoint();
    cov.matrix += cfg.power * detail::hermitian_part(outer);
  }
  return cov;
}

/// Sample covariance over effective-signal snapshots (columns of `snapshots`)
/// with diagonal loading 1e-3 * trace / n.
template <typename Real>
CovarianceModel<Real> sample_covariance(const CMatrix<Real>& snapshots) {
  const Index n = snapshots.rows();
  const Index T = snapshots.cols();
  if (T < n) {
    throw InsufficientFramesError("sample covariance needs at least n = " + std::to_string(n) +
                                  " frames, got " + std::to_string(T));
  }
  CovarianceModel<Real> cov;
  cov.mode = CovarianceMode::Sample;
  cov.snapshots = T;
  cov.undersampled = T < 2 * n;
  CMatrix<Real> c = snapshots * snapshots.adjoint();
  c /= static_cast<Real>(T);
  cov.matrix = detail::hermitian_part(c);
  const Real loading = Real(1e-3) * cov.matrix.trace().real() / static_cast<Real>(n);
  cov.matrix.diagonal().array() += loading;
  return cov;
}

template <typename Real>
CovarianceModel<Real> sample_covariance(const ChannelRealization<Real>& ch,
                                        const PilotEstimate<Real>& est,
                                        std::span<const SymbolFrame<Real>> frames) {
  CMatrix<Real> snaps(ch.num_antennas(), static_cast<Index>(frames.size()));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    snaps.col(static_cast<Index>(t)) = effective_signal(ch, est, frames[t]);
  }
  return sample_covariance(snaps);
}

/// Conditioned on the in-cell estimates only. Given the estimate of pilot j,
/// channel g_lj has mean (gain(l,j)/gain(0,j)) ghat_j and per-antenna
/// variance gain(l,j) - gain(l,j)^2 / (eps + sum_m gain(m,j)); the in-cell
/// error has zero mean and variance gain(0,j) - quality(j).
template <typename Real>
CovarianceModel<Real> conditional_covariance(const ScenarioConfig<Real>& cfg,
                                             const PilotEstimate<Real>& est) {
  const Index K = cfg.num_users;
  RVector<Real> mean_weight = RVector<Real>::Ones(K);
  Real white = Real(0);
  for (Index j = 0; j < K; ++j) {
    white += cfg.gains(0, j) - est.quality(j);
    const Real pilot_power = cfg.training_eps + cfg.gains.col(j).sum();
    for (Index l = 1; l < cfg.num_cells; ++l) {
      const Real b = cfg.gains(l, j);
      const Real r = b / cfg.gains(0, j);
      mean_weight(j) += r * r;
      white += b - b * b / pilot_power;
    }
  }
  CovarianceModel<Real> cov;
  cov.mode = CovarianceMode::Conditional;
  CMatrix<Real> outer = est.estimate * mean_weight.template cast<std::complex<Real>>().asDiagonal() *
                        est.estimate.adjoint();
  cov.matrix = cfg.power * detail::hermitian_part(outer);
  cov.matrix.diagonal().array() += cfg.power * white + Real(1);
  return cov;
}

/// Inputs a covariance mode may draw on. Which ones must be present depends
/// on the mode; missing ones raise MissingInputError.
template <typename Real>
struct CovarianceInputs {
  const ChannelRealization<Real>* channels = nullptr;
  const PilotEstimate<Real>* estimate = nullptr;
  std::span<const SymbolFrame<Real>> frames{};
};

template <typename Real>
CovarianceModel<Real> covariance(CovarianceMode mode, const ScenarioConfig<Real>& cfg,
                                 const CovarianceInputs<Real>& in) {
  switch (mode) {
    case CovarianceMode::Genie:
      if (!in.channels || !in.estimate) {
        throw MissingInputError("genie covariance needs the channel realization and estimate");
      }
      return genie_covariance(cfg, *in.channels, *in.estimate);
    case CovarianceMode::Sample:
      if (!in.channels || !in.estimate) {
        throw MissingInputError("sample covariance needs the channel realization and estimate");
      }
      return sample_covariance(*in.channels, *in.estimate, in.frames);
    case CovarianceMode::Conditional:
      if (!in.estimate) throw MissingInputError("conditional covariance needs the estimate");
      return conditional_covariance(cfg, *in.estimate);
  }
  throw DomainError("unknown covariance mode");
}

// ---------------------------------------------------------------------------
// Subspaces.

/// Orthonormal basis of span[G_1 ... G_L]. Throws DimensionError when n < KL
/// and RankError when a singular value falls below 1e-8 sigma_max.
template <typename Real>
CMatrix<Real> genie_signal_basis(const ChannelRealization<Real>& ch) {
  const CMatrix<Real> stacked = ch.stacked();
  if (stacked.rows() < stacked.cols()) {
    throw DimensionError("signal basis needs n >= KL (n = " + std::to_string(stacked.rows()) +
                         ", KL = " + std::to_string(stacked.cols()) + ")");
  }
  auto [basis, rank] = detail::orthonormal_range(stacked, Real(1e-8));
  if (rank < stacked.cols()) {
    throw RankError("channel matrix has numerical rank " + std::to_string(rank) + " < KL = " +
                    std::to_string(stacked.cols()));
  }
  return basis;
}

/// Eigenvectors of the covariance for its `dim` largest eigenvalues.
template <typename Real>
CMatrix<Real> eigen_signal_basis(const CovarianceModel<Real>& cov, Index dim) {
  const Index n = cov.matrix.rows();
  if (n < dim) {
    throw DimensionError("signal basis needs n >= KL (n = " + std::to_string(n) +
                         ", KL = " + std::to_string(dim) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(cov.matrix);
  if (eig.info() != Eigen::Success) throw RankError("covariance eigendecomposition failed");
  // eigenvalues ascending
  return eig.eigenvectors().rightCols(dim).rowwise().reverse();
}

template <typename Real>
CMatrix<Real> signal_basis(BasisMode mode, const ScenarioConfig<Real>& cfg,
                           const ChannelRealization<Real>* ch, const CovarianceModel<Real>* cov) {
  const Index dim = cfg.num_users * cfg.num_cells;
  if (mode == BasisMode::Genie) {
    if (!ch) throw MissingInputError("genie signal basis needs the channel realization");
    if (ch->num_antennas() < dim) {
      throw DimensionError("signal basis needs n >= KL");
    }
    return genie_signal_basis(*ch);
  }
  if (!cov) throw MissingInputError("eigen signal basis needs a covariance model");
  return eigen_signal_basis(*cov, dim);
}

template <typename Real>
struct ComplementBasis {
  CMatrix<Real> basis;
  /// rank(signal basis) - K, the generic complement dimension.
  Index expected_dim = 0;
  bool degenerate() const { return basis.cols() != expected_dim; }
};

/// Orthonormal basis of span(signal) intersected with the orthogonal
/// complement of range(estimate). Vectors signal * a with
/// estimate^H signal a = 0, i.e. a in null(Q^H signal) for Q an orthonormal
/// basis of range(estimate).
template <typename Real>
ComplementBasis<Real> complement_basis(const CMatrix<Real>& signal,
                                       const PilotEstimate<Real>& est) {
  const Index K = est.num_users();
  auto [q, rank] = detail::orthonormal_range(est.estimate, Real(1e-8));
  if (rank < K) {
    throw RankError("in-cell estimates have numerical rank " + std::to_string(rank) + " < K = " +
                    std::to_string(K));
  }
  const Index r = signal.cols();
  ComplementBasis<Real> out;
  out.expected_dim = std::max<Index>(r - K, 0);
  if (r == 0) {
    out.basis.resize(signal.rows(), 0);
    return out;
  }
  const CMatrix<Real> overlap = q.adjoint() * signal;
  Eigen::JacobiSVD<CMatrix<Real>> svd(overlap, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  // principal cosines lie in [0, 1]
  Index overlap_rank = 0;
  while (overlap_rank < s.size() && s(overlap_rank) > Real(1e-8)) ++overlap_rank;
  out.basis = signal * svd.matrixV().rightCols(r - overlap_rank);
  return out;
}

// ---------------------------------------------------------------------------
// Group-blind detector.

/// -U (U^H C U)^{-1} U^H C W_inner, zero when the complement is empty.
template <typename Real>
CMatrix<Real> outer_component(const CMatrix<Real>& complement, const CovarianceModel<Real>& cov,
                              const CMatrix<Real>& inner) {
  const Index d = complement.cols();
  if (d == 0) return CMatrix<Real>::Zero(inner.rows(), inner.cols());
  const CMatrix<Real> cu = cov.matrix * complement;
  const CMatrix<Real> projected = detail::hermitian_part<Real>(complement.adjoint() * cu);
  const CMatrix<Real> rhs = cu.adjoint() * inner;
  Eigen::LDLT<CMatrix<Real>> ldlt(projected);
  return -(complement * ldlt.solve(rhs));
}

/// Condition number of U^H C U.
template <typename Real>
Real projected_condition_number(const CMatrix<Real>& complement, const CovarianceModel<Real>& cov) {
  if (complement.cols() == 0) return Real(1);
  const CMatrix<Real> projected =
      detail::hermitian_part<Real>(complement.adjoint() * cov.matrix * complement);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(projected, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (ev(0) <= Real(0)) return std::numeric_limits<Real>::infinity();
  return ev(ev.size() - 1) / ev(0);
}

template <typename Real>
DetectorBank<Real> group_blind_detector(const PilotEstimate<Real>& est,
                                        const CovarianceModel<Real>& cov,
                                        const CMatrix<Real>& signal, Real power) {
  DetectorBank<Real> inner = inner_mmse(est, power);
  ComplementBasis<Real> comp = complement_basis(signal, est);

  DetectorBank<Real> bank;
  bank.kind = DetectorKind::GroupBlind;
  bank.weights = inner.weights + outer_component(comp.basis, cov, inner.weights);
  bank.covariance_mode = cov.mode;
  bank.degenerate = comp.degenerate();
  bank.ill_conditioned = projected_condition_number(comp.basis, cov) > Real(1e12);
  bank.complement = std::move(comp.basis);
  return bank;
}

}  // namespace gbsim

#endif  // GBSIM_DETECT_HPP
