// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include "risdma/types.hpp"

namespace risdma {

struct DeConfig {
    double eps_fixed_point = 1e-10;  ///< stop on max_k ||psi - psi_prev||^2
    int max_iterations = 2000;
    int damp_after = 200;  ///< switch to averaged updates past this iteration
};

/// Converged parameter bundle of the ergodic-rate approximation. gamma[k]
/// has length N_R, psi[k] length N_k; Gamma[k] (N_k x N_k) and Psi[k]
/// (r x r, r = columns of the combiner) are the induced matrices. U_G[k]
/// stores the effective mode matrices V1^H H1 Phi U2[k] the bundle was
/// computed for.
struct DeState {
    std::vector<RVec> gamma;
    std::vector<RVec> psi;
    std::vector<CMat> Gamma;
    std::vector<CMat> Psi;
    std::vector<CMat> U_G;
    int iterations = 0;
    bool converged = false;
};

/// Effective mode matrices U_G[k] = V1^H H1 Phi U2[k].
std::vector<CMat> effective_mode_matrices(const ChannelStatistics& stats,
                                          const CMat& h1, const PhaseShifts& phi,
                                          const CMat& v1tilde);

/// Jointly iterate the coupled fixed-point updates of (gamma, psi) for all
/// users until the psi change falls below eps. warm_psi, when given, seeds
/// the iteration (the fixed point is unique, so this only saves iterations).
DeState de_fixed_point(const TransmitCovariances& q, const ChannelStatistics& stats,
                       const std::vector<CMat>& u_g, double sigma2,
                       const DeConfig& cfg = {},
                       const std::vector<RVec>* warm_psi = nullptr);

/// Asymptotic spectral-efficiency approximation, bits/s/Hz:
///   sum_k logdet(I + Gamma_k Q_k / sigma2) + logdet(I + sum_k Psi_k)
///   - sum_k gamma_k^T Omega_k psi_k.
double de_se(const DeState& state, const TransmitCovariances& q,
             const ChannelStatistics& stats, double sigma2);

/// Same in nats (solver-internal convention).
double de_se_nats(const DeState& state, const TransmitCovariances& q,
                  const ChannelStatistics& stats, double sigma2);

/// Statistical stand-in for sum_k H2k Qk H2k^H in the phase subproblem:
///   Ptilde = sigma2 * sum_k U2k diag(Omega_k psi_k) U2k^H.
CMat effective_p_tilde(const DeState& state, const ChannelStatistics& stats,
                       double sigma2);

/// Statistical stand-in for the combiner subproblem objective matrix:
///   Stilde = sum_k H1 Phi U2k diag(Omega_k psi_k) U2k^H Phi^H H1^H.
CMat effective_s_tilde(const DeState& state, const ChannelStatistics& stats,
                       const CMat& h1, const PhaseShifts& phi);

}  // namespace risdma
