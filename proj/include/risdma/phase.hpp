// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <cstdint>

#include "risdma/types.hpp"

namespace risdma {

enum class PhaseInit { Ones, SeededRandom };

struct PhaseConfig {
    double eps_mm = 1e-6;   ///< stop the inner surrogate loop on |dg|
    double eps_bcd = 1e-6;  ///< stop the outer loop on |dh|
    int max_mm = 500;
    int max_bcd = 200;
    PhaseInit init = PhaseInit::SeededRandom;
    std::uint64_t seed = 1;
};

/// Weighted-MMSE auxiliaries for the phase subproblem
///   max_phi logdet(I_S + (1/sigma2) V1^H H1 Phi P Phi^H H1^H V1).
struct WmmseState {
    CMat We;         ///< N_R x N_R Hermitian PD weight
    CMat Ue;         ///< S x N_R receiver
    double h_value;  ///< tr(We Ee) - logdet(We), nats
};

/// Quadratic form of the phase vector after eliminating (We, Ue):
///   g(phi) = phi^H Delta phi - 2 Re{phi^H conj(b)}.
struct MmWorkspace {
    CMat Delta;        ///< A .* P^T, Hermitian PSD
    double lambda_max; ///< top eigenvalue of Delta
    CVec b;            ///< diag(B)
    double g_value;    ///< g at the phi the workspace was built from
};

struct PhaseResult {
    PhaseShifts phi;
    std::vector<double> h_trace;  ///< objective per outer iteration
    int bcd_iterations = 0;
    int mm_steps = 0;
    bool converged = false;
};

/// MSE matrix of the equivalent system for receiver ue at phase phi.
CMat mmse_matrix(const CMat& ue, const CVec& phi, const CMat& j_eff,
                 const CMat& p_sqrt, double sigma2);

/// Optimal weight given the receiver: We = Ee^{-1}.
CMat update_we(const CMat& ue, const CVec& phi, const CMat& j_eff,
               const CMat& p_sqrt, double sigma2);

/// Optimal receiver given the phase (independent of the weight).
CMat update_ue(const CVec& phi, const CMat& j_eff, const CMat& p, const CMat& p_sqrt,
               double sigma2);

double h_objective(const CMat& we, const CMat& ue, const CVec& phi, const CMat& j_eff,
                   const CMat& p_sqrt, double sigma2);

/// Assemble the quadratic form for the current (We, Ue).
MmWorkspace build_quadratic(const CMat& we, const CMat& ue, const CVec& phi,
                            const CMat& j_eff, const CMat& p, const CMat& p_sqrt);

double g_objective(const MmWorkspace& ws, const CVec& phi);

/// One surrogate step: phi_n <- exp(j arg(c_n)) with
/// c = (lambda_max I - Delta) phi + conj(b); zero entries keep their phase.
CVec mm_step(const MmWorkspace& ws, const CVec& phi);

/// Surrogate upper bound tilde-g(phi | phi0); tight at phi0 and >= g(phi).
double surrogate_value(const MmWorkspace& ws, const CVec& phi, const CVec& phi0);

/// Full phase design: BCD over (We, Ue, phi) with the surrogate inner loop.
/// p_effective is either sum_k H2k Qk H2k^H (instantaneous CSI) or its
/// statistical replacement.
PhaseResult optimize_phase(const CMat& p_effective, const CMat& h1,
                           const CMat& v1tilde, double sigma2,
                           const PhaseConfig& cfg, const CVec* phi_init = nullptr);

}  // namespace risdma
