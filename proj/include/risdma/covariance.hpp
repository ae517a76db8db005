// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <limits>

#include "risdma/det_equiv.hpp"
#include "risdma/types.hpp"

namespace risdma {

/// Lagrange multipliers: mu[k] for the power budgets, lambda[k][i] for the
/// exposure constraints. All entries nonnegative.
struct DualState {
    std::vector<double> mu;
    std::vector<std::vector<double>> lambda;
};

struct CovConfig {
    double mu_floor = 1e-12;      ///< keeps K_k = mu I + sum lambda R invertible
    double feas_tol = 1e-9;       ///< absolute feasibility target of the dual search
    double cs_tol = 1e-9;         ///< |dual * slack| target, relative to budget scale
    int max_dual_cycles = 60;     ///< coordinate cycles per user subproblem
    int max_bisect = 200;
    double eps_sweep = 1e-11;     ///< stop user sweeps on relative objective change
    int max_sweeps = 200;
    double eps_inner_ao = 1e-6;   ///< |d eta| between refresh/water-fill rounds, bits
    int max_inner_ao = 100;
    /// Optional extra stop condition on max_k |dQ_k| between rounds. The
    /// objective is quadratically flat at the fixed point, so |d eta| alone
    /// leaves a parameter gap of order sqrt(eps_inner_ao); enable this when
    /// the joint (Gamma, Q) fixed point itself must be tight.
    double q_change_tol = std::numeric_limits<double>::infinity();
    DeConfig de;                  ///< fixed-point settings (statistical CSI path)
};

struct WaterFillReport {
    TransmitCovariances Q_opt;
    DualState duals;
    /// slack * dual per constraint, power budgets first then exposure
    /// constraints in user-major order.
    std::vector<double> kkt_residuals;
    double max_violation = 0.0;    ///< max constraint violation at return (W / W/kg)
    int sweeps = 0;                ///< user sweeps (instantaneous CSI)
    int inner_iterations = 0;      ///< refresh/water-fill rounds (statistical CSI)
    std::vector<double> objective_trace;  ///< nats, per sweep / inner round
    bool converged = false;
    std::vector<RVec> de_psi;      ///< converged psi, statistical CSI only
};

/// Per-user constraint data for the covariance subproblem.
struct UplinkConstraints {
    LinkBudget link;
    SarConstraint sar;
};

/// Full-CSI multiuser problem in terms of effective channels
/// G_k = V1^H H1 Phi H2k.
struct FullCsiProblem {
    std::vector<CMat> G;
    UplinkConstraints constraints;
};

/// Water-filling closed form of one user's optimum given the duals:
///   K = mu I + sum_i lambda_i R_i,  W = K^{-1/2} Theta K^{-1/2} = U diag(p) U^H,
///   Q = K^{-1/2} U diag((1 - 1/p)^+) U^H K^{-1/2},
/// where Theta is the noise-whitened channel Gram (G^H C_ipn^{-1} G for
/// instantaneous CSI, Gamma_k / sigma2 for the statistical path).
CMat waterfill_q(const CMat& theta, double mu, const std::vector<double>& lambda,
                 const std::vector<CMat>& r, double mu_floor = 1e-12);

/// Spec-level wrapper: user k's optimum from the dual state and the other
/// users' covariances (interference-plus-noise C built from Q_others).
CMat optimal_q_given_duals_full(std::size_t k, const DualState& duals,
                                const std::vector<CMat>& g,
                                const std::vector<CMat>& q_others,
                                const SarConstraint& sar, double sigma2);

/// Drive the duals of the (possibly multiuser) full-CSI problem to
/// optimality: per-user cyclic exact minimization of the dual along each
/// multiplier (monotone slack, bisection), Gauss-Seidel over users.
WaterFillReport dual_ascent(const FullCsiProblem& problem, const CovConfig& cfg = {});

/// Covariance stage with instantaneous CSI: build the effective channels and
/// run dual_ascent.
WaterFillReport solve_full_csi(const ChannelSet& ch, const PhaseShifts& phi,
                               const CMat& v1tilde,
                               const UplinkConstraints& constraints,
                               const CovConfig& cfg = {});

/// Covariance stage with statistical CSI: alternate the deterministic
/// parameter refresh with per-user water-filling (exact duals per round)
/// until the asymptotic objective settles.
WaterFillReport solve_partial_csi(const ChannelStatistics& stats, const CMat& h1,
                                  const PhaseShifts& phi, const CMat& v1tilde,
                                  const UplinkConstraints& constraints,
                                  const CovConfig& cfg = {},
                                  const std::vector<RVec>* warm_psi = nullptr);

/// Feasible diagonal start: c I with c = min(Pmax/N, min_i D_i / tr(R_i)).
TransmitCovariances feasible_initial_q(const SystemDims& dims,
                                       const UplinkConstraints& constraints);

}  // namespace risdma
