// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include "risdma/types.hpp"

namespace risdma {

/// Admissible set for a single metasurface element weight.
///   UC: all of C.    AO: real interval [amp_lo, amp_hi], 0 < lo < hi.
///   BA: {0, level}, level > 0.    LP: circle (j + e^{j*phase})/2.
struct FeasibleSet {
    DmaSet tag = DmaSet::UC;
    double amp_lo = 0.001;
    double amp_hi = 2.0;
    double level = 0.1;

    static FeasibleSet uc() { return {DmaSet::UC}; }
    static FeasibleSet amplitude(double lo = 0.001, double hi = 2.0);
    static FeasibleSet binary(double level = 0.1);
    static FeasibleSet lorentzian() { return {DmaSet::LP}; }
    static FeasibleSet tagged(DmaSet tag);

    void validate() const;
};

struct DmaConfig {
    double eps_fit = 1e-8;       ///< stop when ||Xi(p) - Xi(p-1)||_F^2 <= eps_fit
    int max_iterations = 500;
    double delta = 1e-6;         ///< floor for the diagonal scaling factors
};

struct DmaFitReport {
    DmaWeights weights;
    std::vector<double> residual_trace;  ///< ||Xi - U1 XiTilde V1^H||_F^2 per block update
    double on_block_residual = 0.0;      ///< same gap restricted to structural entries
    int iterations = 0;
    bool converged = false;
};

/// Nearest point of the feasible set to t.
cx project_entry(cx t, const FeasibleSet& set);

/// Maximizer of logdet(I_S + V1^H Smat V1) over orthonormal V1: the top-S
/// eigenvectors of Smat, eigenvalues descending. Ties keep the solver's
/// deterministic ordering; columns are phase-normalized for reproducibility.
CMat unconstrained_v1(const CMat& smat, int n_strips);

/// Orthogonal Procrustes: the unitary U1 minimizing ||Xi - U1 T1||_F.
CMat procrustes_u1(const CMat& xi, const CMat& t1);

/// Diagonal scaling factors minimizing ||T2^H - diag(x) V1^H||_F entrywise
/// over x_s >= delta.
RVec diagonal_xi(const CMat& t2, const CMat& v1tilde, double delta);

/// Alternating fit of a block-structured, feasible Xi to U1 XiTilde V1opt^H.
DmaFitReport fit_constrained(const CMat& v1tilde_opt, const SystemDims& dims,
                             const FeasibleSet& set, const DmaConfig& cfg = {});

/// Unconstrained optimum followed by the constrained fit; the returned
/// weights carry refreshed compact-SVD factors.
DmaWeights optimize_dma(const CMat& smat, const SystemDims& dims,
                        const FeasibleSet& set, const DmaConfig& cfg = {});

/// Populate (U1, xi_tilde, V1tilde) of w from its current Xi.
void refresh_svd_factors(DmaWeights& w);

}  // namespace risdma
