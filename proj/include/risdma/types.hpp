// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <string>
#include <vector>

#include "risdma/linalg.hpp"

namespace risdma {

/// Geometry of one scenario: K users with N[k] antennas each, a reflecting
/// surface with n_ris elements, and a metasurface receive array of
/// n_strips microstrips times elements_per_strip metamaterial units.
struct SystemDims {
    int num_users = 0;                ///< K
    std::vector<int> num_antennas;    ///< N_k, one per user
    int n_ris = 0;                    ///< N_R
    int n_strips = 0;                 ///< S
    int elements_per_strip = 0;       ///< L

    int bs_elements() const { return n_strips * elements_per_strip; }  ///< M = S*L

    /// Throws std::invalid_argument when any count is invalid.
    void validate() const;
};

/// One realization of the surface-to-array channel H1 (M x N_R) and the
/// user-to-surface channels H2[k] (N_R x N_k).
struct ChannelSet {
    CMat H1;
    std::vector<CMat> H2;

    void validate(const SystemDims& dims) const;
};

/// Eigenmode-domain second-order statistics of the user-to-surface channels:
/// H2[k] = U2[k] * (sqrt(Omega2[k]) .* W) * V2[k]^H with W iid CN(0,1).
struct ChannelStatistics {
    std::vector<CMat> U2;      ///< N_R x N_R unitary
    std::vector<CMat> V2;      ///< N_k x N_k unitary
    std::vector<RMat> Omega2;  ///< N_R x N_k entrywise >= 0 coupling variances

    void validate(const SystemDims& dims) const;
};

/// Per-user transmit covariance matrices, Hermitian PSD.
struct TransmitCovariances {
    std::vector<CMat> Q;

    /// diag{Q_1, ..., Q_K} assembled on demand.
    CMat block_diagonal() const;

    double total_power() const;

    void validate(const SystemDims& dims) const;
};

/// Unit-modulus reflection coefficients of the surface elements.
struct PhaseShifts {
    CVec phi;

    CMat as_diagonal() const { return CMat(phi.asDiagonal()); }

    static PhaseShifts ones(int n_ris);

    void validate() const;
};

/// Admissible sets for individual metasurface element weights.
enum class DmaSet { UC, AO, BA, LP };

std::string to_string(DmaSet set);

/// Block-structured S x M weight matrix of the metasurface array together
/// with its feasible-set tag and, when populated, its compact-SVD factors
/// (Xi = U1 * diag(xi_tilde) * V1tilde^H up to the residual tracked by the
/// fitting stage).
struct DmaWeights {
    CMat Xi;
    DmaSet set_tag = DmaSet::UC;
    cx element_response = cx(1.0, 0.0);  ///< common frequency-flat response f

    bool factors_valid = false;
    CMat U1;           ///< S x S unitary
    RVec xi_tilde;     ///< singular values, descending, > 0
    CMat V1tilde;      ///< M x S, orthonormal columns

    void validate(const SystemDims& dims) const;
};

/// Time-averaged quadratic exposure constraints tr(R[k][i] Q_k) <= D[k][i]
/// per user and body region; R entries carry 1/kg, D carries W/kg.
struct SarConstraint {
    std::vector<std::vector<CMat>> R;
    std::vector<std::vector<double>> D;

    std::size_t num_constraints(std::size_t user) const { return R.at(user).size(); }

    void validate(const SystemDims& dims) const;
};

/// Per-user power budgets, noise variance, and large-scale attenuation
/// applied at channel generation.
struct LinkBudget {
    std::vector<double> Pmax;  ///< W
    double sigma2 = 0.0;       ///< W
    double pathloss_db = 120.0;

    void validate(const SystemDims& dims) const;
};

/// The 4x4 exposure matrix used throughout the experiments (units 1/kg).
CMat reference_sar_matrix();

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

}  // namespace risdma
