// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/types.hpp"

#include <cmath>
#include <stdexcept>

namespace risdma {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void require_dims(const CMat& m, Eigen::Index rows, Eigen::Index cols,
                  const std::string& name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw std::invalid_argument(name + " has size " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) + ", expected " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void require_finite(const CMat& m, const std::string& name) {
    if (!m.allFinite()) {
        throw std::invalid_argument(name + " contains non-finite entries");
    }
}

void require_unitary(const CMat& m, const std::string& name, double tol = 1e-10) {
    const CMat g = m.adjoint() * m;
    const double err =
        (g - CMat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    if (err > tol) {
        throw std::invalid_argument(name + " is not unitary (error " +
                                    std::to_string(err) + ")");
    }
}

}  // namespace

void SystemDims::validate() const {
    require(num_users >= 1, "K must be >= 1");
    require(static_cast<int>(num_antennas.size()) == num_users,
            "antenna count list must have K entries");
    for (int n : num_antennas) require(n >= 1, "N_k must be >= 1");
    require(n_ris >= 1, "N_R must be >= 1");
    require(n_strips >= 1, "S must be >= 1");
    require(elements_per_strip >= 1, "L must be >= 1");
}

void ChannelSet::validate(const SystemDims& dims) const {
    require_dims(H1, dims.bs_elements(), dims.n_ris, "H1");
    require_finite(H1, "H1");
    require(static_cast<int>(H2.size()) == dims.num_users,
            "H2 must have K entries");
    for (int k = 0; k < dims.num_users; ++k) {
        const std::string name = "H2[" + std::to_string(k) + "]";
        require_dims(H2[k], dims.n_ris, dims.num_antennas[k], name);
        require_finite(H2[k], name);
    }
}

void ChannelStatistics::validate(const SystemDims& dims) const {
    require(static_cast<int>(U2.size()) == dims.num_users &&
                static_cast<int>(V2.size()) == dims.num_users &&
                static_cast<int>(Omega2.size()) == dims.num_users,
            "channel statistics must have K entries per family");
    for (int k = 0; k < dims.num_users; ++k) {
        const std::string idx = "[" + std::to_string(k) + "]";
        require_dims(U2[k], dims.n_ris, dims.n_ris, "U2" + idx);
        require_dims(V2[k], dims.num_antennas[k], dims.num_antennas[k], "V2" + idx);
        require_unitary(U2[k], "U2" + idx);
        require_unitary(V2[k], "V2" + idx);
        if (Omega2[k].rows() != dims.n_ris ||
            Omega2[k].cols() != dims.num_antennas[k]) {
            throw std::invalid_argument("Omega2" + idx + " has wrong size");
        }
        require(Omega2[k].minCoeff() >= 0.0,
                "Omega2" + idx + " must be entrywise nonnegative");
    }
}

CMat TransmitCovariances::block_diagonal() const {
    Eigen::Index n = 0;
    for (const auto& q : Q) n += q.rows();
    CMat out = CMat::Zero(n, n);
    Eigen::Index at = 0;
    for (const auto& q : Q) {
        out.block(at, at, q.rows(), q.cols()) = q;
        at += q.rows();
    }
    return out;
}

double TransmitCovariances::total_power() const {
    double p = 0.0;
    for (const auto& q : Q) p += std::real(q.trace());
    return p;
}

void TransmitCovariances::validate(const SystemDims& dims) const {
    require(static_cast<int>(Q.size()) == dims.num_users, "Q must have K entries");
    for (int k = 0; k < dims.num_users; ++k) {
        const std::string name = "Q[" + std::to_string(k) + "]";
        require_dims(Q[k], dims.num_antennas[k], dims.num_antennas[k], name);
        if (!is_hermitian(Q[k], 1e-10)) {
            throw std::invalid_argument(name + " is not Hermitian");
        }
        const double scale = std::max(1.0, Q[k].cwiseAbs().maxCoeff());
        if (min_eigenvalue(Q[k]) < -1e-10 * scale) {
            throw std::invalid_argument(name + " is not positive semidefinite");
        }
    }
}

PhaseShifts PhaseShifts::ones(int n_ris) {
    PhaseShifts p;
    p.phi = CVec::Ones(n_ris);
    return p;
}

void PhaseShifts::validate() const {
    for (Eigen::Index n = 0; n < phi.size(); ++n) {
        if (std::abs(std::abs(phi(n)) - 1.0) > 1e-10) {
            throw std::invalid_argument("phi[" + std::to_string(n) +
                                        "] is not unit modulus");
        }
    }
}

std::string to_string(DmaSet set) {
    switch (set) {
        case DmaSet::UC: return "UC";
        case DmaSet::AO: return "AO";
        case DmaSet::BA: return "BA";
        case DmaSet::LP: return "LP";
    }
    return "?";
}

void DmaWeights::validate(const SystemDims& dims) const {
    const int s = dims.n_strips;
    const int l = dims.elements_per_strip;
    require_dims(Xi, s, dims.bs_elements(), "Xi");
    for (int s1 = 0; s1 < s; ++s1) {
        for (int s2 = 0; s2 < s; ++s2) {
            if (s1 == s2) continue;
            for (int j = 0; j < l; ++j) {
                if (std::abs(Xi(s1, s2 * l + j)) != 0.0) {
                    throw std::invalid_argument(
                        "Xi violates the microstrip block structure at row " +
                        std::to_string(s1) + ", column " + std::to_string(s2 * l + j));
                }
            }
        }
    }
    if (factors_valid) {
        require_dims(U1, s, s, "U1");
        require_dims(V1tilde, dims.bs_elements(), s, "V1tilde");
        require_unitary(U1, "U1");
        require_unitary(V1tilde, "V1tilde");
        require(xi_tilde.size() == s && xi_tilde.minCoeff() > 0.0,
                "xi_tilde must be positive with S entries");
    }
}

void SarConstraint::validate(const SystemDims& dims) const {
    require(static_cast<int>(R.size()) == dims.num_users &&
                static_cast<int>(D.size()) == dims.num_users,
            "SAR constraint lists must have K entries");
    for (int k = 0; k < dims.num_users; ++k) {
        require(R[k].size() == D[k].size(),
                "SAR matrices and budgets must pair up for user " + std::to_string(k));
        for (std::size_t i = 0; i < R[k].size(); ++i) {
            const std::string name =
                "R[" + std::to_string(k) + "][" + std::to_string(i) + "]";
            require_dims(R[k][i], dims.num_antennas[k], dims.num_antennas[k], name);
            if (!is_hermitian(R[k][i], 1e-10)) {
                throw std::invalid_argument(name + " is not Hermitian");
            }
            const double scale = std::max(1.0, R[k][i].cwiseAbs().maxCoeff());
            if (min_eigenvalue(R[k][i]) < -1e-10 * scale) {
                throw std::invalid_argument(name + " is not positive semidefinite");
            }
            require(D[k][i] > 0.0, "SAR budget D must be positive");
        }
    }
}

void LinkBudget::validate(const SystemDims& dims) const {
    require(static_cast<int>(Pmax.size()) == dims.num_users,
            "Pmax must have K entries");
    for (double p : Pmax) require(p > 0.0, "Pmax must be positive");
    require(sigma2 > 0.0, "sigma2 must be positive");
}

CMat reference_sar_matrix() {
    CMat r(4, 4);
    const cx j(0.0, 1.0);
    r << cx(8.0), -6.0 * j, cx(-2.1), cx(0.0),
         6.0 * j, cx(8.0), -6.0 * j, cx(-2.1),
         cx(-2.1), 6.0 * j, cx(8.0), -6.0 * j,
         cx(0.0), cx(-2.1), 6.0 * j, cx(8.0);
    return r;
}

}  // namespace risdma
