// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace risdma {

CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const CMat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double logdet_hpd(const CMat& a) {
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("logdet_hpd: matrix is not positive definite");
    }
    double out = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double d = std::real(l(i, i));
        if (!(d > 0.0)) {
            throw std::runtime_error("logdet_hpd: nonpositive Cholesky pivot");
        }
        out += std::log(d);
    }
    return 2.0 * out;
}

double logdet_lu(const CMat& a, double* phase) {
    Eigen::PartialPivLU<CMat> lu(a);
    double log_abs = 0.0;
    double arg = 0.0;
    const auto& u = lu.matrixLU();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const cx d = u(i, i);
        const double mag = std::abs(d);
        if (!(mag > 0.0)) {
            throw std::runtime_error("logdet_lu: singular matrix");
        }
        log_abs += std::log(mag);
        arg += std::arg(d);
    }
    // Permutation sign contributes 0 or pi to the phase.
    if (lu.permutationP().determinant() < 0) arg += M_PI;
    if (phase != nullptr) {
        *phase = std::remainder(arg, 2.0 * M_PI);
    }
    return log_abs;
}

CMat psd_sqrt(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    }
    RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat hpd_inverse_sqrt(const CMat& a, double floor) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("hpd_inverse_sqrt: eigendecomposition failed");
    }
    const RVec& d = es.eigenvalues();
    if (d.minCoeff() < floor || d.minCoeff() <= 0.0) {
        throw std::runtime_error(
            "hpd_inverse_sqrt: matrix not positive definite (min eigenvalue " +
            std::to_string(d.minCoeff()) + "); raise the dual floor");
    }
    RVec inv = d.cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

CMat project_psd(const CMat& a, double neg_tol) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("project_psd: eigendecomposition failed");
    }
    const RVec& d = es.eigenvalues();
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if (d.minCoeff() < -neg_tol * scale) {
        throw std::runtime_error("project_psd: eigenvalue " +
                                 std::to_string(d.minCoeff()) +
                                 " below tolerance, not round-off");
    }
    RVec clipped = d.cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

CMat dft_matrix(int n) {
    CMat f(n, n);
    const double w = -2.0 * M_PI / static_cast<double>(n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double a = w * static_cast<double>(j) * static_cast<double>(k);
            f(j, k) = s * cx(std::cos(a), std::sin(a));
        }
    }
    return f;
}

CompactSvd compact_svd_right_factor(const CMat& xi, double rank_tol) {
    const Eigen::Index s = xi.rows();
    Eigen::JacobiSVD<CMat> svd(xi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    if (sv.size() < s || sv(s - 1) <= rank_tol * sv(0)) {
        throw std::runtime_error(
            "compact_svd_right_factor: weight matrix is rank deficient (rank < " +
            std::to_string(s) + ")");
    }
    CMat u = svd.matrixU();
    CMat v = svd.matrixV();
    // Phase convention: first significant entry of each right singular vector
    // made real positive; the matching left vector absorbs the same rotation.
    for (Eigen::Index c = 0; c < s; ++c) {
        Eigen::Index lead = 0;
        const double vmax = v.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            if (std::abs(v(r, c)) > 1e-12 * vmax) {
                lead = r;
                break;
            }
        }
        const cx pivot = v(lead, c);
        if (std::abs(pivot) > 0.0) {
            const cx rot = std::conj(pivot) / std::abs(pivot);
            v.col(c) *= rot;
            u.col(c) *= rot;
        }
    }
    return {std::move(u), sv.head(s), std::move(v)};
}

}  // namespace risdma
