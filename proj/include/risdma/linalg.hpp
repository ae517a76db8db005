// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace risdma {

using cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Rates are tracked in nats internally and reported in bits.
inline constexpr double kLn2 = 0.6931471805599453;

/// (A + A^H)/2.
CMat hermitize(const CMat& a);

bool is_hermitian(const CMat& a, double tol);

/// log(det(A)) in nats for Hermitian positive definite A.
/// Throws std::runtime_error when A is not positive definite; never
/// returns NaN.
double logdet_hpd(const CMat& a);

/// log|det(A)| in nats for a general square complex A via LU. The phase of
/// the determinant is returned through *phase when requested (callers that
/// expect a real positive determinant can assert it is small).
double logdet_lu(const CMat& a, double* phase = nullptr);

/// Hermitian PSD square root; negative eigenvalues (round-off) clamp to 0.
CMat psd_sqrt(const CMat& a);

/// A^{-1/2} for Hermitian positive definite A. Eigenvalues below `floor`
/// raise std::runtime_error (callers enforce dual floors before calling).
CMat hpd_inverse_sqrt(const CMat& a, double floor = 0.0);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& a);
double max_eigenvalue(const CMat& a);

/// Symmetrize and clip tiny negative eigenvalues to zero. Eigenvalues below
/// -neg_tol * max(1, |A|_2) indicate a real defect and raise
/// std::runtime_error instead of being masked.
CMat project_psd(const CMat& a, double neg_tol = 1e-10);

/// Unitary DFT matrix, F(j,k) = exp(-2*pi*i*j*k/n)/sqrt(n).
CMat dft_matrix(int n);

/// Compact SVD of a full-row-rank S x M matrix: Xi = U1 * diag(s) * V1^H
/// with singular values descending and V1 of size M x S with orthonormal
/// columns. The first entry of each right singular vector with magnitude
/// above a relative threshold is rotated to be real positive so the factors
/// are reproducible. Throws std::runtime_error when rank < S.
struct CompactSvd {
    CMat U1;
    RVec singular_values;
    CMat V1;
};
CompactSvd compact_svd_right_factor(const CMat& xi, double rank_tol = 1e-12);

}  // namespace risdma
