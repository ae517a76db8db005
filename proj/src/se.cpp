// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/se.hpp"

#include <cmath>
#include <stdexcept>

#include "risdma/rng.hpp"
#include "risdma/channel.hpp"

namespace risdma {

namespace {

void check_orthonormal_columns(const CMat& v1, double tol = 1e-8) {
    const CMat g = v1.adjoint() * v1;
    const double err =
        (g - CMat::Identity(v1.cols(), v1.cols())).cwiseAbs().maxCoeff();
    if (err > tol) {
        throw std::invalid_argument(
            "V1tilde columns are not orthonormal (error " + std::to_string(err) + ")");
    }
}

}  // namespace

std::vector<CMat> effective_channels(const ChannelSet& ch, const PhaseShifts& phi,
                                     const CMat& v1tilde) {
    const CMat front = v1tilde.adjoint() * ch.H1 * phi.phi.asDiagonal();
    std::vector<CMat> g;
    g.reserve(ch.H2.size());
    for (const auto& h2 : ch.H2) g.push_back(front * h2);
    return g;
}

double se_from_effective_nats(const std::vector<CMat>& g,
                              const TransmitCovariances& q, double sigma2) {
    if (g.size() != q.Q.size()) {
        throw std::invalid_argument("effective channel count does not match Q count");
    }
    const Eigen::Index s = g.empty() ? 0 : g.front().rows();
    CMat z = CMat::Identity(s, s);
    for (std::size_t k = 0; k < g.size(); ++k) {
        z.noalias() += (1.0 / sigma2) * g[k] * q.Q[k] * g[k].adjoint();
    }
    return logdet_hpd(hermitize(z));
}

double evaluate_se_full(const TransmitCovariances& q, const PhaseShifts& phi,
                        const CMat& v1tilde, const ChannelSet& ch, double sigma2) {
    check_orthonormal_columns(v1tilde);
    return se_from_effective_nats(effective_channels(ch, phi, v1tilde), q, sigma2) /
           kLn2;
}

double evaluate_se_projection_form(const TransmitCovariances& q,
                                   const PhaseShifts& phi, const CMat& xi,
                                   const ChannelSet& ch, double sigma2) {
    const Eigen::Index s = xi.rows();
    const CMat gram = xi * xi.adjoint();
    Eigen::PartialPivLU<CMat> gram_lu(gram);
    const double rcond_proxy =
        gram_lu.matrixLU().diagonal().cwiseAbs().minCoeff() /
        std::max(gram.cwiseAbs().maxCoeff(), 1e-300);
    if (!(rcond_proxy > 1e-14)) {
        throw std::runtime_error(
            "evaluate_se_projection_form: Xi Xi^H is rank deficient; "
            "regularization is out of scope");
    }
    const CMat front = xi * ch.H1 * phi.phi.asDiagonal();
    CMat num = CMat::Zero(s, s);
    for (std::size_t k = 0; k < ch.H2.size(); ++k) {
        const CMat a = front * ch.H2[k];
        num.noalias() += (1.0 / sigma2) * a * q.Q[k] * a.adjoint();
    }
    const CMat arg = CMat::Identity(s, s) + num * gram_lu.inverse();
    double phase = 0.0;
    const double val = logdet_lu(arg, &phase);
    if (std::abs(phase) > 1e-8) {
        throw std::runtime_error(
            "evaluate_se_projection_form: determinant is not real positive");
    }
    return val / kLn2;
}

double evaluate_se_conventional(const TransmitCovariances& q, const PhaseShifts& phi,
                                const ChannelSet& ch, double sigma2) {
    const Eigen::Index m = ch.H1.rows();
    return evaluate_se_full(q, phi, CMat::Identity(m, m), ch, sigma2);
}

MonteCarloSe monte_carlo_ergodic_se(const ChannelStatistics& stats,
                                    const SystemDims& dims, const CMat& h1,
                                    const TransmitCovariances& q,
                                    const PhaseShifts& phi, const CMat& v1tilde,
                                    double sigma2, int n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 1) {
        throw std::invalid_argument("monte_carlo_ergodic_se: n_samples must be >= 1");
    }
    check_orthonormal_columns(v1tilde);
    const CMat front = v1tilde.adjoint() * h1 * phi.phi.asDiagonal();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const std::vector<CMat> h2 =
            sample_h2(stats, dims, substream_seed(seed, static_cast<std::uint64_t>(i)));
        std::vector<CMat> g;
        g.reserve(h2.size());
        for (const auto& h : h2) g.push_back(front * h);
        const double v = se_from_effective_nats(g, q, sigma2) / kLn2;
        sum += v;
        sum_sq += v * v;
    }
    MonteCarloSe out;
    out.n_samples = n_samples;
    out.mean_bits = sum / n_samples;
    if (n_samples > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / n_samples) / (n_samples - 1));
        out.std_error = std::sqrt(var / n_samples);
    }
    return out;
}

double sar_value(const CMat& qk, const CMat& rki) {
    if (qk.rows() != rki.rows() || qk.cols() != rki.cols()) {
        throw std::invalid_argument("sar_value: Q and R dimensions differ");
    }
    if (!is_hermitian(qk, 1e-10) || !is_hermitian(rki, 1e-10)) {
        throw std::invalid_argument("sar_value: inputs must be Hermitian");
    }
    const cx t = (rki * qk).trace();
    if (std::abs(t.imag()) > 1e-10 * std::max(1.0, std::abs(t.real()))) {
        throw std::runtime_error("sar_value: trace has a non-negligible imaginary part");
    }
    return t.real();
}

}  // namespace risdma
