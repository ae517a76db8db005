// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/det_equiv.hpp"

#include <cmath>
#include <stdexcept>

namespace risdma {

namespace {

// gamma and psi are quadratic forms of Hermitian PD inverses: real and
// nonnegative up to round-off. Clamp the dust, reject anything larger.
RVec clamp_nonnegative(RVec v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < -1e-12) {
            throw std::runtime_error(std::string(what) +
                                     " went negative in the fixed point");
        }
        v(i) = std::max(v(i), 0.0);
    }
    return v;
}

std::vector<CMat> psi_matrices(const std::vector<RVec>& psi,
                               const ChannelStatistics& stats,
                               const std::vector<CMat>& u_g) {
    std::vector<CMat> out(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const RVec w = stats.Omega2[k] * psi[k];
        out[k] = hermitize(u_g[k] * w.asDiagonal().toDenseMatrix().cast<cx>() *
                           u_g[k].adjoint());
    }
    return out;
}

std::vector<CMat> gamma_matrices(const std::vector<RVec>& gamma,
                                 const ChannelStatistics& stats) {
    std::vector<CMat> out(gamma.size());
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const RVec w = stats.Omega2[k].transpose() * gamma[k];
        out[k] = hermitize(stats.V2[k] * w.asDiagonal().toDenseMatrix().cast<cx>() *
                           stats.V2[k].adjoint());
    }
    return out;
}

}  // namespace

std::vector<CMat> effective_mode_matrices(const ChannelStatistics& stats,
                                          const CMat& h1, const PhaseShifts& phi,
                                          const CMat& v1tilde) {
    const CMat front = v1tilde.adjoint() * h1 * phi.phi.asDiagonal();
    std::vector<CMat> u_g;
    u_g.reserve(stats.U2.size());
    for (const auto& u2 : stats.U2) u_g.push_back(front * u2);
    return u_g;
}

DeState de_fixed_point(const TransmitCovariances& q, const ChannelStatistics& stats,
                       const std::vector<CMat>& u_g, double sigma2,
                       const DeConfig& cfg, const std::vector<RVec>* warm_psi) {
    const std::size_t num_users = q.Q.size();
    if (u_g.size() != num_users || stats.Omega2.size() != num_users) {
        throw std::invalid_argument("de_fixed_point: per-user input counts differ");
    }
    const Eigen::Index s = u_g.empty() ? 0 : u_g.front().rows();

    DeState st;
    st.psi.resize(num_users);
    st.gamma.assign(num_users, RVec());
    for (std::size_t k = 0; k < num_users; ++k) {
        st.psi[k] = (warm_psi != nullptr && warm_psi->size() == num_users)
                        ? (*warm_psi)[k]
                        : RVec::Ones(q.Q[k].rows());
    }

    for (int it = 0; it < cfg.max_iterations; ++it) {
        st.iterations = it + 1;
        const std::vector<CMat> psis = psi_matrices(st.psi, stats, u_g);
        CMat total = CMat::Identity(s, s);
        for (const auto& p : psis) total += p;
        const CMat total_inv =
            total.llt().solve(CMat::Identity(s, s));

        for (std::size_t k = 0; k < num_users; ++k) {
            RVec g(u_g[k].cols());
            for (Eigen::Index r = 0; r < u_g[k].cols(); ++r) {
                g(r) = std::real(u_g[k].col(r).dot(total_inv * u_g[k].col(r)));
            }
            st.gamma[k] = clamp_nonnegative(std::move(g), "gamma");
        }

        const std::vector<CMat> gammas = gamma_matrices(st.gamma, stats);
        double delta = 0.0;
        for (std::size_t k = 0; k < num_users; ++k) {
            const Eigen::Index nk = q.Q[k].rows();
            const CMat m = sigma2 * CMat::Identity(nk, nk) + gammas[k] * q.Q[k];
            const CMat qm = q.Q[k] * m.partialPivLu().inverse();
            RVec p(nk);
            for (Eigen::Index n = 0; n < nk; ++n) {
                p(n) = std::real(stats.V2[k].col(n).dot(qm * stats.V2[k].col(n)));
            }
            p = clamp_nonnegative(std::move(p), "psi");
            if (it >= cfg.damp_after) p = 0.5 * (p + st.psi[k]);
            delta = std::max(delta, (p - st.psi[k]).squaredNorm());
            st.psi[k] = std::move(p);
        }

        if (delta <= cfg.eps_fixed_point) {
            st.converged = true;
            break;
        }
    }

    st.Psi = psi_matrices(st.psi, stats, u_g);
    st.Gamma = gamma_matrices(st.gamma, stats);
    st.U_G = u_g;
    return st;
}

double de_se_nats(const DeState& state, const TransmitCovariances& q,
                  const ChannelStatistics& stats, double sigma2) {
    const std::size_t num_users = q.Q.size();
    double acc = 0.0;
    Eigen::Index s = 0;
    for (std::size_t k = 0; k < num_users; ++k) {
        const Eigen::Index nk = q.Q[k].rows();
        acc += logdet_hpd(
            hermitize(CMat::Identity(nk, nk) + (1.0 / sigma2) * state.Gamma[k] * q.Q[k]));
        s = state.Psi[k].rows();
    }
    CMat total = CMat::Identity(s, s);
    for (const auto& p : state.Psi) total += p;
    acc += logdet_hpd(hermitize(total));
    for (std::size_t k = 0; k < num_users; ++k) {
        acc -= state.gamma[k].dot(stats.Omega2[k] * state.psi[k]);
    }
    return acc;
}

double de_se(const DeState& state, const TransmitCovariances& q,
             const ChannelStatistics& stats, double sigma2) {
    return de_se_nats(state, q, stats, sigma2) / kLn2;
}

CMat effective_p_tilde(const DeState& state, const ChannelStatistics& stats,
                       double sigma2) {
    const Eigen::Index nr = stats.U2.front().rows();
    CMat p = CMat::Zero(nr, nr);
    for (std::size_t k = 0; k < state.psi.size(); ++k) {
        const RVec w = stats.Omega2[k] * state.psi[k];
        p += stats.U2[k] * w.asDiagonal().toDenseMatrix().cast<cx>() *
             stats.U2[k].adjoint();
    }
    return hermitize(sigma2 * p);
}

CMat effective_s_tilde(const DeState& state, const ChannelStatistics& stats,
                       const CMat& h1, const PhaseShifts& phi) {
    const CMat front = h1 * phi.phi.asDiagonal();
    const Eigen::Index m = h1.rows();
    CMat s = CMat::Zero(m, m);
    for (std::size_t k = 0; k < state.psi.size(); ++k) {
        const RVec w = stats.Omega2[k] * state.psi[k];
        const CMat fu = front * stats.U2[k];
        s += fu * w.asDiagonal().toDenseMatrix().cast<cx>() * fu.adjoint();
    }
    return hermitize(s);
}

}  // namespace risdma
