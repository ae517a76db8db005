// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/phase.hpp"

#include <cmath>
#include <stdexcept>

#include "risdma/rng.hpp"

namespace risdma {

namespace {

constexpr int kDenseEigLimit = 256;

double top_eigenvalue(const CMat& delta) {
    if (delta.rows() <= kDenseEigLimit) {
        return std::max(0.0, max_eigenvalue(delta));
    }
    // Power iteration for large surfaces.
    CVec v = CVec::Ones(delta.rows()).normalized();
    double prev = 0.0;
    for (int it = 0; it < 10000; ++it) {
        CVec w = delta * v;
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        v = w / nrm;
        const double cur = std::real(v.dot(delta * v));
        if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

CVec initial_phase(int n, const PhaseConfig& cfg) {
    if (cfg.init == PhaseInit::Ones) return CVec::Ones(n);
    Rng rng(substream_seed(cfg.seed, 0xfa5eu));
    CVec phi(n);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * M_PI * rng.uniform();
        phi(i) = cx(std::cos(theta), std::sin(theta));
    }
    return phi;
}

}  // namespace

CMat mmse_matrix(const CMat& ue, const CVec& phi, const CMat& j_eff,
                 const CMat& p_sqrt, double sigma2) {
    const Eigen::Index n = ue.cols();
    const CMat x = ue.adjoint() * j_eff * phi.asDiagonal() * p_sqrt;
    const CMat d = x - CMat::Identity(n, n);
    return hermitize(sigma2 * ue.adjoint() * ue + d * d.adjoint());
}

CMat update_we(const CMat& ue, const CVec& phi, const CMat& j_eff,
               const CMat& p_sqrt, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("update_we: sigma2 must be > 0");
    const CMat ee = mmse_matrix(ue, phi, j_eff, p_sqrt, sigma2);
    return hermitize(ee.llt().solve(CMat::Identity(ee.rows(), ee.cols())));
}

CMat update_ue(const CVec& phi, const CMat& j_eff, const CMat& p, const CMat& p_sqrt,
               double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("update_ue: sigma2 must be > 0");
    const Eigen::Index s = j_eff.rows();
    const CMat jp = j_eff * phi.asDiagonal();
    const CMat cov =
        hermitize(sigma2 * CMat::Identity(s, s) + jp * p * jp.adjoint());
    return cov.llt().solve(jp * p_sqrt);
}

double h_objective(const CMat& we, const CMat& ue, const CVec& phi, const CMat& j_eff,
                   const CMat& p_sqrt, double sigma2) {
    const CMat ee = mmse_matrix(ue, phi, j_eff, p_sqrt, sigma2);
    return std::real((we * ee).trace()) - logdet_hpd(we);
}

MmWorkspace build_quadratic(const CMat& we, const CMat& ue, const CVec& phi,
                            const CMat& j_eff, const CMat& p, const CMat& p_sqrt) {
    const CMat uwu = ue * we * ue.adjoint();
    const CMat a = j_eff.adjoint() * uwu * j_eff;
    const CMat bmat = p_sqrt * we * ue.adjoint() * j_eff;
    MmWorkspace ws;
    ws.Delta = hermitize(a.cwiseProduct(p.transpose()));
    ws.lambda_max = top_eigenvalue(ws.Delta);
    ws.b = bmat.diagonal();
    ws.g_value = g_objective(ws, phi);
    return ws;
}

double g_objective(const MmWorkspace& ws, const CVec& phi) {
    const double quad = std::real(phi.dot(ws.Delta * phi));
    const double lin = std::real(phi.dot(ws.b.conjugate()));
    return quad - 2.0 * lin;
}

CVec mm_step(const MmWorkspace& ws, const CVec& phi) {
    CVec c = ws.lambda_max * phi - ws.Delta * phi + ws.b.conjugate();
    CVec out(phi.size());
    for (Eigen::Index n = 0; n < phi.size(); ++n) {
        const double mag = std::abs(c(n));
        out(n) = mag == 0.0 ? phi(n) : c(n) / mag;
    }
    return out;
}

double surrogate_value(const MmWorkspace& ws, const CVec& phi, const CVec& phi0) {
    const double n = static_cast<double>(phi.size());
    const CVec c = ws.lambda_max * phi0 - ws.Delta * phi0 + ws.b.conjugate();
    return 2.0 * ws.lambda_max * n - std::real(phi0.dot(ws.Delta * phi0)) -
           2.0 * std::real(phi.dot(c));
}

PhaseResult optimize_phase(const CMat& p_effective, const CMat& h1,
                           const CMat& v1tilde, double sigma2,
                           const PhaseConfig& cfg, const CVec* phi_init) {
    const CMat j_eff = v1tilde.adjoint() * h1;
    const CMat p = hermitize(p_effective);
    const CMat p_sqrt = psd_sqrt(p);

    PhaseResult res;
    CVec phi = phi_init != nullptr ? *phi_init
                                   : initial_phase(static_cast<int>(h1.cols()), cfg);

    double h_prev = 0.0;
    bool have_prev = false;
    for (int t = 0; t < cfg.max_bcd; ++t) {
        const CMat ue = update_ue(phi, j_eff, p, p_sqrt, sigma2);
        const CMat we = update_we(ue, phi, j_eff, p_sqrt, sigma2);

        MmWorkspace ws = build_quadratic(we, ue, phi, j_eff, p, p_sqrt);
        double g_prev = ws.g_value;
        for (int z = 0; z < cfg.max_mm; ++z) {
            phi = mm_step(ws, phi);
            ++res.mm_steps;
            const double g_cur = g_objective(ws, phi);
            if (std::abs(g_cur - g_prev) <= cfg.eps_mm) {
                g_prev = g_cur;
                break;
            }
            g_prev = g_cur;
        }

        const double h_cur = h_objective(we, ue, phi, j_eff, p_sqrt, sigma2);
        res.h_trace.push_back(h_cur);
        res.bcd_iterations = t + 1;
        if (have_prev && std::abs(h_cur - h_prev) <= cfg.eps_bcd) {
            res.converged = true;
            h_prev = h_cur;
            break;
        }
        h_prev = h_cur;
        have_prev = true;
    }

    res.phi.phi = std::move(phi);
    // Unit modulus is preserved exactly by construction; renormalize anyway to
    // keep downstream invariants independent of accumulated round-off.
    for (Eigen::Index n = 0; n < res.phi.phi.size(); ++n) {
        const double mag = std::abs(res.phi.phi(n));
        if (mag > 0.0) res.phi.phi(n) /= mag;
    }
    return res;
}

}  // namespace risdma
