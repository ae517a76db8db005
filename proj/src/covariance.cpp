// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "risdma/se.hpp"

namespace risdma {

namespace {

CMat dual_whitener(double mu, const std::vector<double>& lambda,
                   const std::vector<CMat>& r, Eigen::Index n, double mu_floor) {
    CMat k = std::max(mu, mu_floor) * CMat::Identity(n, n);
    for (std::size_t i = 0; i < lambda.size(); ++i) k += lambda[i] * r[i];
    return k;
}

struct UserProblem {
    CMat theta;  // noise-whitened channel Gram, Hermitian PSD
    double pmax = 0.0;
    const std::vector<CMat>* r = nullptr;
    const std::vector<double>* d = nullptr;
};

struct UserSolution {
    CMat q;
    double mu = 0.0;
    std::vector<double> lambda;
    int cycles = 0;
    bool converged = false;
};

CMat user_q(const UserProblem& up, double mu, const std::vector<double>& lambda,
            double mu_floor) {
    return waterfill_q(up.theta, mu, lambda, *up.r, mu_floor);
}

// Smallest x >= lo with f(x) <= 0, where f is nonincreasing and f(lo) > 0.
// Returns the feasible end of the final bracket so the constraint is met.
template <typename F>
double bisect_root(F&& f, double lo, double hi_start, int max_iter) {
    double hi = std::max(hi_start, lo > 0.0 ? 2.0 * lo : 1e-12);
    for (int i = 0; i < max_iter; ++i) {
        if (f(hi) <= 0.0) break;
        hi *= 4.0;
    }
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval at double resolution
        if (f(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    return hi;
}

// Exact minimization of the user's dual function along each multiplier in
// turn. Slacks are monotone in their own multiplier (convex dual), so each
// one-dimensional solve is a bisection; cycles repeat until the KKT system
// holds to tolerance.
UserSolution solve_user(const UserProblem& up, const CovConfig& cfg, double mu_warm,
                        const std::vector<double>& lambda_warm) {
    const std::size_t a = up.r->size();
    UserSolution sol;
    sol.mu = std::max(mu_warm, cfg.mu_floor);
    sol.lambda = lambda_warm;
    sol.lambda.resize(a, 0.0);

    const double p_scale = std::max(1.0, up.pmax);
    for (int cycle = 0; cycle < cfg.max_dual_cycles; ++cycle) {
        sol.cycles = cycle + 1;

        auto power_slack = [&](double m) {
            return std::real(user_q(up, m, sol.lambda, cfg.mu_floor).trace()) - up.pmax;
        };
        if (power_slack(cfg.mu_floor) <= 0.0) {
            sol.mu = cfg.mu_floor;
        } else {
            sol.mu = bisect_root(power_slack, cfg.mu_floor, sol.mu, cfg.max_bisect);
        }

        for (std::size_t i = 0; i < a; ++i) {
            auto sar_slack = [&](double l) {
                std::vector<double> lam = sol.lambda;
                lam[i] = l;
                return sar_value(user_q(up, sol.mu, lam, cfg.mu_floor), (*up.r)[i]) -
                       (*up.d)[i];
            };
            if (sar_slack(0.0) <= 0.0) {
                sol.lambda[i] = 0.0;
            } else {
                sol.lambda[i] =
                    bisect_root(sar_slack, 0.0, std::max(sol.lambda[i], 1e-9),
                                cfg.max_bisect);
            }
        }

        sol.q = user_q(up, sol.mu, sol.lambda, cfg.mu_floor);
        const double sp = std::real(sol.q.trace()) - up.pmax;
        double viol = sp;
        double cs = std::abs(sol.mu * sp) / p_scale;
        bool ok = sp <= cfg.feas_tol * p_scale;
        for (std::size_t i = 0; i < a; ++i) {
            const double ss = sar_value(sol.q, (*up.r)[i]) - (*up.d)[i];
            const double d_scale = std::max(1.0, (*up.d)[i]);
            viol = std::max(viol, ss);
            cs = std::max(cs, std::abs(sol.lambda[i] * ss) / d_scale);
            ok = ok && ss <= cfg.feas_tol * d_scale;
        }
        if (ok && cs <= cfg.cs_tol) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

void fill_report_duals(WaterFillReport& rep, const UplinkConstraints& c) {
    rep.kkt_residuals.clear();
    rep.max_violation = 0.0;
    const std::size_t num_users = rep.Q_opt.Q.size();
    for (std::size_t k = 0; k < num_users; ++k) {
        const double sp =
            std::real(rep.Q_opt.Q[k].trace()) - c.link.Pmax[k];
        rep.kkt_residuals.push_back(rep.duals.mu[k] * sp);
        rep.max_violation = std::max(rep.max_violation, sp);
    }
    for (std::size_t k = 0; k < num_users; ++k) {
        for (std::size_t i = 0; i < c.sar.R[k].size(); ++i) {
            const double ss = sar_value(rep.Q_opt.Q[k], c.sar.R[k][i]) - c.sar.D[k][i];
            rep.kkt_residuals.push_back(rep.duals.lambda[k][i] * ss);
            rep.max_violation = std::max(rep.max_violation, ss);
        }
    }
}

}  // namespace

CMat waterfill_q(const CMat& theta, double mu, const std::vector<double>& lambda,
                 const std::vector<CMat>& r, double mu_floor) {
    const Eigen::Index n = theta.rows();
    const CMat kmat = dual_whitener(mu, lambda, r, n, mu_floor);
    const CMat k_inv_sqrt = hpd_inverse_sqrt(kmat);
    const CMat w = hermitize(k_inv_sqrt * theta * k_inv_sqrt);
    Eigen::SelfAdjointEigenSolver<CMat> es(w);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("waterfill_q: eigendecomposition failed");
    }
    RVec fill(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = es.eigenvalues()(i);
        fill(i) = p > 1.0 ? 1.0 - 1.0 / p : 0.0;
    }
    const CMat x = es.eigenvectors() * fill.asDiagonal() * es.eigenvectors().adjoint();
    return hermitize(k_inv_sqrt * x * k_inv_sqrt);
}

CMat optimal_q_given_duals_full(std::size_t k, const DualState& duals,
                                const std::vector<CMat>& g,
                                const std::vector<CMat>& q_others,
                                const SarConstraint& sar, double sigma2) {
    const Eigen::Index s = g.at(k).rows();
    CMat c_ipn = sigma2 * CMat::Identity(s, s);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == k) continue;
        c_ipn.noalias() += g[j] * q_others[j] * g[j].adjoint();
    }
    const CMat theta =
        hermitize(g[k].adjoint() * hermitize(c_ipn).llt().solve(g[k]));
    return waterfill_q(theta, duals.mu.at(k), duals.lambda.at(k), sar.R.at(k));
}

WaterFillReport dual_ascent(const FullCsiProblem& problem, const CovConfig& cfg) {
    const auto& c = problem.constraints;
    const std::size_t num_users = problem.G.size();
    const double sigma2 = c.link.sigma2;
    const Eigen::Index s = problem.G.front().rows();

    WaterFillReport rep;
    rep.duals.mu.assign(num_users, 0.0);
    rep.duals.lambda.resize(num_users);
    rep.Q_opt.Q.resize(num_users);
    std::vector<UserProblem> up(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        const Eigen::Index nk = problem.G[k].cols();
        double c0 = c.link.Pmax[k] / static_cast<double>(nk);
        for (std::size_t i = 0; i < c.sar.R[k].size(); ++i) {
            const double tr = std::real(c.sar.R[k][i].trace());
            if (tr > 0.0) c0 = std::min(c0, c.sar.D[k][i] / tr);
        }
        rep.Q_opt.Q[k] = c0 * CMat::Identity(nk, nk);
        rep.duals.mu[k] = static_cast<double>(nk) / c.link.Pmax[k];
        rep.duals.lambda[k].assign(c.sar.R[k].size(), 0.0);
        up[k].pmax = c.link.Pmax[k];
        up[k].r = &c.sar.R[k];
        up[k].d = &c.sar.D[k];
    }

    auto objective = [&]() {
        CMat z = CMat::Identity(s, s);
        for (std::size_t k = 0; k < num_users; ++k) {
            z.noalias() += (1.0 / sigma2) * problem.G[k] * rep.Q_opt.Q[k] *
                           problem.G[k].adjoint();
        }
        return logdet_hpd(hermitize(z));
    };

    bool all_users_ok = true;
    double prev = -1.0;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        rep.sweeps = sweep + 1;
        all_users_ok = true;
        for (std::size_t k = 0; k < num_users; ++k) {
            CMat c_ipn = sigma2 * CMat::Identity(s, s);
            for (std::size_t j = 0; j < num_users; ++j) {
                if (j == k) continue;
                c_ipn.noalias() +=
                    problem.G[j] * rep.Q_opt.Q[j] * problem.G[j].adjoint();
            }
            up[k].theta = hermitize(problem.G[k].adjoint() *
                                    hermitize(c_ipn).llt().solve(problem.G[k]));
            UserSolution sol =
                solve_user(up[k], cfg, rep.duals.mu[k], rep.duals.lambda[k]);
            rep.Q_opt.Q[k] = project_psd(sol.q);
            rep.duals.mu[k] = sol.mu;
            rep.duals.lambda[k] = sol.lambda;
            all_users_ok = all_users_ok && sol.converged;
        }
        const double cur = objective();
        rep.objective_trace.push_back(cur);
        if (prev >= 0.0 &&
            std::abs(cur - prev) <= cfg.eps_sweep * std::max(1.0, std::abs(cur))) {
            rep.converged = all_users_ok;
            break;
        }
        prev = cur;
    }
    fill_report_duals(rep, c);
    return rep;
}

WaterFillReport solve_full_csi(const ChannelSet& ch, const PhaseShifts& phi,
                               const CMat& v1tilde,
                               const UplinkConstraints& constraints,
                               const CovConfig& cfg) {
    FullCsiProblem problem;
    problem.G = effective_channels(ch, phi, v1tilde);
    problem.constraints = constraints;
    return dual_ascent(problem, cfg);
}

WaterFillReport solve_partial_csi(const ChannelStatistics& stats, const CMat& h1,
                                  const PhaseShifts& phi, const CMat& v1tilde,
                                  const UplinkConstraints& constraints,
                                  const CovConfig& cfg,
                                  const std::vector<RVec>* warm_psi) {
    const std::size_t num_users = stats.U2.size();
    const double sigma2 = constraints.link.sigma2;
    const std::vector<CMat> u_g = effective_mode_matrices(stats, h1, phi, v1tilde);

    SystemDims dims;
    dims.num_users = static_cast<int>(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        dims.num_antennas.push_back(static_cast<int>(stats.V2[k].rows()));
    }
    dims.n_ris = static_cast<int>(stats.U2.front().rows());
    dims.n_strips = static_cast<int>(v1tilde.cols());
    dims.elements_per_strip = 1;

    WaterFillReport rep;
    rep.Q_opt = feasible_initial_q(dims, constraints);
    rep.duals.mu.resize(num_users);
    rep.duals.lambda.resize(num_users);
    std::vector<UserProblem> up(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        rep.duals.mu[k] =
            static_cast<double>(dims.num_antennas[k]) / constraints.link.Pmax[k];
        rep.duals.lambda[k].assign(constraints.sar.R[k].size(), 0.0);
        up[k].pmax = constraints.link.Pmax[k];
        up[k].r = &constraints.sar.R[k];
        up[k].d = &constraints.sar.D[k];
    }

    std::vector<RVec> psi;
    if (warm_psi != nullptr) psi = *warm_psi;
    double prev_bits = 0.0;
    bool have_prev = false;
    bool users_ok = true;
    double q_change = std::numeric_limits<double>::infinity();
    for (int round = 0; round < cfg.max_inner_ao; ++round) {
        rep.inner_iterations = round + 1;
        const DeState de =
            de_fixed_point(rep.Q_opt, stats, u_g, sigma2, cfg.de,
                           psi.empty() ? nullptr : &psi);
        psi = de.psi;
        rep.de_psi = de.psi;
        const double eta_nats = de_se_nats(de, rep.Q_opt, stats, sigma2);
        rep.objective_trace.push_back(eta_nats);
        const double eta_bits = eta_nats / kLn2;
        if (have_prev && std::abs(eta_bits - prev_bits) <= cfg.eps_inner_ao &&
            q_change <= cfg.q_change_tol) {
            rep.converged = users_ok;
            break;
        }
        prev_bits = eta_bits;
        have_prev = true;

        users_ok = true;
        q_change = 0.0;
        for (std::size_t k = 0; k < num_users; ++k) {
            up[k].theta = hermitize(de.Gamma[k] / sigma2);
            UserSolution sol =
                solve_user(up[k], cfg, rep.duals.mu[k], rep.duals.lambda[k]);
            const CMat q_new = project_psd(sol.q);
            q_change =
                std::max(q_change, (q_new - rep.Q_opt.Q[k]).cwiseAbs().maxCoeff());
            rep.Q_opt.Q[k] = q_new;
            rep.duals.mu[k] = sol.mu;
            rep.duals.lambda[k] = sol.lambda;
            users_ok = users_ok && sol.converged;
        }
    }
    fill_report_duals(rep, constraints);
    return rep;
}

TransmitCovariances feasible_initial_q(const SystemDims& dims,
                                       const UplinkConstraints& constraints) {
    TransmitCovariances q;
    for (int k = 0; k < dims.num_users; ++k) {
        const int nk = dims.num_antennas[k];
        double c = constraints.link.Pmax[k] / nk;
        for (std::size_t i = 0; i < constraints.sar.R[k].size(); ++i) {
            const double tr = std::real(constraints.sar.R[k][i].trace());
            if (tr > 0.0) {
                c = std::min(c, constraints.sar.D[k][i] / tr);
            }
        }
        q.Q.push_back(c * CMat::Identity(nk, nk));
    }
    return q;
}

}  // namespace risdma
