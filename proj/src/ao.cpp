// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/ao.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "risdma/rng.hpp"
#include "risdma/se.hpp"

namespace risdma {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct EngineOptions {
    bool phase_stage = true;   ///< false pins the reflection to all-ones
    bool dma_stage = true;     ///< false keeps the identity combiner (full array)
};

UplinkConstraints drop_sar(const UplinkConstraints& c) {
    UplinkConstraints out = c;
    for (auto& r : out.sar.R) r.clear();
    for (auto& d : out.sar.D) d.clear();
    return out;
}

double audit_violation(const TransmitCovariances& q, const UplinkConstraints& c) {
    double v = 0.0;
    for (std::size_t k = 0; k < q.Q.size(); ++k) {
        v = std::max(v, std::real(q.Q[k].trace()) - c.link.Pmax[k]);
        for (std::size_t i = 0; i < c.sar.R[k].size(); ++i) {
            v = std::max(v, sar_value(q.Q[k], c.sar.R[k][i]) - c.sar.D[k][i]);
        }
    }
    return v;
}

CMat instantaneous_p(const ChannelSet& ch, const TransmitCovariances& q) {
    const Eigen::Index nr = ch.H1.cols();
    CMat p = CMat::Zero(nr, nr);
    for (std::size_t k = 0; k < ch.H2.size(); ++k) {
        p.noalias() += ch.H2[k] * q.Q[k] * ch.H2[k].adjoint();
    }
    return hermitize(p);
}

CMat instantaneous_smat(const ChannelSet& ch, const PhaseShifts& phi,
                        const TransmitCovariances& q, double sigma2) {
    const CMat fp = ch.H1 * phi.phi.asDiagonal();
    const Eigen::Index m = ch.H1.rows();
    CMat s = CMat::Zero(m, m);
    for (std::size_t k = 0; k < ch.H2.size(); ++k) {
        const CMat a = fp * ch.H2[k];
        s.noalias() += a * q.Q[k] * a.adjoint();
    }
    return hermitize(s / sigma2);
}

// Shared skeleton of the alternating loop. ObjectiveFn evaluates the tracked
// objective at (Q, phi, V1); the stage lambdas propose new blocks which are
// kept only when they do not lower the objective (discards are counted, not
// hidden).
class AoEngine {
public:
    AoEngine(const SystemDims& dims, const UplinkConstraints& constraints,
             const AoConfig& cfg, EngineOptions opt)
        : dims_(dims), constraints_(constraints), cfg_(cfg), opt_(opt) {}

    virtual ~AoEngine() = default;

    AoTrace run() {
        AoTrace tr;
        const double sigma2 = constraints_.link.sigma2;

        TransmitCovariances q = feasible_initial_q(dims_, constraints_);
        PhaseShifts phi;
        if (opt_.phase_stage) {
            PhaseConfig pc = cfg_.phase;
            pc.seed = cfg_.seed;
            pc.init = cfg_.phase_init;
            phi.phi = pc.init == PhaseInit::Ones
                          ? CVec::Ones(dims_.n_ris)
                          : initial_random_phase(dims_.n_ris, cfg_.seed);
        } else {
            phi = PhaseShifts::ones(dims_.n_ris);
        }

        DmaWeights xi;
        CMat v1;
        if (opt_.dma_stage) {
            xi = optimize_dma(initial_smat(q, phi), dims_, cfg_.dma_set, cfg_.dma);
            v1 = xi.V1tilde;
        } else {
            const int m = dims_.bs_elements();
            v1 = CMat::Identity(m, m);
            xi.Xi = CMat::Identity(m, m);  // placeholder, not a metasurface layout
        }

        double se_cur = objective(q, phi, v1);
        tr.se_trace.push_back(se_cur);

        for (int l = 0; l < cfg_.max_outer; ++l) {
            tr.outer_iterations = l + 1;

            {
                const auto t0 = Clock::now();
                WaterFillReport rep = covariance_stage(phi, v1);
                tr.timings.covariance_ms += ms_since(t0);
                const double se_new = objective(rep.Q_opt, phi, v1);
                if (se_new >= se_cur - accept_tol(se_cur)) {
                    q = rep.Q_opt;
                    se_cur = se_new;
                } else {
                    ++tr.stage_rejections;
                }
            }

            if (opt_.phase_stage) {
                const auto t0 = Clock::now();
                PhaseConfig pc = cfg_.phase;
                pc.seed = cfg_.seed;
                const CMat p_eff = phase_objective_matrix(q, phi, v1);
                PhaseResult pr =
                    optimize_phase(p_eff, h1(), v1, sigma2, pc, &phi.phi);
                tr.timings.phase_ms += ms_since(t0);
                const double se_new = objective(q, pr.phi, v1);
                if (se_new >= se_cur - accept_tol(se_cur)) {
                    phi = pr.phi;
                    se_cur = se_new;
                } else {
                    ++tr.stage_rejections;
                }
            }

            if (opt_.dma_stage) {
                const auto t0 = Clock::now();
                const CMat smat = combiner_objective_matrix(q, phi, v1);
                DmaWeights xi_new = optimize_dma(smat, dims_, cfg_.dma_set, cfg_.dma);
                tr.timings.dma_ms += ms_since(t0);
                const double se_new = objective(q, phi, xi_new.V1tilde);
                if (se_new >= se_cur - accept_tol(se_cur)) {
                    xi = std::move(xi_new);
                    v1 = xi.V1tilde;
                    se_cur = se_new;
                } else {
                    ++tr.stage_rejections;
                }
            }

            tr.se_trace.push_back(se_cur);
            const double prev = tr.se_trace[tr.se_trace.size() - 2];
            if (std::abs(se_cur - prev) <= cfg_.eps6) {
                tr.converged = true;
                break;
            }
        }

        tr.Q = std::move(q);
        tr.phi = std::move(phi);
        tr.Xi = std::move(xi);
        tr.final_se_bits = se_cur;
        tr.max_violation = audit_violation(tr.Q, constraints_);
        return tr;
    }

protected:
    static double accept_tol(double se) {
        return 1e-9 * std::max(1.0, std::abs(se));
    }

    static CVec initial_random_phase(int n, std::uint64_t seed) {
        // Same substream as the phase module's own initializer.
        Rng rng(substream_seed(seed, 0xfa5eu));
        CVec phi(n);
        for (int i = 0; i < n; ++i) {
            const double theta = 2.0 * M_PI * rng.uniform();
            phi(i) = cx(std::cos(theta), std::sin(theta));
        }
        return phi;
    }

    virtual const CMat& h1() const = 0;
    virtual double objective(const TransmitCovariances& q, const PhaseShifts& phi,
                             const CMat& v1) = 0;
    virtual WaterFillReport covariance_stage(const PhaseShifts& phi,
                                             const CMat& v1) = 0;
    virtual CMat phase_objective_matrix(const TransmitCovariances& q,
                                        const PhaseShifts& phi, const CMat& v1) = 0;
    virtual CMat combiner_objective_matrix(const TransmitCovariances& q,
                                           const PhaseShifts& phi,
                                           const CMat& v1) = 0;
    virtual CMat initial_smat(const TransmitCovariances& q,
                              const PhaseShifts& phi) = 0;

    SystemDims dims_;
    UplinkConstraints constraints_;
    AoConfig cfg_;
    EngineOptions opt_;
};

class FullCsiEngine : public AoEngine {
public:
    FullCsiEngine(const ChannelSet& ch, const SystemDims& dims,
                  const UplinkConstraints& constraints, const AoConfig& cfg,
                  EngineOptions opt)
        : AoEngine(dims, constraints, cfg, opt), ch_(ch) {}

protected:
    const CMat& h1() const override { return ch_.H1; }

    double objective(const TransmitCovariances& q, const PhaseShifts& phi,
                     const CMat& v1) override {
        return evaluate_se_full(q, phi, v1, ch_, constraints_.link.sigma2);
    }

    WaterFillReport covariance_stage(const PhaseShifts& phi,
                                     const CMat& v1) override {
        return solve_full_csi(ch_, phi, v1, constraints_, cfg_.cov);
    }

    CMat phase_objective_matrix(const TransmitCovariances& q, const PhaseShifts&,
                                const CMat&) override {
        return instantaneous_p(ch_, q);
    }

    CMat combiner_objective_matrix(const TransmitCovariances& q,
                                   const PhaseShifts& phi, const CMat&) override {
        return instantaneous_smat(ch_, phi, q, constraints_.link.sigma2);
    }

    CMat initial_smat(const TransmitCovariances& q, const PhaseShifts& phi) override {
        return instantaneous_smat(ch_, phi, q, constraints_.link.sigma2);
    }

private:
    const ChannelSet& ch_;
};

class PartialCsiEngine : public AoEngine {
public:
    PartialCsiEngine(const ChannelStatistics& stats, const SystemDims& dims,
                     const CMat& h1, const UplinkConstraints& constraints,
                     const AoConfig& cfg, EngineOptions opt)
        : AoEngine(dims, constraints, cfg, opt), stats_(stats), h1_(h1) {}

protected:
    const CMat& h1() const override { return h1_; }

    DeState refresh(const TransmitCovariances& q, const PhaseShifts& phi,
                    const CMat& v1) {
        const std::vector<CMat> u_g = effective_mode_matrices(stats_, h1_, phi, v1);
        DeState st = de_fixed_point(q, stats_, u_g, constraints_.link.sigma2,
                                    cfg_.cov.de, warm_psi_.empty() ? nullptr : &warm_psi_);
        warm_psi_ = st.psi;
        return st;
    }

    double objective(const TransmitCovariances& q, const PhaseShifts& phi,
                     const CMat& v1) override {
        const DeState st = refresh(q, phi, v1);
        return de_se(st, q, stats_, constraints_.link.sigma2);
    }

    WaterFillReport covariance_stage(const PhaseShifts& phi,
                                     const CMat& v1) override {
        WaterFillReport rep = solve_partial_csi(
            stats_, h1_, phi, v1, constraints_, cfg_.cov,
            warm_psi_.empty() ? nullptr : &warm_psi_);
        if (!rep.de_psi.empty()) warm_psi_ = rep.de_psi;
        return rep;
    }

    CMat phase_objective_matrix(const TransmitCovariances& q, const PhaseShifts& phi,
                                const CMat& v1) override {
        const DeState st = refresh(q, phi, v1);
        return effective_p_tilde(st, stats_, constraints_.link.sigma2);
    }

    CMat combiner_objective_matrix(const TransmitCovariances& q,
                                   const PhaseShifts& phi, const CMat& v1) override {
        const DeState st = refresh(q, phi, v1);
        return effective_s_tilde(st, stats_, h1_, phi);
    }

    CMat initial_smat(const TransmitCovariances& q, const PhaseShifts& phi) override {
        const int m = dims_.bs_elements();
        std::vector<RVec> psi_ones;
        for (int k = 0; k < dims_.num_users; ++k) {
            psi_ones.push_back(RVec::Ones(dims_.num_antennas[k]));
        }
        // Before any combiner exists the refresh cannot run (U_G needs V1);
        // seed the initial weight fit with the psi = 1 surrogate.
        DeState st;
        st.psi = psi_ones;
        (void)q;
        return effective_s_tilde(st, stats_, h1_, phi);
    }

private:
    const ChannelStatistics& stats_;
    const CMat& h1_;
    std::vector<RVec> warm_psi_;
};

AoTrace run_engine(const Scenario& sc, const UplinkConstraints& constraints,
                   const AoConfig& cfg_in, EngineOptions opt) {
    AoConfig cfg = cfg_in;
    cfg.sync();
    if (cfg.csi_mode == CsiMode::Full) {
        FullCsiEngine eng(sc.ch, sc.dims, constraints, cfg, opt);
        return eng.run();
    }
    PartialCsiEngine eng(sc.stats, sc.dims, sc.ch.H1, constraints, cfg, opt);
    return eng.run();
}

}  // namespace

std::string to_string(CsiMode mode) {
    return mode == CsiMode::Full ? "full" : "partial";
}

void AoConfig::sync() {
    phase.eps_mm = eps1;
    phase.eps_bcd = eps2;
    phase.init = phase_init;
    phase.seed = seed;
    dma.eps_fit = eps3;
    cov.de.eps_fixed_point = eps4;
    cov.eps_inner_ao = eps5;
}

AoTrace ao_full_csi(const ChannelSet& ch, const SystemDims& dims,
                    const UplinkConstraints& constraints, const AoConfig& cfg_in) {
    AoConfig cfg = cfg_in;
    cfg.sync();
    FullCsiEngine eng(ch, dims, constraints, cfg, EngineOptions{});
    return eng.run();
}

AoTrace ao_partial_csi(const ChannelStatistics& stats, const SystemDims& dims,
                       const CMat& h1, const UplinkConstraints& constraints,
                       const AoConfig& cfg_in) {
    AoConfig cfg = cfg_in;
    cfg.sync();
    PartialCsiEngine eng(stats, dims, h1, constraints, cfg, EngineOptions{});
    return eng.run();
}

AoTrace run_proposed(const Scenario& sc, const UplinkConstraints& constraints,
                     const AoConfig& cfg) {
    return run_engine(sc, constraints, cfg, EngineOptions{});
}

AoTrace run_no_ris(const Scenario& sc, const UplinkConstraints& constraints,
                   const AoConfig& cfg) {
    EngineOptions opt;
    opt.phase_stage = false;
    return run_engine(sc, constraints, cfg, opt);
}

AoTrace baseline_worst_case(const Scenario& sc, const UplinkConstraints& constraints,
                            const AoConfig& cfg) {
    double rho1 = 1.0;
    for (std::size_t k = 0; k < constraints.sar.R.size(); ++k) {
        for (std::size_t i = 0; i < constraints.sar.R[k].size(); ++i) {
            const double worst =
                constraints.link.Pmax[k] * max_eigenvalue(constraints.sar.R[k][i]);
            if (worst > 0.0) {
                rho1 = std::min(rho1, constraints.sar.D[k][i] / worst);
            }
        }
    }
    rho1 = std::min(rho1, 1.0);

    UplinkConstraints shrunk = drop_sar(constraints);
    for (double& p : shrunk.link.Pmax) p *= rho1;
    AoTrace tr = run_engine(sc, shrunk, cfg, EngineOptions{});
    tr.max_violation = audit_violation(tr.Q, constraints);
    return tr;
}

AoTrace baseline_adaptive(const Scenario& sc, const UplinkConstraints& constraints,
                          const AoConfig& cfg) {
    AoTrace tr = run_engine(sc, drop_sar(constraints), cfg, EngineOptions{});

    for (std::size_t k = 0; k < tr.Q.Q.size(); ++k) {
        double rho2 = 1.0;
        for (std::size_t i = 0; i < constraints.sar.R[k].size(); ++i) {
            const double exposure = sar_value(tr.Q.Q[k], constraints.sar.R[k][i]);
            if (exposure > 0.0) {
                rho2 = std::min(rho2, constraints.sar.D[k][i] / exposure);
            }
        }
        rho2 = std::min(rho2, 1.0);
        tr.Q.Q[k] *= rho2;
    }

    AoConfig cfg_eval = cfg;
    cfg_eval.sync();
    if (cfg.csi_mode == CsiMode::Full) {
        tr.final_se_bits = evaluate_se_full(
            tr.Q, tr.phi,
            tr.Xi.factors_valid
                ? tr.Xi.V1tilde
                : CMat(CMat::Identity(sc.dims.bs_elements(), sc.dims.bs_elements())),
            sc.ch, constraints.link.sigma2);
    } else {
        const CMat v1 = tr.Xi.factors_valid
                            ? tr.Xi.V1tilde
                            : CMat(CMat::Identity(sc.dims.bs_elements(),
                                                  sc.dims.bs_elements()));
        const std::vector<CMat> u_g =
            effective_mode_matrices(sc.stats, sc.ch.H1, tr.phi, v1);
        const DeState st = de_fixed_point(tr.Q, sc.stats, u_g,
                                          constraints.link.sigma2, cfg_eval.cov.de);
        tr.final_se_bits = de_se(st, tr.Q, sc.stats, constraints.link.sigma2);
    }
    tr.se_trace.push_back(tr.final_se_bits);
    tr.max_violation = audit_violation(tr.Q, constraints);
    return tr;
}

AoTrace run_conventional(const Scenario& sc, const UplinkConstraints& constraints,
                         const AoConfig& cfg) {
    EngineOptions opt;
    opt.dma_stage = false;
    return run_engine(sc, constraints, cfg, opt);
}

}  // namespace risdma
