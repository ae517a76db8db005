// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/dma.hpp"

#include <cmath>
#include <stdexcept>

namespace risdma {

namespace {

// Entrywise projection of T onto the block structure and feasible set:
// entry (s, s*L + l) projects into the set, everything off-block is zero.
// For the binary set an all-off strip would kill its output entirely and
// leave the weight matrix rank deficient, so each strip keeps at least one
// active element (the one costing the least residual). The restricted set
// still contains the previous iterate, which preserves the descent property
// of the alternating fit.
CMat project_blocks(const CMat& t, const SystemDims& dims, const FeasibleSet& set) {
    const int s_cnt = dims.n_strips;
    const int l_cnt = dims.elements_per_strip;
    CMat xi = CMat::Zero(s_cnt, dims.bs_elements());
    for (int s = 0; s < s_cnt; ++s) {
        for (int l = 0; l < l_cnt; ++l) {
            const int c = s * l_cnt + l;
            xi(s, c) = project_entry(t(s, c), set);
        }
        if (set.tag == DmaSet::BA &&
            xi.row(s).segment(s * l_cnt, l_cnt).cwiseAbs().maxCoeff() == 0.0) {
            int best = 0;
            double best_re = t(s, s * l_cnt).real();
            for (int l = 1; l < l_cnt; ++l) {
                const double re = t(s, s * l_cnt + l).real();
                if (re > best_re) {
                    best_re = re;
                    best = l;
                }
            }
            xi(s, s * l_cnt + best) = cx(set.level, 0.0);
        }
    }
    return xi;
}

double frob_sq(const CMat& a) { return a.squaredNorm(); }

double on_block_gap(const CMat& xi, const CMat& t, const SystemDims& dims) {
    double acc = 0.0;
    const int l_cnt = dims.elements_per_strip;
    for (int s = 0; s < dims.n_strips; ++s) {
        for (int l = 0; l < l_cnt; ++l) {
            const int c = s * l_cnt + l;
            acc += std::norm(xi(s, c) - t(s, c));
        }
    }
    return acc;
}

}  // namespace

FeasibleSet FeasibleSet::amplitude(double lo, double hi) {
    FeasibleSet f;
    f.tag = DmaSet::AO;
    f.amp_lo = lo;
    f.amp_hi = hi;
    f.validate();
    return f;
}

FeasibleSet FeasibleSet::binary(double level) {
    FeasibleSet f;
    f.tag = DmaSet::BA;
    f.level = level;
    f.validate();
    return f;
}

FeasibleSet FeasibleSet::tagged(DmaSet tag) {
    switch (tag) {
        case DmaSet::UC: return uc();
        case DmaSet::AO: return amplitude();
        case DmaSet::BA: return binary();
        case DmaSet::LP: return lorentzian();
    }
    return uc();
}

void FeasibleSet::validate() const {
    if (tag == DmaSet::AO && !(0.0 < amp_lo && amp_lo < amp_hi)) {
        throw std::invalid_argument("amplitude interval requires 0 < lo < hi");
    }
    if (tag == DmaSet::BA && !(level > 0.0)) {
        throw std::invalid_argument("binary amplitude level must be positive");
    }
}

cx project_entry(cx t, const FeasibleSet& set) {
    switch (set.tag) {
        case DmaSet::UC:
            return t;
        case DmaSet::AO:
            return cx(std::min(std::max(t.real(), set.amp_lo), set.amp_hi), 0.0);
        case DmaSet::BA: {
            const double d0 = std::abs(t);
            const double dc = std::abs(t - cx(set.level, 0.0));
            // Tie goes to the active level.
            return dc <= d0 ? cx(set.level, 0.0) : cx(0.0, 0.0);
        }
        case DmaSet::LP: {
            const cx center(0.0, 0.5);
            const cx d = t - center;
            if (std::abs(d) == 0.0) {
                return center + cx(0.5, 0.0);  // any circle point; pick phase 0
            }
            return center + 0.5 * d / std::abs(d);
        }
    }
    return t;
}

CMat unconstrained_v1(const CMat& smat, int n_strips) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(smat));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("unconstrained_v1: eigendecomposition failed");
    }
    const Eigen::Index m = smat.rows();
    CMat v1(m, n_strips);
    for (int c = 0; c < n_strips; ++c) {
        v1.col(c) = es.eigenvectors().col(m - 1 - c);  // descending eigenvalues
        Eigen::Index lead = 0;
        const double vmax = v1.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < m; ++r) {
            if (std::abs(v1(r, c)) > 1e-12 * vmax) {
                lead = r;
                break;
            }
        }
        const cx pivot = v1(lead, c);
        if (std::abs(pivot) > 0.0) v1.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
    return v1;
}

CMat procrustes_u1(const CMat& xi, const CMat& t1) {
    const CMat cross = xi * t1.adjoint();
    Eigen::JacobiSVD<CMat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

RVec diagonal_xi(const CMat& t2, const CMat& v1tilde, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("diagonal_xi: delta must be > 0");
    const Eigen::Index s = v1tilde.cols();
    RVec x(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        const double num = std::real(t2.col(i).dot(v1tilde.col(i)));
        const double den = v1tilde.col(i).squaredNorm();
        x(i) = std::max(num / den, delta);
    }
    return x;
}

DmaFitReport fit_constrained(const CMat& v1tilde_opt, const SystemDims& dims,
                             const FeasibleSet& set, const DmaConfig& cfg) {
    set.validate();
    const int s_cnt = dims.n_strips;

    DmaFitReport rep;
    CMat u1 = CMat::Identity(s_cnt, s_cnt);
    RVec xt = RVec::Ones(s_cnt);

    CMat target = u1 * xt.asDiagonal() * v1tilde_opt.adjoint();
    CMat xi = project_blocks(target, dims, set);
    rep.residual_trace.push_back(frob_sq(xi - target));

    CMat xi_prev = xi;
    for (int p = 0; p < cfg.max_iterations; ++p) {
        const CMat t1 = xt.asDiagonal() * v1tilde_opt.adjoint();
        u1 = procrustes_u1(xi, t1);
        rep.residual_trace.push_back(frob_sq(xi - u1 * t1));

        const CMat t2 = xi.adjoint() * u1;
        xt = diagonal_xi(t2, v1tilde_opt, cfg.delta);
        target = u1 * xt.asDiagonal() * v1tilde_opt.adjoint();
        rep.residual_trace.push_back(frob_sq(xi - target));

        xi = project_blocks(target, dims, set);
        rep.residual_trace.push_back(frob_sq(xi - target));

        rep.iterations = p + 1;
        const double change = frob_sq(xi - xi_prev);
        xi_prev = xi;
        if (change <= cfg.eps_fit) {
            rep.converged = true;
            break;
        }
    }

    rep.on_block_residual = on_block_gap(xi, target, dims);
    rep.weights.Xi = std::move(xi);
    rep.weights.set_tag = set.tag;
    return rep;
}

DmaWeights optimize_dma(const CMat& smat, const SystemDims& dims,
                        const FeasibleSet& set, const DmaConfig& cfg) {
    const CMat v1_opt = unconstrained_v1(smat, dims.n_strips);
    DmaFitReport rep = fit_constrained(v1_opt, dims, set, cfg);
    refresh_svd_factors(rep.weights);
    return rep.weights;
}

void refresh_svd_factors(DmaWeights& w) {
    CompactSvd svd = compact_svd_right_factor(w.Xi);
    w.U1 = std::move(svd.U1);
    w.xi_tilde = std::move(svd.singular_values);
    w.V1tilde = std::move(svd.V1);
    w.factors_valid = true;
}

}  // namespace risdma
