// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/experiments.hpp"

#include <atomic>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "risdma/rng.hpp"
#include "risdma/se.hpp"

namespace risdma {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RunTask {
    std::uint64_t seed = 0;
    double pmax_dbm = 0.0;
    double sar_budget = 0.8;
    std::string variant;
};

AoTrace dispatch_variant(const std::string& variant, const Scenario& sc,
                         const UplinkConstraints& c, const AoConfig& cfg) {
    if (variant == "proposed" || variant == "optimized_ris") {
        return run_proposed(sc, c, cfg);
    }
    if (variant == "no_ris") return run_no_ris(sc, c, cfg);
    if (variant == "adaptive") return baseline_adaptive(sc, c, cfg);
    if (variant == "worst_case") return baseline_worst_case(sc, c, cfg);
    if (variant == "conventional") return run_conventional(sc, c, cfg);
    if (variant == "UC" || variant == "AO" || variant == "BA" || variant == "LP") {
        AoConfig cv = cfg;
        if (variant == "UC") cv.dma_set = FeasibleSet::uc();
        if (variant == "AO") cv.dma_set = FeasibleSet::amplitude();
        if (variant == "BA") cv.dma_set = FeasibleSet::binary();
        if (variant == "LP") cv.dma_set = FeasibleSet::lorentzian();
        return run_proposed(sc, c, cv);
    }
    throw std::invalid_argument("unknown variant '" + variant + "'");
}

std::vector<std::string> variants_for(ExperimentId id) {
    switch (id) {
        case ExperimentId::Convergence: return {"proposed"};
        case ExperimentId::SeVsPower: return {"proposed"};
        case ExperimentId::RisAblation: return {"optimized_ris", "no_ris"};
        case ExperimentId::DmaSets:
            return {"UC", "AO", "BA", "LP", "conventional"};
        case ExperimentId::Baselines:
            return {"proposed", "adaptive", "worst_case"};
        case ExperimentId::DeAccuracy: return {};
    }
    return {};
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& body) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    ExperimentOutput out;
    if (spec.experiment == ExperimentId::DeAccuracy) {
        out.de_rows = de_accuracy_report(spec);
        return out;
    }

    const ChannelStatistics stats = spec_stats(spec);
    const std::vector<std::string> variants = variants_for(spec.experiment);

    std::vector<RunTask> tasks;
    for (int sidx = 0; sidx < spec.num_seeds; ++sidx) {
        const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(sidx);
        for (double d : spec.sar_budget_wkg) {
            for (double p : spec.pmax_dbm) {
                for (const auto& v : variants) {
                    tasks.push_back({seed, p, d, v});
                }
            }
        }
    }

    out.rows.resize(tasks.size());
    std::vector<std::vector<TraceRow>> traces(tasks.size());

    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const RunTask& t = tasks[i];
        ResultRow row;
        row.experiment = to_string(spec.experiment);
        row.seed = t.seed;
        row.pmax_dbm = t.pmax_dbm;
        row.sar_budget_wkg = t.sar_budget;
        row.csi_mode = to_string(spec.ao.csi_mode);
        row.dma_set = (t.variant == "AO" || t.variant == "BA" || t.variant == "LP" ||
                       t.variant == "UC")
                          ? t.variant
                          : to_string(spec.ao.dma_set.tag);
        row.variant = t.variant;
        try {
            Scenario sc;
            sc.dims = spec.dims;
            sc.stats = stats;
            sc.ch = generate_channels(stats, spec.dims, H1Spec{spec.h1_pathloss_db},
                                      t.seed);
            const UplinkConstraints c =
                spec_constraints(spec, dbm_to_watt(t.pmax_dbm), t.sar_budget);
            AoConfig cfg = spec.ao;
            cfg.seed = t.seed;
            const AoTrace tr = dispatch_variant(t.variant, sc, c, cfg);
            row.se_bits = tr.final_se_bits;
            row.outer_iterations = tr.outer_iterations;
            row.converged = tr.converged;
            if (spec.experiment == ExperimentId::Convergence) {
                for (std::size_t it = 0; it < tr.se_trace.size(); ++it) {
                    traces[i].push_back({row.experiment, t.seed, t.pmax_dbm,
                                         row.csi_mode, static_cast<int>(it),
                                         tr.se_trace[it]});
                }
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        out.rows[i] = std::move(row);
    });

    for (auto& tr : traces) {
        out.traces.insert(out.traces.end(), tr.begin(), tr.end());
    }
    return out;
}

std::vector<DeAccuracyRow> de_accuracy_report(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<DeAccuracyRow> rows;

    // Dimension ladder: half the reference size, the reference size, double.
    std::vector<std::pair<int, int>> ladder = {
        {std::max(2, spec.dims.n_ris / 2), std::max(1, spec.dims.num_antennas[0] / 2)},
        {spec.dims.n_ris, spec.dims.num_antennas[0]},
        {spec.dims.n_ris * 2, spec.dims.num_antennas[0] * 2},
    };

    for (const auto& [n_ris, n_k] : ladder) {
        SystemDims dims = spec.dims;
        dims.n_ris = n_ris;
        dims.num_antennas.assign(dims.num_users, n_k);
        const ChannelStatistics stats =
            make_default_stats(dims, spec.h2_pathloss_db(), spec.omega_row_decay,
                               spec.omega_col_decay);
        for (int sidx = 0; sidx < spec.num_seeds; ++sidx) {
            const std::uint64_t seed =
                spec.seed_base + static_cast<std::uint64_t>(sidx);
            const CMat h1 = make_h1(dims, H1Spec{spec.h1_pathloss_db}, seed);

            // Operating point: uniform diagonal covariances at the midpoint
            // of the power grid, seeded phases, unconstrained weight fit.
            const double pmax =
                dbm_to_watt(spec.pmax_dbm[spec.pmax_dbm.size() / 2]);
            TransmitCovariances q;
            for (int k = 0; k < dims.num_users; ++k) {
                q.Q.push_back(pmax / n_k * CMat::Identity(n_k, n_k));
            }
            Rng rng(substream_seed(seed, 0xde5eedu));
            CVec phiv(dims.n_ris);
            for (int i = 0; i < dims.n_ris; ++i) {
                const double th = 2.0 * M_PI * rng.uniform();
                phiv(i) = cx(std::cos(th), std::sin(th));
            }
            PhaseShifts phi;
            phi.phi = phiv;
            CMat smat = CMat::Zero(dims.bs_elements(), dims.bs_elements());
            {
                const ChannelSet ch =
                    generate_channels(stats, dims, H1Spec{spec.h1_pathloss_db}, seed);
                const CMat fp = h1 * phi.phi.asDiagonal();
                for (int k = 0; k < dims.num_users; ++k) {
                    const CMat a = fp * ch.H2[k];
                    smat.noalias() += a * q.Q[k] * a.adjoint();
                }
            }
            const CMat v1 = unconstrained_v1(hermitize(smat), dims.n_strips);

            const std::vector<CMat> u_g =
                effective_mode_matrices(stats, h1, phi, v1);
            DeConfig de_cfg;
            de_cfg.eps_fixed_point = spec.ao.eps4;
            const DeState st = de_fixed_point(q, stats, u_g, spec.sigma2(), de_cfg);
            const double de_bits = de_se(st, q, stats, spec.sigma2());
            const MonteCarloSe mc = monte_carlo_ergodic_se(
                stats, dims, h1, q, phi, v1, spec.sigma2(), spec.mc_samples, seed);

            DeAccuracyRow row;
            row.seed = seed;
            row.n_ris = n_ris;
            row.n_antennas = n_k;
            row.de_bits = de_bits;
            row.mc_bits = mc.mean_bits;
            row.mc_std_error = mc.std_error;
            row.rel_gap = mc.mean_bits != 0.0
                              ? std::abs(de_bits - mc.mean_bits) / std::abs(mc.mean_bits)
                              : std::abs(de_bits);
            rows.push_back(row);
        }
    }
    return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << kResultsHeader << "\n";
    for (const auto& r : rows) {
        os << kSchemaVersion << ',' << r.experiment << ',' << r.seed << ','
           << fmt(r.pmax_dbm) << ',' << fmt(r.sar_budget_wkg) << ',' << r.csi_mode
           << ',' << r.dma_set << ',' << r.variant << ',' << fmt(r.se_bits) << ','
           << r.outer_iterations << ',' << (r.converged ? 1 : 0) << ','
           << '"' << r.error << '"' << "\n";
    }
    return os.str();
}

std::string traces_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream os;
    os << kTraceHeader << "\n";
    for (const auto& r : rows) {
        os << kSchemaVersion << ',' << r.experiment << ',' << r.seed << ','
           << fmt(r.pmax_dbm) << ',' << r.csi_mode << ',' << r.iteration << ','
           << fmt(r.se_bits) << "\n";
    }
    return os.str();
}

std::string de_accuracy_csv(const std::vector<DeAccuracyRow>& rows) {
    std::ostringstream os;
    os << kDeAccuracyHeader << "\n";
    for (const auto& r : rows) {
        os << kSchemaVersion << ",de_accuracy," << r.seed << ',' << r.n_ris << ','
           << r.n_antennas << ',' << fmt(r.de_bits) << ',' << fmt(r.mc_bits) << ','
           << fmt(r.mc_std_error) << ',' << fmt(r.rel_gap) << "\n";
    }
    return os.str();
}

}  // namespace risdma
