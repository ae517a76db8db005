// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <cstdint>

#include "risdma/covariance.hpp"
#include "risdma/dma.hpp"
#include "risdma/phase.hpp"

namespace risdma {

enum class CsiMode { Full, Partial };

std::string to_string(CsiMode mode);

/// Thresholds and caps of the overall alternating optimization. eps1/eps2
/// drive the phase design inner/outer loops, eps3 the weight fitting,
/// eps4 the fixed-point refresh, eps5 the covariance stage with statistical
/// CSI, and eps6 the outer loop.
struct AoConfig {
    double eps1 = 1e-6;
    double eps2 = 1e-6;
    double eps3 = 1e-8;
    double eps4 = 1e-10;
    double eps5 = 1e-6;
    double eps6 = 1e-5;
    int max_outer = 50;
    std::uint64_t seed = 1;
    CsiMode csi_mode = CsiMode::Full;
    FeasibleSet dma_set = FeasibleSet::uc();
    PhaseInit phase_init = PhaseInit::SeededRandom;

    CovConfig cov;      ///< covariance-stage settings (eps4/eps5 mirrored in)
    PhaseConfig phase;  ///< phase-stage settings (eps1/eps2 mirrored in)
    DmaConfig dma;      ///< weight-fit settings (eps3 mirrored in)

    /// Copy the shared thresholds into the per-stage configs.
    void sync();
};

struct StageTimings {
    double covariance_ms = 0.0;
    double phase_ms = 0.0;
    double dma_ms = 0.0;
};

/// Outcome of one alternating-optimization run. se_trace holds the tracked
/// objective (exact SE for instantaneous CSI, the asymptotic approximation
/// for statistical CSI) in bits/s/Hz per outer iteration, starting with the
/// value at the initial point.
struct AoTrace {
    std::vector<double> se_trace;
    StageTimings timings;
    bool converged = false;
    int outer_iterations = 0;
    int stage_rejections = 0;  ///< stage proposals discarded for lowering the objective
    double max_violation = 0.0;
    TransmitCovariances Q;
    PhaseShifts phi;
    DmaWeights Xi;
    double final_se_bits = 0.0;
};

/// Joint design with instantaneous CSI: cycle covariance, phase, and weight
/// stages until the SE settles.
AoTrace ao_full_csi(const ChannelSet& ch, const SystemDims& dims,
                    const UplinkConstraints& constraints, const AoConfig& cfg);

/// Joint design with statistical CSI of the user channels: the same cycle
/// driven by the asymptotic objective, with parameter refreshes between
/// stages.
AoTrace ao_partial_csi(const ChannelStatistics& stats, const SystemDims& dims,
                       const CMat& h1, const UplinkConstraints& constraints,
                       const AoConfig& cfg);

/// Everything a run variant needs; full mode reads ch, partial reads
/// (stats, ch.H1).
struct Scenario {
    SystemDims dims;
    ChannelStatistics stats;
    ChannelSet ch;
};

/// Proposed design (exposure-aware) in the configured CSI mode.
AoTrace run_proposed(const Scenario& sc, const UplinkConstraints& constraints,
                     const AoConfig& cfg);

/// Phase stage skipped, reflection pinned to all-ones.
AoTrace run_no_ris(const Scenario& sc, const UplinkConstraints& constraints,
                   const AoConfig& cfg);

/// Uniform-power backoff against the worst-case exposure: shrink every
/// budget by rho1 = min(1, D / max_k Pmax_k lambda_max(R_k)) and drop the
/// exposure constraints.
AoTrace baseline_worst_case(const Scenario& sc, const UplinkConstraints& constraints,
                            const AoConfig& cfg);

/// Power-only design rescaled per user by rho2_k = min(1, D / tr(R Q0_k)).
AoTrace baseline_adaptive(const Scenario& sc, const UplinkConstraints& constraints,
                          const AoConfig& cfg);

/// Full-array receiver with one chain per element (no metasurface
/// projection, no weight stage).
AoTrace run_conventional(const Scenario& sc, const UplinkConstraints& constraints,
                         const AoConfig& cfg);

}  // namespace risdma
