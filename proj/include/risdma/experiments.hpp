// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <optional>

#include "risdma/config.hpp"

namespace risdma {

/// One benchmark outcome. Failed runs carry the error text and keep the
/// remaining fields at their defaults.
struct ResultRow {
    std::string experiment;
    std::uint64_t seed = 0;
    double pmax_dbm = 0.0;
    double sar_budget_wkg = 0.0;
    std::string csi_mode;
    std::string dma_set;
    std::string variant;
    double se_bits = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    std::string error;
};

/// Per-iteration objective values of convergence runs.
struct TraceRow {
    std::string experiment;
    std::uint64_t seed = 0;
    double pmax_dbm = 0.0;
    std::string csi_mode;
    int iteration = 0;
    double se_bits = 0.0;
};

/// Row of the approximation-accuracy study.
struct DeAccuracyRow {
    std::uint64_t seed = 0;
    int n_ris = 0;
    int n_antennas = 0;
    double de_bits = 0.0;
    double mc_bits = 0.0;
    double mc_std_error = 0.0;
    double rel_gap = 0.0;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<TraceRow> traces;        ///< convergence experiment only
    std::vector<DeAccuracyRow> de_rows;  ///< de_accuracy experiment only
};

inline constexpr const char* kResultsHeader =
    "schema_version,experiment,seed,pmax_dbm,sar_budget_wkg,csi_mode,dma_set,"
    "variant,se_bits_per_hz,outer_iterations,converged,error";
inline constexpr const char* kTraceHeader =
    "schema_version,experiment,seed,pmax_dbm,csi_mode,iteration,se_bits_per_hz";
inline constexpr const char* kDeAccuracyHeader =
    "schema_version,experiment,seed,n_ris,n_antennas,de_bits_per_hz,"
    "mc_bits_per_hz,mc_std_error,rel_gap";
inline constexpr int kSchemaVersion = 1;

/// Run every (seed, grid point, variant) combination of the spec across
/// `jobs` workers; row order is deterministic regardless of scheduling.
ExperimentOutput run_experiment(const ExperimentSpec& spec, int jobs = 1);

/// Deterministic-vs-sampled accuracy table over a dimension ladder.
std::vector<DeAccuracyRow> de_accuracy_report(const ExperimentSpec& spec);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string traces_csv(const std::vector<TraceRow>& rows);
std::string de_accuracy_csv(const std::vector<DeAccuracyRow>& rows);

}  // namespace risdma
