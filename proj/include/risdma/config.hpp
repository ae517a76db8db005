// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <iosfwd>
#include <string>

#include "risdma/ao.hpp"
#include "risdma/channel.hpp"

namespace risdma {

enum class ExperimentId {
    Convergence,
    SeVsPower,
    RisAblation,
    DmaSets,
    Baselines,
    DeAccuracy,
};

std::string to_string(ExperimentId id);

/// Everything one benchmark invocation needs: experiment family, sweep
/// grids, scenario dimensions and statistics knobs, seeds, solver
/// overrides, and the output location.
struct ExperimentSpec {
    ExperimentId experiment = ExperimentId::SeVsPower;
    std::vector<double> pmax_dbm;
    std::vector<double> sar_budget_wkg;
    SystemDims dims;
    double noise_dbm = -96.0;
    double pathloss_db = 120.0;
    double h1_pathloss_db = 60.0;  ///< this hop's share; the user hop gets the rest
    double omega_row_decay = 0.9;
    double omega_col_decay = 0.75;
    int num_seeds = 10;
    std::uint64_t seed_base = 1;
    int mc_samples = 10000;
    AoConfig ao;
    std::string out = "results";

    double sigma2() const { return dbm_to_watt(noise_dbm); }
    double h2_pathloss_db() const { return pathloss_db - h1_pathloss_db; }

    void validate() const;  ///< throws std::invalid_argument on breach
};

/// Defaults: the reference simulation setup (K=4 users with 4 antennas,
/// 16 surface elements, 8 microstrips of 8 elements, -96 dBm noise, 120 dB
/// path loss, one 0.8 W/kg exposure constraint per user, power sweep
/// -10..40 dBm in 5 dBm steps).
ExperimentSpec default_spec();

/// Parse the flat key = value format. Unknown keys, malformed values, and
/// invariant breaches raise std::invalid_argument with the offending line
/// number.
ExperimentSpec load_config(const std::string& path);
ExperimentSpec parse_config(std::istream& in, const std::string& origin);

/// Emit a config that load_config parses back to an identical spec.
std::string serialize_config(const ExperimentSpec& spec);

/// Scenario pieces derived from a spec.
ChannelStatistics spec_stats(const ExperimentSpec& spec);
UplinkConstraints spec_constraints(const ExperimentSpec& spec, double pmax_watt,
                                   double sar_budget);

}  // namespace risdma
