// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <cstdint>

#include "risdma/types.hpp"

namespace risdma {

/// Generation recipe for the static surface-to-array channel H1: seeded
/// complex Gaussian entries attenuated by this hop's share of the path loss.
struct H1Spec {
    double pathloss_db = 60.0;
};

/// Exponentially decaying eigenmode coupling profile, normalized so the sum
/// of entries equals n_ris * n_antennas (unit mean variance before any
/// large-scale attenuation is applied).
RMat default_coupling_profile(int n_ris, int n_antennas, double row_decay = 0.9,
                              double col_decay = 0.75);

/// DFT eigenmode bases with the default coupling profile scaled by the
/// user-hop attenuation (power factor 10^(-h2_pathloss_db/10)).
ChannelStatistics make_default_stats(const SystemDims& dims,
                                     double h2_pathloss_db = 60.0,
                                     double row_decay = 0.9,
                                     double col_decay = 0.75);

/// Deterministic H1 given (dims, spec, seed).
CMat make_h1(const SystemDims& dims, const H1Spec& spec, std::uint64_t seed);

/// One draw of the user-to-surface channels: H2[k] = U2 (sqrt(Omega) .* W) V2^H
/// with W iid CN(0,1); user substreams are independent.
std::vector<CMat> sample_h2(const ChannelStatistics& stats, const SystemDims& dims,
                            std::uint64_t seed);

/// H1 plus one H2 draw; bit-identical for identical inputs.
ChannelSet generate_channels(const ChannelStatistics& stats, const SystemDims& dims,
                             const H1Spec& h1_spec, std::uint64_t seed);

}  // namespace risdma
