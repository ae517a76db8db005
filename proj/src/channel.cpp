// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include "risdma/channel.hpp"

#include <cmath>

#include "risdma/rng.hpp"

namespace risdma {

namespace {
constexpr std::uint64_t kH1Stream = 0xa11ce0fu;

// Column-major fill keeps draws independent of Eigen expression evaluation
// order.
CMat random_cgauss(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    CMat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            m(r, c) = rng.cnormal();
        }
    }
    return m;
}
}  // namespace

RMat default_coupling_profile(int n_ris, int n_antennas, double row_decay,
                              double col_decay) {
    RMat omega(n_ris, n_antennas);
    for (int i = 0; i < n_ris; ++i) {
        for (int j = 0; j < n_antennas; ++j) {
            omega(i, j) = std::pow(row_decay, i) * std::pow(col_decay, j);
        }
    }
    omega *= static_cast<double>(n_ris) * static_cast<double>(n_antennas) /
             omega.sum();
    return omega;
}

ChannelStatistics make_default_stats(const SystemDims& dims, double h2_pathloss_db,
                                     double row_decay, double col_decay) {
    dims.validate();
    const double gain = std::pow(10.0, -h2_pathloss_db / 10.0);
    ChannelStatistics stats;
    const CMat u = dft_matrix(dims.n_ris);
    for (int k = 0; k < dims.num_users; ++k) {
        stats.U2.push_back(u);
        stats.V2.push_back(dft_matrix(dims.num_antennas[k]));
        stats.Omega2.push_back(
            gain * default_coupling_profile(dims.n_ris, dims.num_antennas[k],
                                            row_decay, col_decay));
    }
    return stats;
}

CMat make_h1(const SystemDims& dims, const H1Spec& spec, std::uint64_t seed) {
    Rng rng(substream_seed(seed, kH1Stream));
    const double amp = std::pow(10.0, -spec.pathloss_db / 20.0);
    return amp * random_cgauss(dims.bs_elements(), dims.n_ris, rng);
}

std::vector<CMat> sample_h2(const ChannelStatistics& stats, const SystemDims& dims,
                            std::uint64_t seed) {
    stats.validate(dims);
    std::vector<CMat> h2;
    h2.reserve(dims.num_users);
    for (int k = 0; k < dims.num_users; ++k) {
        Rng rng(substream_seed(seed, 1 + static_cast<std::uint64_t>(k)));
        CMat w = random_cgauss(dims.n_ris, dims.num_antennas[k], rng);
        const RMat amp = stats.Omega2[k].cwiseSqrt();
        w = w.cwiseProduct(amp.cast<cx>());
        h2.push_back(stats.U2[k] * w * stats.V2[k].adjoint());
    }
    return h2;
}

ChannelSet generate_channels(const ChannelStatistics& stats, const SystemDims& dims,
                             const H1Spec& h1_spec, std::uint64_t seed) {
    ChannelSet ch;
    ch.H1 = make_h1(dims, h1_spec, seed);
    ch.H2 = sample_h2(stats, dims, seed);
    return ch;
}

}  // namespace risdma
