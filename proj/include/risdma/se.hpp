// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#pragma once

#include <cstdint>

#include "risdma/types.hpp"

namespace risdma {

/// Effective user channels G_k = V1tilde^H H1 Phi H2_k.
std::vector<CMat> effective_channels(const ChannelSet& ch, const PhaseShifts& phi,
                                     const CMat& v1tilde);

/// Spectral efficiency of the reduced model
///   logdet(I_S + (1/sigma2) sum_k V1^H H1 Phi H2k Qk H2k^H Phi^H H1^H V1)
/// in bits/s/Hz (internal optimization works in nats; conversion happens
/// here at the reporting boundary).
double evaluate_se_full(const TransmitCovariances& q, const PhaseShifts& phi,
                        const CMat& v1tilde, const ChannelSet& ch, double sigma2);

/// Same quantity in nats given precomputed effective channels.
double se_from_effective_nats(const std::vector<CMat>& g,
                              const TransmitCovariances& q, double sigma2);

/// Direct evaluation of the projection form
///   logdet(I_S + (1/sigma2) sum_k Xi H1 Phi H2k Qk (..)^H Xi^H (Xi Xi^H)^{-1})
/// in bits/s/Hz. Serves as the independent oracle for evaluate_se_full; the
/// two agree whenever v1tilde comes from the compact SVD of Xi.
double evaluate_se_projection_form(const TransmitCovariances& q,
                                   const PhaseShifts& phi, const CMat& xi,
                                   const ChannelSet& ch, double sigma2);

/// Full-array reference without the metasurface projection:
///   logdet(I_M + (1/sigma2) sum_k H1 Phi H2k Qk H2k^H Phi^H H1^H), bits/s/Hz.
double evaluate_se_conventional(const TransmitCovariances& q, const PhaseShifts& phi,
                                const ChannelSet& ch, double sigma2);

struct MonteCarloSe {
    double mean_bits = 0.0;
    double std_error = 0.0;
    int n_samples = 0;
};

/// Sample mean of evaluate_se_full over channel draws with per-sample
/// substream seeds; H1 is held fixed (it is known side information).
MonteCarloSe monte_carlo_ergodic_se(const ChannelStatistics& stats,
                                    const SystemDims& dims, const CMat& h1,
                                    const TransmitCovariances& q,
                                    const PhaseShifts& phi, const CMat& v1tilde,
                                    double sigma2, int n_samples,
                                    std::uint64_t seed);

/// Exposure level tr(R_ki Q_k) in W/kg. Inputs must be Hermitian; the
/// imaginary residue of the trace is asserted below 1e-10 and discarded.
double sar_value(const CMat& qk, const CMat& rki);

}  // namespace risdma
