// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "risdma/channel.hpp"
#include "risdma/se.hpp"

using namespace risdma;

namespace {

SystemDims small_dims() {
    SystemDims d;
    d.num_users = 2;
    d.num_antennas = {3, 2};
    d.n_ris = 3;
    d.n_strips = 2;
    d.elements_per_strip = 2;
    return d;
}

ChannelStatistics unit_stats(const SystemDims& dims) {
    return make_default_stats(dims, /*h2_pathloss_db=*/0.0);
}

}  // namespace

TEST_CASE("channel generation: zero coupling forces zero channels") {
    SystemDims dims = small_dims();
    ChannelStatistics stats = unit_stats(dims);
    for (auto& om : stats.Omega2) om.setZero();
    const ChannelSet ch = generate_channels(stats, dims, H1Spec{}, 7);
    for (const auto& h2 : ch.H2) {
        CHECK(h2.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("channel generation is deterministic in (stats, seed)") {
    SystemDims dims = small_dims();
    const ChannelStatistics stats = unit_stats(dims);
    const ChannelSet a = generate_channels(stats, dims, H1Spec{}, 42);
    const ChannelSet b = generate_channels(stats, dims, H1Spec{}, 42);
    CHECK(a.H1 == b.H1);
    for (int k = 0; k < dims.num_users; ++k) CHECK(a.H2[k] == b.H2[k]);
    const ChannelSet c = generate_channels(stats, dims, H1Spec{}, 43);
    CHECK(a.H1 != c.H1);
}

TEST_CASE("eigenmode-domain variances reproduce the coupling matrix") {
    SystemDims dims;
    dims.num_users = 1;
    dims.num_antennas = {4};
    dims.n_ris = 16;
    dims.n_strips = 2;
    dims.elements_per_strip = 2;
    const ChannelStatistics stats = unit_stats(dims);

    const int n_draws = 100000;
    RMat acc = RMat::Zero(dims.n_ris, dims.num_antennas[0]);
    for (int i = 0; i < n_draws; ++i) {
        const auto h2 = sample_h2(stats, dims, substream_seed(1234, i));
        const CMat mode = stats.U2[0].adjoint() * h2[0] * stats.V2[0];
        acc += mode.cwiseAbs2();
    }
    acc /= n_draws;
    const RMat& omega = stats.Omega2[0];
    for (int r = 0; r < omega.rows(); ++r) {
        for (int c = 0; c < omega.cols(); ++c) {
            CHECK(acc(r, c) == doctest::Approx(omega(r, c)).epsilon(0.03));
        }
    }
}

TEST_CASE("reduced-model SE: trivial values") {
    SystemDims dims = small_dims();
    const ChannelStatistics stats = unit_stats(dims);
    const ChannelSet ch = generate_channels(stats, dims, H1Spec{}, 3);
    Rng rng(5);
    const CMat v1 = test::random_orthonormal(dims.bs_elements(), dims.n_strips, rng);
    PhaseShifts phi;
    phi.phi = test::random_unit_modulus(dims.n_ris, rng);

    TransmitCovariances q;
    for (int k = 0; k < dims.num_users; ++k) {
        q.Q.push_back(CMat::Zero(dims.num_antennas[k], dims.num_antennas[k]));
    }
    CHECK(evaluate_se_full(q, phi, v1, ch, 1.0) == doctest::Approx(0.0));

    // Identity everything, single user: S * log2(1 + p).
    SystemDims d1;
    d1.num_users = 1;
    d1.num_antennas = {3};
    d1.n_ris = 3;
    d1.n_strips = 3;
    d1.elements_per_strip = 1;
    ChannelSet ch1;
    ch1.H1 = CMat::Identity(3, 3);
    ch1.H2 = {CMat::Identity(3, 3)};
    TransmitCovariances q1;
    const double p = 2.5;
    q1.Q = {p * CMat::Identity(3, 3)};
    const double se = evaluate_se_full(q1, PhaseShifts::ones(3),
                                       CMat::Identity(3, 3), ch1, 1.0);
    CHECK(se == doctest::Approx(3.0 * std::log2(1.0 + p)).epsilon(1e-12));
}

TEST_CASE("projection-form oracle matches the reduced model") {
    Rng rng(11);
    SystemDims dims;
    dims.num_users = 2;
    dims.num_antennas = {2, 3};
    dims.n_ris = 3;
    dims.n_strips = 2;
    dims.elements_per_strip = 2;
    const ChannelStatistics stats = unit_stats(dims);

    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet ch = generate_channels(stats, dims, H1Spec{0.0}, 100 + trial);
        const CMat xi =
            test::random_block_xi(dims.n_strips, dims.elements_per_strip, rng);
        PhaseShifts phi;
        phi.phi = test::random_unit_modulus(dims.n_ris, rng);
        TransmitCovariances q;
        for (int k = 0; k < dims.num_users; ++k) {
            q.Q.push_back(test::random_psd(dims.num_antennas[k], rng));
        }
        const CompactSvd svd = compact_svd_right_factor(xi);
        const double a = evaluate_se_full(q, phi, svd.V1, ch, 0.5);
        const double b = evaluate_se_projection_form(q, phi, xi, ch, 0.5);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));

        // Scale invariance of the projection.
        const double c = evaluate_se_projection_form(q, phi, 3.7 * xi, ch, 0.5);
        CHECK(std::abs(b - c) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("projection form: orthonormal rows reduce to the V1 evaluator") {
    Rng rng(13);
    SystemDims dims = small_dims();
    const ChannelStatistics stats = unit_stats(dims);
    const ChannelSet ch = generate_channels(stats, dims, H1Spec{0.0}, 55);
    const CMat v1 = test::random_orthonormal(dims.bs_elements(), dims.n_strips, rng);
    PhaseShifts phi;
    phi.phi = test::random_unit_modulus(dims.n_ris, rng);
    TransmitCovariances q;
    for (int k = 0; k < dims.num_users; ++k) {
        q.Q.push_back(test::random_psd(dims.num_antennas[k], rng));
    }
    const double a = evaluate_se_full(q, phi, v1, ch, 1.0);
    const double b = evaluate_se_projection_form(q, phi, v1.adjoint(), ch, 1.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("Monte Carlo estimator basics") {
    SystemDims dims = small_dims();
    ChannelStatistics stats = unit_stats(dims);
    Rng rng(17);
    const CMat h1 = make_h1(dims, H1Spec{0.0}, 5);
    const CMat v1 = test::random_orthonormal(dims.bs_elements(), dims.n_strips, rng);
    PhaseShifts phi;
    phi.phi = test::random_unit_modulus(dims.n_ris, rng);
    TransmitCovariances q;
    for (int k = 0; k < dims.num_users; ++k) {
        q.Q.push_back(test::random_psd(dims.num_antennas[k], rng));
    }

    SUBCASE("zero coupling gives zero with zero spread") {
        for (auto& om : stats.Omega2) om.setZero();
        const MonteCarloSe mc =
            monte_carlo_ergodic_se(stats, dims, h1, q, phi, v1, 1.0, 64, 9);
        CHECK(mc.mean_bits == doctest::Approx(0.0));
        CHECK(mc.std_error == doctest::Approx(0.0));
    }

    SUBCASE("one sample equals a single evaluation of that draw") {
        const MonteCarloSe mc =
            monte_carlo_ergodic_se(stats, dims, h1, q, phi, v1, 1.0, 1, 9);
        ChannelSet ch;
        ch.H1 = h1;
        ch.H2 = sample_h2(stats, dims, substream_seed(9, 0));
        CHECK(mc.mean_bits ==
              doctest::Approx(evaluate_se_full(q, phi, v1, ch, 1.0)).epsilon(1e-14));
        CHECK(mc.std_error == 0.0);
    }
}

TEST_CASE("exposure metric") {
    const CMat r = reference_sar_matrix();
    CHECK(min_eigenvalue(r) >= 0.0);

    SUBCASE("zero covariance gives zero exposure") {
        CHECK(sar_value(CMat::Zero(4, 4), r) == doctest::Approx(0.0));
    }
    SUBCASE("uniform diagonal against the reference matrix") {
        const double p = 0.37;
        // Oracle: diagonal of the reference matrix sums to 32, so
        // tr(R * (P/4) I) = 8 P.
        CHECK(sar_value(p / 4.0 * CMat::Identity(4, 4), r) ==
              doctest::Approx(8.0 * p).epsilon(1e-14));
    }
    SUBCASE("identity over mass reduces to power over mass") {
        Rng rng(23);
        const CMat q = test::random_psd(4, rng);
        const double mass = 2.7;
        CHECK(sar_value(q, CMat::Identity(4, 4) / mass) ==
              doctest::Approx(std::real(q.trace()) / mass).epsilon(1e-12));
    }
    SUBCASE("linearity in the covariance") {
        Rng rng(29);
        const CMat q1 = test::random_psd(4, rng);
        const CMat q2 = test::random_psd(4, rng);
        const double a = 0.3, b = 1.9;
        CHECK(sar_value(a * q1 + b * q2, r) ==
              doctest::Approx(a * sar_value(q1, r) + b * sar_value(q2, r))
                  .epsilon(1e-12));
    }
    SUBCASE("non-Hermitian input is rejected") {
        CMat bad = CMat::Zero(4, 4);
        bad(0, 1) = cx(1.0, 0.0);
        CHECK_THROWS(sar_value(bad, r));
    }
}

TEST_CASE("full-array reference dominates any projection") {
    Rng rng(31);
    SystemDims dims = small_dims();
    const ChannelStatistics stats = unit_stats(dims);
    for (int trial = 0; trial < 50; ++trial) {
        const ChannelSet ch = generate_channels(stats, dims, H1Spec{0.0}, 600 + trial);
        const CMat v1 =
            test::random_orthonormal(dims.bs_elements(), dims.n_strips, rng);
        PhaseShifts phi;
        phi.phi = test::random_unit_modulus(dims.n_ris, rng);
        TransmitCovariances q;
        for (int k = 0; k < dims.num_users; ++k) {
            q.Q.push_back(test::random_psd(dims.num_antennas[k], rng));
        }
        const double proj = evaluate_se_full(q, phi, v1, ch, 1.0);
        const double conv = evaluate_se_conventional(q, phi, ch, 1.0);
        CHECK(conv >= proj - 1e-10);
        CHECK(proj >= -1e-12);
    }
}

TEST_CASE("SE is monotone under power scaling") {
    Rng rng(37);
    SystemDims dims = small_dims();
    const ChannelStatistics stats = unit_stats(dims);
    const ChannelSet ch = generate_channels(stats, dims, H1Spec{0.0}, 77);
    const CMat v1 = test::random_orthonormal(dims.bs_elements(), dims.n_strips, rng);
    PhaseShifts phi;
    phi.phi = test::random_unit_modulus(dims.n_ris, rng);
    for (int trial = 0; trial < 20; ++trial) {
        TransmitCovariances q, qs;
        const double c = 1.0 + 4.0 * rng.uniform();
        for (int k = 0; k < dims.num_users; ++k) {
            q.Q.push_back(test::random_psd(dims.num_antennas[k], rng));
            qs.Q.push_back(c * q.Q.back());
        }
        CHECK(evaluate_se_full(qs, phi, v1, ch, 1.0) >=
              evaluate_se_full(q, phi, v1, ch, 1.0) - 1e-10);
    }
}

TEST_CASE("compact SVD factorization") {
    SUBCASE("identity against zero padding") {
        CMat xi = CMat::Zero(3, 6);
        xi.leftCols(3) = CMat::Identity(3, 3);
        const CompactSvd svd = compact_svd_right_factor(xi);
        CHECK((svd.singular_values - RVec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((svd.V1 - xi.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("singular values match the Gram-eigenvalue oracle") {
        Rng rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            const CMat xi = test::random_block_xi(3, 2, rng);
            const CompactSvd svd = compact_svd_right_factor(xi);
            Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(xi * xi.adjoint()));
            RVec gram = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().reverse();
            CHECK((svd.singular_values - gram).cwiseAbs().maxCoeff() <= 1e-10);
            // Reconstruction property.
            const CMat rec =
                svd.U1 * svd.singular_values.asDiagonal().toDenseMatrix().cast<cx>() *
                svd.V1.adjoint();
            CHECK((rec - xi).norm() <= 1e-10 * xi.norm());
        }
    }
    SUBCASE("rank-deficient input is rejected") {
        CMat xi = CMat::Zero(2, 4);
        xi(0, 0) = 1.0;
        CHECK_THROWS(compact_svd_right_factor(xi));
    }
}

TEST_CASE("dimension mismatches raise structured errors") {
    SystemDims dims = small_dims();
    ChannelStatistics stats = unit_stats(dims);
    stats.Omega2[0].resize(2, 2);
    CHECK_THROWS_AS(generate_channels(stats, dims, H1Spec{}, 1),
                    std::invalid_argument);
}
