// Copyright 2026 The mprho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mprho/channels.hpp"
#include "mprho/dense.hpp"
#include "mprho/gates.hpp"
#include "mprho/metrics.hpp"
#include "test_util.hpp"

namespace mprho {
namespace {

using dense::apply_channel_dense;
using dense::from_mprho;
using dense::max_abs_diff;

constexpr double kPi = std::numbers::pi;

std::vector<KrausChannel> one_body_grid() {
    std::vector<KrausChannel> out;
    for (double r : {0.0, 0.3, 0.5, 0.95, 1.0}) {
        out.push_back(dephasing(r));
        out.push_back(bitflip(r));
        out.push_back(z_weighted(r));
    }
    for (double phi : {0.0, 0.4, 1.0, kPi / 4, kPi, 2.5}) out.push_back(z_phi(phi));
    out.push_back(gates::make_gate("sqrtX"));
    out.push_back(gates::make_gate("sqrtY"));
    out.push_back(gates::make_gate("sqrtW"));
    return out;
}

std::vector<KrausChannel> two_body_grid() {
    std::vector<KrausChannel> out;
    for (double phi : {0.0, 0.4, 1.0, kPi / 4, kPi, 2.5}) {
        out.push_back(zz_phi(phi));
        out.push_back(cz_phi(phi));
    }
    for (double a : {0.0, 0.6, 1.0}) {
        out.push_back(zz_weighted(a));
        out.push_back(cz_weighted(a));
    }
    out.push_back(gates::make_gate("fsim", {{"theta", kPi / 2}, {"phi", kPi / 6}}));
    return out;
}

TEST(Channels, CompletenessOverParameterGrids) {
    for (const auto &ch : one_body_grid()) EXPECT_LE(completeness_residual(ch), 1e-12) << ch.name();
    for (const auto &ch : two_body_grid()) EXPECT_LE(completeness_residual(ch), 1e-12) << ch.name();
    for (double a : {0.0, 0.3, 1.0}) {
        EXPECT_LE(completeness_residual(dephasing(a)), 1e-15);
        EXPECT_LE(completeness_residual(bitflip(a)), 1e-15);
    }
}

TEST(Channels, RatesOutOfRangeRejected) {
    EXPECT_THROW(dephasing(-0.1), ChannelError);
    EXPECT_THROW(bitflip(1.5), ChannelError);
    EXPECT_THROW(make_channel("amplitude", {}), ChannelError);
    EXPECT_THROW(make_channel("dephasing", {}), ChannelError);
    EXPECT_THROW(KrausChannel("bad", 3, {pauli::I()}), ChannelError);
    EXPECT_THROW(KrausChannel("bad", 2, {pauli::I()}), ChannelError);
}

TEST(Channels, RegistryBuildsNamedChannels) {
    for (const auto &name : registry_names()) {
        const KrausChannel ch = make_channel(name, {{"alpha", 0.9}, {"beta", 0.9}, {"phi", 0.5}});
        EXPECT_EQ(ch.name(), name);
        EXPECT_LE(completeness_residual(ch), 1e-12);
    }
}

TEST(Channels, DephasingLimits) {
    const MPrho plus = from_mps(MatrixProductState(
        {LabeledTensor({{lbl::bond(0), 1, IndexKind::coherence}, {lbl::phys(0), 2, IndexKind::physical}, {lbl::bond(1), 1, IndexKind::coherence}},
                       {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)})},
        0, true));
    const auto before = from_mprho(plus);
    EXPECT_LE(max_abs_diff(from_mprho(apply_one_body(plus, dephasing(1.0), 0)), before), 1e-15);
    const auto half = from_mprho(apply_one_body(plus, dephasing(0.5), 0));
    EXPECT_LE(max_abs_diff(half, dense::maximally_mixed(1)), 1e-15);
}

TEST(Channels, ZeroAngleIsIdentity) {
    const MPrho r = testing::random_mixed_state(4, 2, 61);
    const auto d = from_mprho(r);
    EXPECT_LE(max_abs_diff(from_mprho(apply_one_body(r, z_phi(0.0), 2)), d), 1e-12);
    EXPECT_LE(max_abs_diff(from_mprho(apply_two_body(r, zz_phi(0.0), 1)), d), 1e-12);
    EXPECT_LE(max_abs_diff(from_mprho(apply_two_body(r, cz_phi(0.0), 2)), d), 1e-12);
    const auto id2 = unitary_channel("id", Eigen::MatrixXcd::Identity(4, 4));
    EXPECT_NEAR(fidelity_p(r, apply_two_body(r, id2, 0)), 1.0, 1e-10);
}

TEST(Channels, ZzLeavesGhzInvariant) {
    for (double phi : {0.3, 1.1, kPi, 2.9}) {
        MPrho g = ghz(500);
        const MPrho ideal = g;
        for (std::size_t i = 0; i + 1 < 500; ++i) g = apply_two_body(g, zz_phi(phi), i);
        EXPECT_NEAR(purity(g), 1.0, 1e-10) << phi;
        EXPECT_NEAR(fidelity_p(g, ideal), 1.0, 1e-10) << phi;
    }
}

TEST(Channels, ZAndControlledZActIdenticallyOnGhz) {
    for (std::size_t n : {3u, 4u, 6u}) {
        for (double phi : {0.5, 2.0}) {
            for (std::size_t i = 1; i < n; ++i) {
                const auto a = from_mprho(apply_one_body(ghz(n), z_phi(phi), i));
                const auto b = from_mprho(apply_two_body(ghz(n), cz_phi(phi), i - 1));
                EXPECT_LE(max_abs_diff(a, b), 1e-12) << n << " " << phi << " " << i;
            }
        }
    }
}

TEST(Channels, ControlledDampingClosedForms) {
    for (std::size_t n : {4u, 20u, 500u}) {
        for (double phi : {0.0, 0.7, kPi / 2, kPi}) {
            const MPrho ideal = ghz(n);
            const MPrho r = apply_two_body(ideal, cz_phi(phi), n / 2 - 1);
            EXPECT_NEAR(purity(r), (3.0 + std::cos(phi)) / 4.0, 1e-10);
            EXPECT_NEAR(fidelity_p(r, ideal), std::pow(std::cos(phi / 4.0), 2), 1e-10);
        }
    }
}

TEST(Channels, FullDampingAtEverySiteGivesHalfPurity) {
    MPrho g = ghz(8);
    for (std::size_t i = 0; i < 8; ++i) g = apply_one_body(g, z_phi(kPi), i);
    EXPECT_NEAR(purity(g), 0.5, 1e-12);
}

TEST(Channels, EnvironmentConstruction) {
    const auto id = kraus_from_environment(EnvironmentUnitary(Eigen::MatrixXcd::Identity(4, 4)));
    EXPECT_LE((id.operators()[0] - pauli::I()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(id.operators()[1].cwiseAbs().maxCoeff(), 1e-15);
    for (double phi : {0.2, 1.3, kPi}) {
        const auto env = kraus_from_environment(EnvironmentUnitary::controlled(ry(phi)));
        const auto ref = z_phi(phi);
        for (int k = 0; k < 2; ++k) {
            EXPECT_LE((env.operators()[k] - ref.operators()[k]).cwiseAbs().maxCoeff(), 1e-15) << phi;
        }
    }
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(4, 4);
    bad(0, 0) = 2.0;
    EXPECT_THROW(EnvironmentUnitary{bad}, ChannelError);
    EXPECT_THROW(EnvironmentUnitary{Eigen::MatrixXcd::Identity(3, 3)}, ChannelError);
}

TEST(Channels, EnvironmentMatchesDilatedEvolution) {
    // Random two-qubit environment coupling on one system qubit; the dilated
    // state is traced over the environment by hand.
    const Eigen::MatrixXcd u = testing::random_isometry(4, 4, 62);
    const auto ch = kraus_from_environment(EnvironmentUnitary(u));
    const Eigen::MatrixXcd a = testing::random_matrix(2, 2, 63);
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(4, 4);
    big.block(0, 0, 2, 2) = rho;  // |e0><e0| (x) rho
    big = u * big * u.adjoint();
    const Eigen::MatrixXcd traced = big.block(0, 0, 2, 2) + big.block(2, 2, 2, 2);
    Eigen::MatrixXcd viaKraus = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto &k : ch.operators()) viaKraus += k * rho * k.adjoint();
    EXPECT_LE((traced - viaKraus).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Channels, WeightedFormsMatchAngleForms) {
    const MPrho r = testing::random_mixed_state(4, 2, 64);
    const auto d = from_mprho(r);
    for (double phi : {0.3, 1.2, kPi}) {
        const double a = damping_weight(phi);
        EXPECT_LE(max_abs_diff(apply_channel_dense(d, z_phi(phi), {1}), apply_channel_dense(d, z_weighted(a), {1})), 1e-12);
        EXPECT_LE(max_abs_diff(apply_channel_dense(d, zz_phi(phi), {1, 2}), apply_channel_dense(d, zz_weighted(a), {1, 2})),
                  1e-12);
        EXPECT_LE(max_abs_diff(apply_channel_dense(d, cz_phi(phi), {1, 2}), apply_channel_dense(d, cz_weighted(a), {1, 2})),
                  1e-12);
    }
}

TEST(Channels, OracleEquivalenceOneBody) {
    const MPrho r = testing::random_mixed_state(5, 3, 65);
    const auto d = from_mprho(r);
    for (const auto &ch : one_body_grid()) {
        for (std::size_t site : {0u, 2u, 4u}) {
            const MPrho out = apply_one_body(r, ch, site);
            EXPECT_LE(max_abs_diff(from_mprho(out), apply_channel_dense(d, ch, {site})), 1e-10) << ch.name() << " @" << site;
            EXPECT_LE(check_isometry(out), 1e-10);
            EXPECT_NEAR(trace(out), 1.0, 1e-10);
        }
    }
}

TEST(Channels, OracleEquivalenceTwoBody) {
    const MPrho r = testing::random_mixed_state(6, 3, 66);
    const auto d = from_mprho(r);
    for (const auto &ch : two_body_grid()) {
        for (std::size_t i : {0u, 2u, 4u}) {
            ApplyDiagnostics diag;
            const MPrho out = apply_two_body(r, ch, i, {}, &diag);
            EXPECT_LE(max_abs_diff(from_mprho(out), apply_channel_dense(d, ch, {i, i + 1})), 1e-10) << ch.name() << " @" << i;
            EXPECT_LE(check_isometry(out), 1e-10);
            EXPECT_NEAR(trace(out), 1.0, 1e-10);
            EXPECT_EQ(out.kappa_dim(i + 1), 1u);
            EXPECT_EQ(out.oc(), i + 1);
            EXPECT_GE(diag.min_relative_eigenvalue, -1e-10);
        }
    }
}

TEST(Channels, TwoBodyFromEitherCenter) {
    const MPrho r = testing::random_mixed_state(5, 2, 67);
    const auto want = apply_channel_dense(from_mprho(r), cz_phi(1.0), {2, 3});
    for (std::size_t oc : {0u, 2u, 3u, 4u}) {
        const MPrho out = apply_two_body(orthogonalize(r, oc), cz_phi(1.0), 2);
        EXPECT_LE(max_abs_diff(from_mprho(out), want), 1e-10) << oc;
    }
    EXPECT_THROW(apply_two_body(r, cz_phi(1.0), 4), RangeError);
    EXPECT_THROW(apply_two_body(r, z_phi(1.0), 1), ChannelError);
    EXPECT_THROW(apply_one_body(r, cz_phi(1.0), 1), ChannelError);
}

TEST(Channels, DenseStatesRemainPositive) {
    MPrho r = testing::random_mixed_state(5, 2, 68);
    for (std::size_t i = 0; i + 1 < 5; ++i) r = apply_two_body(r, zz_phi(0.8), i);
    EXPECT_GE(dense::min_eigenvalue(from_mprho(r)), -1e-10);
}

TEST(KrausCount, Examples) {
    const MPrho g = ghz(4);
    const auto u = kraus_count_effect(g, gates::make_gate("sqrtX"), 1);
    EXPECT_EQ(u.kraus_count, 1u);
    EXPECT_LE(u.kappa_after_stacking, u.kappa_before);
    EXPECT_TRUE(u.bound_holds);

    const auto deph = kraus_count_effect(g, dephasing(0.7), 1);
    EXPECT_EQ(deph.kappa_before, 1u);
    EXPECT_EQ(deph.kappa_after_stacking, 2u);
    EXPECT_TRUE(deph.bound_holds);

    const auto zero = kraus_count_effect(g, z_phi(0.0), 1);
    EXPECT_EQ(zero.kappa_after_stacking, 2u);
    EXPECT_EQ(zero.kappa_after_compression, 1u);

    const MPrho r = testing::random_mixed_state(4, 2, 69);
    const auto two = kraus_count_effect(r, cz_phi(0.9), 1);
    EXPECT_TRUE(two.bound_holds);
    EXPECT_LE(two.kappa_after_compression, two.kappa_after_stacking);
}

TEST(Gates, UnitaryAndNamed) {
    for (const char *k : {"sqrtX", "sqrtY", "sqrtW"}) {
        const auto g = gates::make_gate(k);
        EXPECT_EQ(g.arity(), 1);
        EXPECT_LE(completeness_residual(g), 1e-14);
    }
    // Each root squares to its Pauli up to the global phase -i.
    const cplx mi(0.0, -1.0);
    EXPECT_LE((gates::sqrt_x() * gates::sqrt_x() - mi * pauli::X()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((gates::sqrt_y() * gates::sqrt_y() - mi * pauli::Y()).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::MatrixXcd w = (pauli::X() + pauli::Y()) / std::sqrt(2.0);
    EXPECT_LE((gates::sqrt_w() * gates::sqrt_w() - mi * w).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(gates::is_gate("cnot"));
    EXPECT_THROW(gates::make_gate("cnot"), ChannelError);
}

}  // namespace
}  // namespace mprho
