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
#include "mprho/metrics.hpp"
#include "test_util.hpp"

namespace mprho {
namespace {

using namespace dense;

TEST(Dense, GhzTwoIsBellProjector) {
    const auto d = from_mprho(ghz(2));
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    want(0, 0) = want(0, 3) = want(3, 0) = want(3, 3) = 0.5;
    EXPECT_LE((d.data - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dense, GhzThreeAfterErasure) {
    const auto d = from_mprho(partial_trace_site(ghz(3), 2));
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    want(0, 0) = want(3, 3) = 0.5;
    EXPECT_LE((d.data - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dense, KappaGaugeLeavesMatrixUnchanged) {
    const MPrho r = testing::random_mixed_state(4, 2, 81);
    const auto k = static_cast<Eigen::Index>(r.kappa_dim(1));
    const MPrho g = apply_kappa_isometry(r, 1, testing::random_isometry(k, k, 82));
    EXPECT_LE(max_abs_diff(from_mprho(r), from_mprho(g)), 1e-12);
}

TEST(Dense, MatrixIsAValidState) {
    const auto d = from_mprho(testing::random_mixed_state(5, 3, 83));
    EXPECT_LE((d.data - d.data.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(trace_dense(d), 1.0, 1e-10);
    EXPECT_GE(min_eigenvalue(d), -1e-10);
}

TEST(Dense, CapRefusesLargeChains) {
    EXPECT_THROW(from_mprho(ghz(11)), OracleError);
    EXPECT_NO_THROW(from_mprho(ghz(3), 3));
    EXPECT_THROW(from_mprho(ghz(4), 3), OracleError);
    EXPECT_THROW(state_vector(ghz_mps(21)), OracleError);
}

TEST(Dense, PurityOfMaximallyMixed) {
    for (std::size_t n : {1u, 4u, 8u}) EXPECT_NEAR(purity_dense(maximally_mixed(n)), std::pow(2.0, -static_cast<double>(n)), 1e-15);
}

TEST(Dense, PartialTraceMatchesDefinition) {
    // Tr_1 of |psi><psi| with |psi> = |0>|+>, site 1 least significant.
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = v(1) = 1.0 / std::sqrt(2.0);
    const auto r = partial_trace_dense(from_state_vector(v), 1);
    EXPECT_EQ(r.n, 1u);
    EXPECT_NEAR(r.data(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(r.data(1, 1)), 0.0, 1e-15);
    const auto l = partial_trace_dense(from_state_vector(v), 0);
    EXPECT_NEAR(l.data(0, 1).real(), 0.5, 1e-15);
}

TEST(Dense, ChannelOnMostSignificantSite) {
    // X on site 0 maps |00> to |10> = index 2.
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = 1.0;
    const auto out = apply_channel_dense(from_state_vector(v), unitary_channel("x", pauli::X()), {0});
    EXPECT_NEAR(out.data(2, 2).real(), 1.0, 1e-15);
}

TEST(Dense, ExpectationMatchesExplicitKron) {
    const auto d = from_mprho(testing::random_mixed_state(3, 2, 84));
    const Eigen::MatrixXcd p = mprho::detail::kron(mprho::detail::kron(pauli::X(), pauli::I()), pauli::Y());
    EXPECT_NEAR(expectation_dense(d, "XIY"), (d.data * p).trace().real(), 1e-13);
}

TEST(Fidelity, UhlmannJozsaSelfIsOne) {
    const auto d = from_mprho(testing::random_mixed_state(3, 2, 85));
    EXPECT_NEAR(fidelity_uj(d, d), 1.0, 1e-8);
    EXPECT_NEAR(fidelity_uj(maximally_mixed(3), maximally_mixed(3)), 1.0, 1e-12);
}

TEST(Fidelity, PureReferenceCoincidesWithHsFidelity) {
    for (double phi : {0.3, 1.0, std::numbers::pi / 2, std::numbers::pi}) {
        const MPrho ideal = ghz(4);
        const MPrho damped = apply_one_body(ideal, z_phi(phi), 2);
        const auto a = from_mprho(ideal), b = from_mprho(damped);
        const double want = std::pow(std::cos(phi / 4.0), 2);
        EXPECT_NEAR(fidelity_uj(a, b), want, 1e-8) << phi;
        EXPECT_NEAR(fidelity_p_dense(a, b), want, 1e-12) << phi;
        EXPECT_NEAR(fidelity_p(ideal, damped), want, 1e-12) << phi;
    }
}

TEST(Fidelity, NonPositiveInputRejected) {
    DenseDensityMatrix bad{1, Eigen::MatrixXcd::Zero(2, 2)};
    bad.data(0, 0) = 1.5;
    bad.data(1, 1) = -0.5;
    EXPECT_THROW(fidelity_uj(bad, maximally_mixed(1)), OracleError);
    EXPECT_THROW(fidelity_uj(maximally_mixed(1), bad), OracleError);
    EXPECT_THROW(fidelity_uj(maximally_mixed(1), maximally_mixed(2)), OracleError);
}

}  // namespace
}  // namespace mprho
