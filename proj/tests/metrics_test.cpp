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
#include <numeric>

#include "mprho/channels.hpp"
#include "mprho/dense.hpp"
#include "mprho/metrics.hpp"
#include "mprho/random.hpp"
#include "test_util.hpp"

namespace mprho {
namespace {

using dense::from_mprho;

MPrho fully_depolarized(std::size_t n) {
    MPrho rho = product_rho(std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        rho = apply_one_body(rho, dephasing(0.5), i);
        rho = apply_one_body(rho, bitflip(0.5), i);
    }
    return rho;
}

TEST(Metrics, AgreeWithDenseOnRandomStates) {
    const MPrho a = testing::random_mixed_state(5, 3, 41);
    const MPrho b = testing::random_mixed_state(5, 2, 42);
    const auto da = from_mprho(a), db = from_mprho(b);
    EXPECT_NEAR(trace(a), 1.0, 1e-10);
    EXPECT_NEAR(purity(a), dense::purity_dense(da), 1e-12);
    EXPECT_NEAR(purity(b), dense::purity_dense(db), 1e-12);
    EXPECT_NEAR(hsip(a, b), dense::hsip_dense(da, db), 1e-12);
    EXPECT_NEAR(fidelity_p(a, b), dense::fidelity_p_dense(da, db), 1e-12);
}

TEST(Metrics, PureGhz) {
    const MPrho g = ghz(12);
    EXPECT_NEAR(purity(g), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_p(g, g), 1.0, 1e-12);
}

TEST(Metrics, FullyDepolarizedPurity) {
    for (std::size_t n : {1u, 3u, 8u}) {
        const MPrho r = fully_depolarized(n);
        EXPECT_NEAR(purity(r), std::pow(2.0, -static_cast<double>(n)), 1e-14);
        EXPECT_NEAR(trace(r), 1.0, 1e-12);
    }
}

TEST(Metrics, GhzZDampedAtPiHasHalfPurity) {
    const MPrho r = apply_one_body(ghz(6), z_phi(std::numbers::pi), 3);
    EXPECT_NEAR(purity(r), 0.5, 1e-12);
}

TEST(Metrics, FidelityIsSymmetricAndBounded) {
    const MPrho a = testing::random_mixed_state(4, 2, 43);
    const MPrho b = testing::random_mixed_state(4, 3, 44);
    EXPECT_NEAR(fidelity_p(a, b), fidelity_p(b, a), 1e-14);
    EXPECT_LE(fidelity_p(a, b), 1.0 + 1e-10);
    EXPECT_GE(fidelity_p(a, b), 0.0);
    EXPECT_NEAR(fidelity_p(a, a), 1.0, 1e-12);
    EXPECT_LT(fidelity_p(a, b), 1.0 - 1e-3);
    EXPECT_THROW(hsip(a, ghz(5)), RangeError);
}

TEST(Metrics, FidelityOneOnlyForEqualOperators) {
    // Perturbing one channel rate moves F_P away from 1 by more than the
    // tolerance, and the dense matrices differ by a matching amount.
    MPrho base = testing::random_mixed_state(4, 2, 45);
    for (double eps : {1e-1, 1e-2}) {
        const MPrho p = apply_one_body(base, dephasing(1.0 - eps), 1);
        const double f = fidelity_p(base, p);
        const double d = dense::max_abs_diff(from_mprho(base), from_mprho(p));
        EXPECT_GT(d, 1e-6);
        EXPECT_LT(f, 1.0 - 1e-8);
    }
}

TEST(Expectation, GhzStabilizers) {
    const MPrho g = ghz(4);
    EXPECT_NEAR(expectation(g, "ZZII"), 1.0, 1e-14);
    EXPECT_NEAR(expectation(g, "IZZI"), 1.0, 1e-14);
    EXPECT_NEAR(expectation(g, "XXXX"), 1.0, 1e-14);
    EXPECT_NEAR(expectation(g, "ZIII"), 0.0, 1e-14);
    EXPECT_NEAR(expectation(g, "YYXX"), -1.0, 1e-14);
    EXPECT_NEAR(expectation(g, "IIII"), 1.0, 1e-14);
}

TEST(Expectation, MalformedStrings) {
    const MPrho g = ghz(3);
    EXPECT_THROW(expectation(g, "ZZ"), ParseError);
    EXPECT_THROW(expectation(g, "ZQZ"), ParseError);
    EXPECT_THROW(bitstring_probability(g, "0a0"), ParseError);
    EXPECT_THROW(bitstring_probability(g, "00"), ParseError);
}

TEST(Bitstrings, GhzThree) {
    const MPrho g = ghz(3);
    EXPECT_NEAR(bitstring_probability(g, "000"), 0.5, 1e-15);
    EXPECT_NEAR(bitstring_probability(g, "111"), 0.5, 1e-15);
    EXPECT_NEAR(bitstring_probability(g, "010"), 0.0, 1e-15);
}

TEST(Bitstrings, SumToOneAndMatchDense) {
    const MPrho r = testing::random_mixed_state(6, 3, 46);
    const auto p = all_bitstring_probabilities(r);
    const auto d = dense::bitstring_probabilities_dense(from_mprho(r));
    ASSERT_EQ(p.size(), 64u);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-10);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], d[k], 1e-12);
    EXPECT_NEAR(bitstring_probability(r, "101100"), d[0b101100], 1e-12);
}

TEST(Bitstrings, SumToOneAtTwelve) {
    const MPrho r = testing::random_mixed_state(12, 4, 47);
    const auto p = all_bitstring_probabilities(r);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-8);
}

TEST(Tomography, AllStringsMatchDense) {
    MPrho r = testing::random_mixed_state(6, 3, 48);
    r = apply_two_body(r, zz_phi(0.4), 1);
    const auto strings = all_pauli_strings(6);
    ASSERT_EQ(strings.size(), 4096u);
    const auto mine = pauli_tomography(r, strings);
    const auto ref = dense::pauli_tomography_dense(from_mprho(r), strings);
    double worst = 0.0;
    for (std::size_t k = 0; k < mine.size(); ++k) worst = std::max(worst, std::abs(mine[k] - ref[k]));
    EXPECT_LE(worst, 1e-10);
    EXPECT_EQ(strings.front(), "IIIIII");
    EXPECT_EQ(strings[1], "IIIIIX");
    EXPECT_EQ(strings.back(), "ZZZZZZ");
}

TEST(HsipTracker, FollowsLocalUpdatesExactly) {
    MPrho a = testing::random_mixed_state(7, 3, 51);
    MPrho b = testing::random_mixed_state(7, 2, 52);
    HsipTracker cross, self;
    Rng rng(53);
    for (int step = 0; step < 40; ++step) {
        // Sweeps, jumps and untouched steps all have to be picked up.
        const std::size_t site = step < 20 ? static_cast<std::size_t>(step) % 7 : rng.below(7);
        if (step % 5 != 4) a = apply_one_body(a, dephasing(0.8), site);
        if (step % 3 == 0) b = apply_one_body(b, bitflip(0.7), (site + 3) % 7);
        if (step % 7 == 6) a = apply_two_body(a, cz_phi(0.9), site % 6);
        EXPECT_NEAR(cross(a, b), hsip(a, b), 1e-13) << "step " << step;
        EXPECT_NEAR(self(a, a), purity(a), 1e-13) << "step " << step;
    }
}

TEST(HsipTracker, RestartsOnLengthChange) {
    HsipTracker t;
    const MPrho g4 = ghz(4), g6 = ghz(6);
    EXPECT_NEAR(t(g4, g4), 1.0, 1e-14);
    EXPECT_NEAR(t(g6, g6), 1.0, 1e-14);
    EXPECT_THROW(t(g4, g6), RangeError);
}

}  // namespace
}  // namespace mprho
