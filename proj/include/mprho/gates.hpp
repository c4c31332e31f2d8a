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

#pragma once

// Random-circuit gate set. Gates are unitary channels (a single Kraus
// operator) so they go through the same application path as noise.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "mprho/channels.hpp"

namespace mprho::gates {

inline Eigen::MatrixXcd sqrt_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, cplx(0, -1), cplx(0, -1), 1;
    return m / std::numbers::sqrt2;
}

inline Eigen::MatrixXcd sqrt_y() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, -1, 1, 1;
    return m / std::numbers::sqrt2;
}

/// W = (X + Y)/sqrt(2); the 1/sqrt(2) keeps the root unitary.
inline Eigen::MatrixXcd sqrt_w() {
    const cplx sqrt_i = std::polar(1.0, std::numbers::pi / 4.0);
    const cplx sqrt_minus_i = std::polar(1.0, -std::numbers::pi / 4.0);
    Eigen::MatrixXcd m(2, 2);
    m << 1, -sqrt_i, sqrt_minus_i, 1;
    return m / std::numbers::sqrt2;
}

inline Eigen::MatrixXcd fsim(double theta, double phi) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    const cplx mis = cplx(0, -std::sin(theta));
    m(0, 0) = 1.0;
    m(1, 1) = std::cos(theta);
    m(1, 2) = mis;
    m(2, 1) = mis;
    m(2, 2) = std::cos(theta);
    m(3, 3) = std::polar(1.0, -phi);
    return m;
}

inline bool is_gate(const std::string &kind) {
    return kind == "sqrtX" || kind == "sqrtY" || kind == "sqrtW" || kind == "fsim";
}

/// Gate kinds as channels: "sqrtX", "sqrtY", "sqrtW", "fsim" (theta, phi).
inline KrausChannel make_gate(const std::string &kind, const std::map<std::string, double> &params = {}) {
    if (kind == "sqrtX") return unitary_channel(kind, sqrt_x());
    if (kind == "sqrtY") return unitary_channel(kind, sqrt_y());
    if (kind == "sqrtW") return unitary_channel(kind, sqrt_w());
    if (kind == "fsim") {
        auto th = params.find("theta");
        auto ph = params.find("phi");
        if (th == params.end() || ph == params.end()) throw ChannelError("fsim needs parameters 'theta' and 'phi'");
        return unitary_channel(kind, fsim(th->second, ph->second), {{"theta", th->second}, {"phi", ph->second}});
    }
    throw ChannelError("unknown gate '" + kind + "'");
}

}  // namespace mprho::gates
