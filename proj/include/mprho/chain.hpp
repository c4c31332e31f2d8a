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

// Label naming and the gauge moves shared by pure and purified chains.
//
// Sites are numbered from 0. Bond i sits to the left of site i, so site i
// touches bonds "chi_i" and "chi_{i+1}"; the outer bonds chi_0 and chi_N
// always have dimension 1.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mprho/linalg.hpp"
#include "mprho/tensor.hpp"

namespace mprho {

namespace lbl {

inline std::string bond(std::size_t i) {
    return "chi_" + std::to_string(i);
}
inline std::string phys(std::size_t i) {
    return "s_" + std::to_string(i);
}
inline std::string mix(std::size_t i) {
    return "kappa_" + std::to_string(i);
}

}  // namespace lbl

/// Truncation knobs for every operation that refactorizes site tensors.
struct TruncationPolicy {
    double cutoff = kDefaultCutoff;  // relative singular-value cutoff on chi bonds
    std::size_t max_chi = kUnlimitedRank;
    double kappa_cutoff = kDefaultCutoff;  // relative weight cutoff on kappa
    std::size_t max_kappa = kUnlimitedRank;
    bool compress_kappa = false;  // re-compress kappa after it grows
};

namespace detail {

inline const std::string kTmpBond = "chi_tmp";

// The helpers below act on a window of a chain: sites[k] holds site base + k.

// Moves the center from site i to i+1. Site i becomes a left isometry over
// all of its labels except chi_{i+1}.
inline void shift_right(std::vector<LabeledTensor> &sites, std::size_t i, const TruncationPolicy &p,
                        std::size_t base = 0) {
    const std::string right = lbl::bond(i + 1);
    std::vector<std::string> rows;
    LabeledTensor &a = sites[i - base];
    LabeledTensor &b = sites[i + 1 - base];
    for (const auto &l : a.labels()) {
        if (l.name != right) rows.push_back(l.name);
    }
    SvdResult r = svd(a, rows, p.cutoff, p.max_chi, {kTmpBond, 1, IndexKind::coherence});
    a = relabel(r.u, kTmpBond, right);
    const LabeledTensor sv = scale_along(r.vt, kTmpBond, r.s);
    b = relabel(contract(sv, b), kTmpBond, right);
}

// Moves the center from site i to i-1. Site i becomes a right isometry over
// all of its labels except chi_i.
inline void shift_left(std::vector<LabeledTensor> &sites, std::size_t i, const TruncationPolicy &p,
                       std::size_t base = 0) {
    const std::string left = lbl::bond(i);
    LabeledTensor &a = sites[i - base];
    LabeledTensor &b = sites[i - 1 - base];
    SvdResult r = svd(a, {left}, p.cutoff, p.max_chi, {kTmpBond, 1, IndexKind::coherence});
    a = relabel(r.vt, kTmpBond, left);
    const LabeledTensor us = scale_along(r.u, kTmpBond, r.s);
    b = relabel(contract(b, us), kTmpBond, left);
}

inline void move_center(std::vector<LabeledTensor> &sites, std::size_t from, std::size_t to,
                        const TruncationPolicy &p, std::size_t base = 0) {
    while (from < to) shift_right(sites, from++, p, base);
    while (from > to) shift_left(sites, from--, p, base);
}

// Brings an arbitrary chain into canonical form: a QR sweep to the right
// end, then an SVD sweep back to `target`.
inline void canonicalize(std::vector<LabeledTensor> &sites, std::size_t target, const TruncationPolicy &p) {
    const std::size_t n = sites.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::string right = lbl::bond(i + 1);
        std::vector<std::string> rows;
        for (const auto &l : sites[i].labels()) {
            if (l.name != right) rows.push_back(l.name);
        }
        QrResult f = qr(sites[i], rows, {kTmpBond, 1, IndexKind::coherence});
        sites[i] = relabel(f.q, kTmpBond, right);
        sites[i + 1] = relabel(contract(f.r, sites[i + 1]), kTmpBond, right);
    }
    move_center(sites, n - 1, target, p);
}

}  // namespace detail

}  // namespace mprho
