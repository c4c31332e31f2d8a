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

// Pure-state matrix product states of qubits.
//
// Site i carries labels (chi_i, s_i, chi_{i+1}) in that stored order. The
// orthogonality center `oc` is a 0-based site index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mprho/chain.hpp"
#include "mprho/linalg.hpp"
#include "mprho/random.hpp"
#include "mprho/tensor.hpp"

namespace mprho {

inline constexpr std::size_t kQubitDim = 2;

class MatrixProductState {
   public:
    MatrixProductState() = default;

    /// Takes ownership of `sites`; labels are checked and put in stored order.
    /// `canonical` asserts that sites left/right of `oc` are isometries.
    MatrixProductState(std::vector<LabeledTensor> sites, std::size_t oc, bool canonical)
        : sites_(std::move(sites)), oc_(oc), canonical_(canonical) {
        if (sites_.empty()) throw RangeError("an MPS needs at least one site");
        if (oc_ >= sites_.size()) throw RangeError("orthogonality center out of range");
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            sites_[i] = permute(sites_[i], {lbl::bond(i), lbl::phys(i), lbl::bond(i + 1)});
            if (sites_[i].dim(lbl::phys(i)) != kQubitDim) throw LabelError("physical dimension must be 2");
            if (i > 0 && sites_[i].dim(lbl::bond(i)) != sites_[i - 1].dim(lbl::bond(i))) {
                throw ContractionError("bond " + lbl::bond(i) + " dims disagree between neighbouring sites");
            }
        }
        if (sites_.front().dim(lbl::bond(0)) != 1 || sites_.back().dim(lbl::bond(sites_.size())) != 1) {
            throw LabelError("boundary bonds must have dimension 1");
        }
    }

    std::size_t size() const {
        return sites_.size();
    }
    std::size_t oc() const {
        return oc_;
    }
    bool is_canonical() const {
        return canonical_;
    }
    const LabeledTensor &site(std::size_t i) const {
        return sites_.at(i);
    }
    const std::vector<LabeledTensor> &sites() const {
        return sites_;
    }
    /// Dimension of bond i (0..N).
    std::size_t bond_dim(std::size_t i) const {
        if (i > sites_.size()) throw RangeError("bond index out of range");
        return i < sites_.size() ? sites_[i].dim(lbl::bond(i)) : 1;
    }
    std::size_t max_bond_dim() const {
        std::size_t m = 1;
        for (std::size_t i = 0; i <= sites_.size(); ++i) m = std::max(m, bond_dim(i));
        return m;
    }

   private:
    std::vector<LabeledTensor> sites_;
    std::size_t oc_ = 0;
    bool canonical_ = false;
};

/// Computational-basis product state; bits[0] is site 0.
inline MatrixProductState product_state(const std::vector<int> &bits) {
    if (bits.empty()) throw RangeError("product_state needs at least one site");
    std::vector<LabeledTensor> sites;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw RangeError("product_state bits must be 0 or 1");
        std::vector<cplx> d(2, 0.0);
        d[static_cast<std::size_t>(bits[i])] = 1.0;
        sites.emplace_back(std::vector<IndexLabel>{{lbl::bond(i), 1, IndexKind::coherence},
                                                   {lbl::phys(i), 2, IndexKind::physical},
                                                   {lbl::bond(i + 1), 1, IndexKind::coherence}},
                           std::move(d));
    }
    return MatrixProductState(std::move(sites), 0, true);
}

/// (|0...0> + |1...1>)/sqrt(2), left-canonical with the center on the last site.
inline MatrixProductState ghz_mps(std::size_t n) {
    if (n < 2) throw RangeError("GHZ state needs N >= 2");
    std::vector<LabeledTensor> sites;
    sites.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t dl = i == 0 ? 1 : 2;
        const std::size_t dr = i + 1 == n ? 1 : 2;
        auto t = std::vector<cplx>(dl * 2 * dr, 0.0);
        const double v = i + 1 == n ? 1.0 / std::sqrt(2.0) : 1.0;
        for (std::size_t b = 0; b < 2; ++b) {
            const std::size_t a = dl == 1 ? 0 : b;
            const std::size_t c = dr == 1 ? 0 : b;
            t[(a * 2 + b) * dr + c] = v;
        }
        sites.emplace_back(std::vector<IndexLabel>{{lbl::bond(i), dl, IndexKind::coherence},
                                                   {lbl::phys(i), 2, IndexKind::physical},
                                                   {lbl::bond(i + 1), dr, IndexKind::coherence}},
                           std::move(t));
    }
    return MatrixProductState(std::move(sites), n - 1, true);
}

/// Bond dimension used by random_mps at bond i of an n-site chain.
inline std::size_t capped_bond_dim(std::size_t n, std::size_t i, std::size_t chi) {
    std::size_t cap = chi;
    // 2^i and 2^(n-i), saturating well before overflow.
    const auto pow2 = [](std::size_t e) -> std::size_t { return e >= 40 ? (std::size_t{1} << 40) : (std::size_t{1} << e); };
    cap = std::min(cap, pow2(i));
    cap = std::min(cap, pow2(n - i));
    return std::max<std::size_t>(cap, 1);
}

/// Random normalized state: i.i.d. complex Gaussian site tensors, then a QR
/// sweep to the right. Left-canonical with the center on the last site.
inline MatrixProductState random_mps(std::size_t n, std::size_t chi, std::uint64_t seed) {
    if (n < 2) throw RangeError("random_mps needs N >= 2");
    if (chi < 1) throw RangeError("random_mps needs chi >= 1");
    Rng rng(seed);
    std::vector<LabeledTensor> sites;
    sites.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t dl = capped_bond_dim(n, i, chi);
        const std::size_t dr = capped_bond_dim(n, i + 1, chi);
        std::vector<cplx> d(dl * 2 * dr);
        for (auto &z : d) z = rng.complex_normal();
        sites.emplace_back(std::vector<IndexLabel>{{lbl::bond(i), dl, IndexKind::coherence},
                                                   {lbl::phys(i), 2, IndexKind::physical},
                                                   {lbl::bond(i + 1), dr, IndexKind::coherence}},
                           std::move(d));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        QrResult f = qr(sites[i], {lbl::bond(i), lbl::phys(i)}, {detail::kTmpBond, 1, IndexKind::coherence});
        sites[i] = relabel(f.q, detail::kTmpBond, lbl::bond(i + 1));
        sites[i + 1] = relabel(contract(f.r, sites[i + 1]), detail::kTmpBond, lbl::bond(i + 1));
    }
    sites[n - 1] = scale(sites[n - 1], 1.0 / sites[n - 1].norm());
    return MatrixProductState(std::move(sites), n - 1, true);
}

/// Moves the orthogonality center to `target` (0-based). Non-canonical
/// input is first swept into canonical form.
inline MatrixProductState orthogonalize(const MatrixProductState &psi, std::size_t target,
                                        const TruncationPolicy &policy = {}) {
    if (target >= psi.size()) throw RangeError("orthogonalize target out of range");
    std::vector<LabeledTensor> sites = psi.sites();
    if (psi.is_canonical()) {
        detail::move_center(sites, psi.oc(), target, policy);
    } else {
        detail::canonicalize(sites, target, policy);
    }
    return MatrixProductState(std::move(sites), target, true);
}

namespace detail {

// Per-physical-value slices of a site tensor as (left x right) matrices.
inline std::vector<Eigen::MatrixXcd> physical_slices(const LabeledTensor &t, const std::string &left,
                                                     const std::string &phys, const std::string &right) {
    std::vector<Eigen::MatrixXcd> out;
    const std::size_t d = t.dim(phys);
    for (std::size_t s = 0; s < d; ++s) out.push_back(to_matrix(slice(t, phys, s), {left}, {right}));
    return out;
}

}  // namespace detail

/// <psi1|psi2> by a left-to-right transfer contraction.
inline cplx overlap(const MatrixProductState &psi1, const MatrixProductState &psi2) {
    if (psi1.size() != psi2.size()) throw RangeError("overlap of chains with different lengths");
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);  // [bra bond, ket bond]
    for (std::size_t i = 0; i < psi1.size(); ++i) {
        const auto a = detail::physical_slices(psi1.site(i), lbl::bond(i), lbl::phys(i), lbl::bond(i + 1));
        const auto b = detail::physical_slices(psi2.site(i), lbl::bond(i), lbl::phys(i), lbl::bond(i + 1));
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(a[0].cols(), b[0].cols());
        for (std::size_t s = 0; s < a.size(); ++s) next.noalias() += a[s].adjoint() * env * b[s];
        env = std::move(next);
    }
    return env(0, 0);
}

/// Squared Schmidt coefficients across one bond, descending, summing to 1.
struct BondSpectrum {
    std::size_t bond = 0;  // bond index, 1..N-1
    std::vector<double> weights;
};

struct CanonicalReport {
    double max_isometry_residual = 0.0;  // off-center sites
    double norm_residual = 0.0;          // |<psi|psi> - 1|
    std::vector<double> bond_residuals;  // entry b-1 for bond b = 1..N-1
    double max_bond_residual = 0.0;

    bool ok(double tol = 1e-10) const {
        return max_isometry_residual <= tol && norm_residual <= tol && max_bond_residual <= tol;
    }
};

namespace detail {

// Bond density matrices obtained by pushing the center's weight outward
// through the isometries: D_b for b = 1..N-1 (index b-1). In exact canonical
// form each D_b is Hermitian, positive and unit trace, and its eigenvalues
// are the squared Schmidt coefficients.
inline std::vector<Eigen::MatrixXcd> bond_densities(const MatrixProductState &psi) {
    const std::size_t n = psi.size();
    const std::size_t c = psi.oc();
    std::vector<Eigen::MatrixXcd> dens(n > 0 ? n - 1 : 0);
    auto slices = [&](std::size_t i) {
        return physical_slices(psi.site(i), lbl::bond(i), lbl::phys(i), lbl::bond(i + 1));
    };
    // Left of the center: D_b lives on bond b, built from sites b..c.
    if (c > 0) {
        const auto a = slices(c);
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(a[0].rows(), a[0].rows());
        for (const auto &m : a) d.noalias() += m * m.adjoint();
        dens[c - 1] = d;
        for (std::size_t b = c - 1; b >= 1; --b) {
            const auto s = slices(b);
            Eigen::MatrixXcd nd = Eigen::MatrixXcd::Zero(s[0].rows(), s[0].rows());
            for (const auto &m : s) nd.noalias() += m * dens[b] * m.adjoint();
            dens[b - 1] = nd;
        }
    }
    // Right of the center: D_b on bond b built from sites c..b-1.
    if (c + 1 < n) {
        const auto a = slices(c);
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(a[0].cols(), a[0].cols());
        for (const auto &m : a) d.noalias() += m.transpose() * m.conjugate();
        dens[c] = d;
        for (std::size_t b = c + 2; b < n; ++b) {
            const auto s = slices(b - 1);
            Eigen::MatrixXcd nd = Eigen::MatrixXcd::Zero(s[0].cols(), s[0].cols());
            for (const auto &m : s) nd.noalias() += m.transpose() * dens[b - 2] * m.conjugate();
            dens[b - 1] = nd;
        }
    }
    return dens;
}

}  // namespace detail

/// Isometry residuals off the center, the norm residual, and the residual
/// of the bond-density recursion at every interior bond.
inline CanonicalReport check_canonical(const MatrixProductState &psi) {
    CanonicalReport rep;
    const std::size_t n = psi.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i < psi.oc()) {
            rep.max_isometry_residual =
                std::max(rep.max_isometry_residual, isometry_residual(psi.site(i), {lbl::bond(i + 1)}));
        } else if (i > psi.oc()) {
            rep.max_isometry_residual =
                std::max(rep.max_isometry_residual, isometry_residual(psi.site(i), {lbl::bond(i)}));
        }
    }
    rep.norm_residual = std::abs(overlap(psi, psi) - 1.0);
    for (const auto &d : detail::bond_densities(psi)) {
        const double herm = (d - d.adjoint()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(d, Eigen::EigenvaluesOnly);
        const double neg = std::max(0.0, -eig.eigenvalues().minCoeff());
        const double r = std::abs(d.trace().real() - 1.0) + herm + neg;
        rep.bond_residuals.push_back(r);
        rep.max_bond_residual = std::max(rep.max_bond_residual, r);
    }
    return rep;
}

/// Squared Schmidt coefficients at every interior bond. Requires canonical
/// form; weights are clamped at zero and renormalized.
inline std::vector<BondSpectrum> bond_spectra(const MatrixProductState &psi) {
    if (!psi.is_canonical()) throw GaugeError("bond_spectra needs a canonical state");
    std::vector<BondSpectrum> out;
    const auto dens = detail::bond_densities(psi);
    for (std::size_t b = 0; b < dens.size(); ++b) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dens[b], Eigen::EigenvaluesOnly);
        BondSpectrum sp;
        sp.bond = b + 1;
        double total = 0.0;
        for (Eigen::Index k = eig.eigenvalues().size(); k-- > 0;) {
            const double w = std::max(eig.eigenvalues()(k), 0.0);
            sp.weights.push_back(w);
            total += w;
        }
        if (total > 0.0) {
            for (auto &w : sp.weights) w /= total;
        }
        out.push_back(std::move(sp));
    }
    return out;
}

/// Inserts R R^{-1} on bond b (1..N-1): site b-1 absorbs R, site b absorbs
/// R^{-1}. The state is unchanged; the result is flagged non-canonical.
inline MatrixProductState inject_gauge(const MatrixProductState &psi, std::size_t b, const Eigen::MatrixXcd &r) {
    if (b < 1 || b >= psi.size()) throw RangeError("inject_gauge: bond must be interior");
    const std::size_t d = psi.bond_dim(b);
    if (static_cast<std::size_t>(r.rows()) != d || static_cast<std::size_t>(r.cols()) != d) {
        throw GaugeError("inject_gauge: matrix does not match bond dimension");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXcd> sv(r);
    const double smax = sv.singularValues()(0);
    const double smin = sv.singularValues()(sv.singularValues().size() - 1);
    if (!(smax > 0.0) || smin <= 1e-12 * smax || !std::isfinite(smax / smin)) {
        throw GaugeError("inject_gauge: matrix is singular or numerically ill-conditioned");
    }
    const Eigen::MatrixXcd rinv = r.partialPivLu().inverse();
    const std::string bond = lbl::bond(b);
    const IndexLabel in{bond, d, IndexKind::coherence};
    const IndexLabel tmp{detail::kTmpBond, d, IndexKind::coherence};

    std::vector<LabeledTensor> sites = psi.sites();
    sites[b - 1] = relabel(contract(sites[b - 1], from_matrix(r, {in}, {tmp})), detail::kTmpBond, bond);
    sites[b] = relabel(contract(from_matrix(rinv, {tmp}, {in}), sites[b]), detail::kTmpBond, bond);
    return MatrixProductState(std::move(sites), psi.oc(), false);
}

}  // namespace mprho
