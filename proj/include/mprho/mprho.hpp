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

// Locally purified density operators.
//
// Site i carries labels (chi_i, s_i, kappa_i, chi_{i+1}) in that stored
// order; rho = A A^dagger with every chi and kappa index summed over the
// ket/bra pair. Canonical form means every site left (right) of `oc` is an
// isometry from (chi_i, s_i, kappa_i) onto chi_{i+1} (from (s_i, kappa_i,
// chi_{i+1}) onto chi_i).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mprho/chain.hpp"
#include "mprho/linalg.hpp"
#include "mprho/mps.hpp"
#include "mprho/tensor.hpp"

namespace mprho {

class MatrixProductDensityOperator {
   public:
    MatrixProductDensityOperator() = default;

    MatrixProductDensityOperator(std::vector<LabeledTensor> sites, std::size_t oc, bool canonical)
        : oc_(oc), canonical_(canonical) {
        if (sites.empty()) throw RangeError("an MPrho needs at least one site");
        if (oc_ >= sites.size()) throw RangeError("orthogonality center out of range");
        sites_.reserve(sites.size());
        for (std::size_t i = 0; i < sites.size(); ++i) {
            sites_.push_back(normalized(std::move(sites[i]), i));
            check_bond(i);
        }
        check_bond(sites_.size());
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
        return *sites_.at(i);
    }
    std::vector<LabeledTensor> sites() const {
        std::vector<LabeledTensor> out;
        out.reserve(sites_.size());
        for (const auto &p : sites_) out.push_back(*p);
        return out;
    }
    std::size_t bond_dim(std::size_t i) const {
        if (i > sites_.size()) throw RangeError("bond index out of range");
        return i < sites_.size() ? sites_[i]->dim(lbl::bond(i)) : 1;
    }
    std::size_t kappa_dim(std::size_t i) const {
        return site(i).dim(lbl::mix(i));
    }
    std::size_t max_bond_dim() const {
        std::size_t m = 1;
        for (std::size_t i = 0; i <= sites_.size(); ++i) m = std::max(m, bond_dim(i));
        return m;
    }
    std::size_t max_kappa_dim() const {
        std::size_t m = 1;
        for (std::size_t i = 0; i < sites_.size(); ++i) m = std::max(m, kappa_dim(i));
        return m;
    }

    /// Copy with the listed sites replaced; untouched sites are shared, so
    /// the cost scales with the number of changes rather than the length.
    /// `canonical` and `oc` describe the result.
    MatrixProductDensityOperator with_sites(std::vector<std::pair<std::size_t, LabeledTensor>> changes,
                                            std::size_t oc, bool canonical) const {
        if (oc >= sites_.size()) throw RangeError("orthogonality center out of range");
        MatrixProductDensityOperator out = *this;
        out.oc_ = oc;
        out.canonical_ = canonical;
        for (auto &[i, t] : changes) {
            if (i >= sites_.size()) throw RangeError("site index out of range");
            out.sites_[i] = normalized(std::move(t), i);
        }
        for (const auto &c : changes) {
            out.check_bond(c.first);
            out.check_bond(c.first + 1);
        }
        return out;
    }

    /// Copy with site i replaced. `canonical` and `oc` describe the result.
    MatrixProductDensityOperator with_site(std::size_t i, LabeledTensor t, std::size_t oc, bool canonical) const {
        std::vector<std::pair<std::size_t, LabeledTensor>> changes;
        changes.emplace_back(i, std::move(t));
        return with_sites(std::move(changes), oc, canonical);
    }

   private:
    static std::shared_ptr<const LabeledTensor> normalized(LabeledTensor t, std::size_t i) {
        t = permute(t, {lbl::bond(i), lbl::phys(i), lbl::mix(i), lbl::bond(i + 1)});
        if (t.dim(lbl::phys(i)) != kQubitDim) throw LabelError("physical dimension must be 2");
        return std::make_shared<const LabeledTensor>(std::move(t));
    }

    // Checks bond b against both neighbours (boundary bonds must be trivial).
    void check_bond(std::size_t b) const {
        const std::size_t n = sites_.size();
        if (b == 0 || b == n) {
            const auto &t = b == 0 ? sites_.front() : sites_.back();
            if (t->dim(lbl::bond(b)) != 1) throw LabelError("boundary bonds must have dimension 1");
            return;
        }
        if (sites_[b]->dim(lbl::bond(b)) != sites_[b - 1]->dim(lbl::bond(b))) {
            throw ContractionError("bond " + lbl::bond(b) + " dims disagree between neighbouring sites");
        }
    }

    std::vector<std::shared_ptr<const LabeledTensor>> sites_;
    std::size_t oc_ = 0;
    bool canonical_ = false;
};

using MPrho = MatrixProductDensityOperator;

/// Decorates every site with a dimension-1 mixture index.
inline MPrho from_mps(const MatrixProductState &psi) {
    std::vector<LabeledTensor> sites;
    sites.reserve(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        sites.push_back(add_unit_label(psi.site(i), {lbl::mix(i), 1, IndexKind::mixture}));
    }
    return MPrho(std::move(sites), psi.oc(), psi.is_canonical());
}

inline MPrho ghz(std::size_t n) {
    return from_mps(ghz_mps(n));
}

inline MPrho product_rho(const std::vector<int> &bits) {
    return from_mps(product_state(bits));
}

inline MPrho orthogonalize(const MPrho &rho, std::size_t target, const TruncationPolicy &policy = {}) {
    if (target >= rho.size()) throw RangeError("orthogonalize target out of range");
    if (rho.is_canonical()) {
        // Only the sites between the old and new center change.
        if (target == rho.oc()) return rho;
        const std::size_t lo = std::min(target, rho.oc()), hi = std::max(target, rho.oc());
        std::vector<LabeledTensor> window;
        for (std::size_t i = lo; i <= hi; ++i) window.push_back(rho.site(i));
        detail::move_center(window, rho.oc(), target, policy, lo);
        std::vector<std::pair<std::size_t, LabeledTensor>> changes;
        for (std::size_t i = lo; i <= hi; ++i) changes.emplace_back(i, std::move(window[i - lo]));
        return rho.with_sites(std::move(changes), target, true);
    }
    std::vector<LabeledTensor> sites = rho.sites();
    detail::canonicalize(sites, target, policy);
    return MPrho(std::move(sites), target, true);
}

/// Largest isometry residual over the off-center sites.
inline double check_isometry(const MPrho &rho) {
    double worst = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (i < rho.oc()) {
            worst = std::max(worst, isometry_residual(rho.site(i), {lbl::bond(i + 1)}));
        } else if (i > rho.oc()) {
            worst = std::max(worst, isometry_residual(rho.site(i), {lbl::bond(i)}));
        }
    }
    return worst;
}

/// Drops negligible mixture weight at one site: the site is refactorized as
/// (chi_i, s_i, chi_{i+1}) x kappa_i and only singular directions whose
/// weight exceeds kappa_cutoff * (largest weight) are kept, at most
/// max_kappa of them. This is a kappa isometry up to the dropped weight.
inline MPrho compress_kappa(const MPrho &rho, std::size_t i, const TruncationPolicy &policy = {}) {
    const LabeledTensor &a = rho.site(i);
    const std::string k = lbl::mix(i);
    const std::string tmp = "kappa_tmp";
    const SvdResult r = svd(a, {lbl::bond(i), lbl::phys(i), lbl::bond(i + 1)}, std::sqrt(policy.kappa_cutoff),
                            policy.max_kappa, {tmp, 1, IndexKind::mixture});
    if (r.s.size() == a.dim(k)) return rho;
    return rho.with_site(i, relabel(scale_along(r.u, tmp, r.s), tmp, k), rho.oc(), rho.is_canonical());
}

struct MixtureSpectrum {
    std::size_t site = 0;
    std::vector<double> probabilities;
};

namespace detail {

inline Eigen::MatrixXcd kappa_gram(const MPrho &centered, std::size_t i) {
    const Eigen::MatrixXcd m = to_matrix(centered.site(i), {lbl::bond(i), lbl::phys(i), lbl::bond(i + 1)}, {lbl::mix(i)});
    return m.adjoint() * m;
}

inline std::vector<double> normalized(std::vector<double> p) {
    double total = 0.0;
    for (auto &x : p) {
        if (x < 0.0) x = 0.0;  // numerical noise only
        total += x;
    }
    if (total > 0.0) {
        for (auto &x : p) x /= total;
    }
    return p;
}

}  // namespace detail

/// Weights of the kappa subspaces at `site`: the diagonal of the kappa Gram
/// form with the center moved onto the site, L1-normalized. This depends on
/// the kappa gauge currently stored.
inline MixtureSpectrum mixture_spectrum(const MPrho &rho, std::size_t site) {
    const MPrho c = orthogonalize(rho, site);
    const Eigen::MatrixXcd g = detail::kappa_gram(c, site);
    std::vector<double> p(static_cast<std::size_t>(g.rows()));
    for (Eigen::Index k = 0; k < g.rows(); ++k) p[static_cast<std::size_t>(k)] = g(k, k).real();
    return {site, detail::normalized(std::move(p))};
}

/// Gauge-independent variant: eigenvalues of the same Gram form, descending.
inline MixtureSpectrum mixture_spectrum_eigen(const MPrho &rho, std::size_t site) {
    const MPrho c = orthogonalize(rho, site);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(detail::kappa_gram(c, site), Eigen::EigenvaluesOnly);
    std::vector<double> p;
    for (Eigen::Index k = eig.eigenvalues().size(); k-- > 0;) p.push_back(eig.eigenvalues()(k));
    return {site, detail::normalized(std::move(p))};
}

namespace detail {

// Site j of the old chain becomes site j-1.
inline LabeledTensor shift_site_labels_down(const LabeledTensor &t, std::size_t j) {
    return relabel(t, {{lbl::bond(j), lbl::bond(j - 1)},
                       {lbl::phys(j), lbl::phys(j - 1)},
                       {lbl::mix(j), lbl::mix(j - 1)},
                       {lbl::bond(j + 1), lbl::bond(j)}});
}

}  // namespace detail

/// Erasure of site i: its physical and mixture indices are fused and handed
/// to a neighbour (i-1 when it exists, else i+1) as extra mixture, so the
/// neighbour's kappa becomes kappa_nb * 2 * kappa_i. Later sites are
/// relabelled to keep the chain contiguous; the center ends on the
/// neighbour.
inline MPrho partial_trace_site(const MPrho &rho, std::size_t i, const TruncationPolicy &policy = {}) {
    const std::size_t n = rho.size();
    if (n < 2) throw RangeError("partial_trace_site would leave an empty chain");
    if (i >= n) throw RangeError("partial_trace_site: site out of range");

    const MPrho c = orthogonalize(rho, i, policy);
    const std::string fused = "erased_" + std::to_string(i);
    const LabeledTensor ai = merge_labels(c.site(i), {lbl::phys(i), lbl::mix(i)}, fused, IndexKind::mixture);

    std::vector<LabeledTensor> sites;
    sites.reserve(n - 1);
    std::size_t center = 0;
    if (i > 0) {
        for (std::size_t j = 0; j + 1 < i; ++j) sites.push_back(c.site(j));
        LabeledTensor merged = contract(c.site(i - 1), ai);
        merged = merge_labels(merged, {lbl::mix(i - 1), fused}, lbl::mix(i - 1), IndexKind::mixture);
        sites.push_back(relabel(merged, lbl::bond(i + 1), lbl::bond(i)));
        for (std::size_t j = i + 1; j < n; ++j) sites.push_back(detail::shift_site_labels_down(c.site(j), j));
        center = i - 1;
    } else {
        LabeledTensor merged = contract(ai, c.site(1));
        merged = merge_labels(merged, {lbl::mix(1), fused}, lbl::mix(1), IndexKind::mixture);
        sites.push_back(detail::shift_site_labels_down(merged, 1));
        for (std::size_t j = 2; j < n; ++j) sites.push_back(detail::shift_site_labels_down(c.site(j), j));
        center = 0;
    }
    MPrho out(std::move(sites), center, true);
    if (policy.compress_kappa) out = compress_kappa(out, center, policy);
    return out;
}

/// Moves the mixture index of `from` onto the adjacent site `to`: the pair is
/// contracted, the destination takes the fused kappa_from * kappa_to index,
/// the source is left with kappa = 1, and the pair is split again by SVD.
/// The center ends on `to`.
inline MPrho transport_kappa(const MPrho &rho, std::size_t from, std::size_t to, const TruncationPolicy &policy = {}) {
    if (from >= rho.size() || to >= rho.size()) throw RangeError("transport_kappa: site out of range");
    if (!(from + 1 == to || to + 1 == from)) throw RangeError("transport_kappa: sites must be adjacent");
    const MPrho c = orthogonalize(rho, from, policy);
    const std::size_t l = std::min(from, to);
    const std::size_t r = l + 1;

    LabeledTensor theta = contract(c.site(l), c.site(r));
    theta = merge_labels(theta, {lbl::mix(from), lbl::mix(to)}, lbl::mix(to), IndexKind::mixture);
    theta = add_unit_label(theta, {lbl::mix(from), 1, IndexKind::mixture});

    const std::string mid = lbl::bond(r);
    SvdResult f = svd(theta, {lbl::bond(l), lbl::phys(l), lbl::mix(l)}, policy.cutoff, policy.max_chi,
                      {mid, 1, IndexKind::coherence});
    std::vector<std::pair<std::size_t, LabeledTensor>> changes;
    if (to == r) {
        changes.emplace_back(l, f.u);
        changes.emplace_back(r, scale_along(f.vt, mid, f.s));
    } else {
        changes.emplace_back(l, scale_along(f.u, mid, f.s));
        changes.emplace_back(r, f.vt);
    }
    MPrho out = c.with_sites(std::move(changes), to, true);
    if (policy.compress_kappa) out = compress_kappa(out, to, policy);
    return out;
}

/// Applies an isometry U (kappa_new x kappa_old, U^dagger U = 1) to the
/// mixture index of `site`. rho is unchanged.
inline MPrho apply_kappa_isometry(const MPrho &rho, std::size_t site, const Eigen::MatrixXcd &u, double tol = 1e-10) {
    if (site >= rho.size()) throw RangeError("apply_kappa_isometry: site out of range");
    const std::string k = lbl::mix(site);
    const std::size_t kd = rho.kappa_dim(site);
    if (static_cast<std::size_t>(u.cols()) != kd || u.rows() < u.cols()) {
        throw GaugeError("apply_kappa_isometry: matrix shape does not fit kappa dimension");
    }
    const double res = (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
    if (res > tol) throw GaugeError("apply_kappa_isometry: matrix is not an isometry");
    const std::string tmp = "kappa_tmp";
    const LabeledTensor um = from_matrix(u, {{tmp, static_cast<std::size_t>(u.rows()), IndexKind::mixture}},
                                         {{k, kd, IndexKind::mixture}});
    const LabeledTensor a = relabel(contract(rho.site(site), um), tmp, k);
    return rho.with_site(site, a, rho.oc(), rho.is_canonical());
}

}  // namespace mprho
