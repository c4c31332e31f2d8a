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

// Kraus channels on one or two qubits and their application to MPrho
// states. Two-qubit operators use the basis index 2*s_i + s_{i+1}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mprho/chain.hpp"
#include "mprho/linalg.hpp"
#include "mprho/mprho.hpp"
#include "mprho/tensor.hpp"

namespace mprho {

class KrausChannel {
   public:
    KrausChannel() = default;

    KrausChannel(std::string name, int arity, std::vector<Eigen::MatrixXcd> ops,
                 std::map<std::string, double> params = {})
        : name_(std::move(name)), arity_(arity), ops_(std::move(ops)), params_(std::move(params)) {
        if (arity_ != 1 && arity_ != 2) throw ChannelError("channel arity must be 1 or 2");
        if (ops_.empty()) throw ChannelError("channel needs at least one Kraus operator");
        const Eigen::Index d = arity_ == 1 ? 2 : 4;
        for (const auto &k : ops_) {
            if (k.rows() != d || k.cols() != d) throw ChannelError("Kraus operator shape does not match arity");
        }
    }

    const std::string &name() const {
        return name_;
    }
    int arity() const {
        return arity_;
    }
    std::size_t kraus_count() const {
        return ops_.size();
    }
    const std::vector<Eigen::MatrixXcd> &operators() const {
        return ops_;
    }
    const std::map<std::string, double> &params() const {
        return params_;
    }

    /// Kraus operators as labeled tensors (out..., in..., with the given
    /// physical names), out labels primed, plus a Kraus label "L".
    LabeledTensor as_tensor(const std::vector<std::string> &phys) const {
        if (phys.size() != static_cast<std::size_t>(arity_)) throw ChannelError("as_tensor: wrong number of sites");
        std::vector<IndexLabel> labels;
        for (const auto &p : phys) labels.push_back({primed(p), 2, IndexKind::physical});
        for (const auto &p : phys) labels.push_back({p, 2, IndexKind::physical});
        labels.push_back({"L", ops_.size(), IndexKind::kraus});
        const std::size_t d = arity_ == 1 ? 2 : 4;
        std::vector<cplx> data(d * d * ops_.size());
        for (std::size_t o = 0; o < d; ++o) {
            for (std::size_t in = 0; in < d; ++in) {
                for (std::size_t k = 0; k < ops_.size(); ++k) {
                    data[(o * d + in) * ops_.size() + k] =
                        ops_[k](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(in));
                }
            }
        }
        return LabeledTensor(std::move(labels), std::move(data));
    }

   private:
    std::string name_;
    int arity_ = 1;
    std::vector<Eigen::MatrixXcd> ops_;
    std::map<std::string, double> params_;
};

/// Largest entry of |sum_k K_k^dagger K_k - 1|.
inline double completeness_residual(const KrausChannel &ch) {
    const Eigen::Index d = ch.operators().front().rows();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (const auto &k : ch.operators()) acc.noalias() += k.adjoint() * k;
    return (acc - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

namespace pauli {

inline Eigen::MatrixXcd I() {
    return Eigen::MatrixXcd::Identity(2, 2);
}
inline Eigen::MatrixXcd X() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Eigen::MatrixXcd Y() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline Eigen::MatrixXcd Z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace pauli

namespace detail {

inline void check_rate(double r, const char *what) {
    if (!(r >= 0.0 && r <= 1.0)) throw ChannelError(std::string(what) + " must lie in [0, 1]");
}

inline Eigen::MatrixXcd diag(std::initializer_list<cplx> v) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (auto z : v) d(k++) = z;
    return d.asDiagonal();
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

}  // namespace detail

/// {sqrt(alpha) 1, sqrt(1-alpha) Z}.
inline KrausChannel dephasing(double alpha) {
    detail::check_rate(alpha, "dephasing rate");
    return {"dephasing", 1, {std::sqrt(alpha) * pauli::I(), std::sqrt(1.0 - alpha) * pauli::Z()}, {{"alpha", alpha}}};
}

/// {sqrt(beta) 1, sqrt(1-beta) X}.
inline KrausChannel bitflip(double beta) {
    detail::check_rate(beta, "bit-flip rate");
    return {"bitflip", 1, {std::sqrt(beta) * pauli::I(), std::sqrt(1.0 - beta) * pauli::X()}, {{"beta", beta}}};
}

/// Single-qubit phase damping from a Y rotation of the environment:
/// E0 = |0><0| + cos(phi/2)|1><1|, E1 = sin(phi/2)|1><1|.
inline KrausChannel z_phi(double phi) {
    const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
    return {"z_phi", 1, {detail::diag({1.0, c}), detail::diag({0.0, s})}, {{"phi", phi}}};
}

/// Two-qubit parity damping: E0 = |00><00| + c(|01><01| + |10><10|) + |11><11|,
/// E1 = s(|01><01| + |10><10|), with c = cos(phi/2), s = sin(phi/2).
/// Both odd-parity entries of E1 carry sin(phi/2); that is what makes the
/// pair complete.
inline KrausChannel zz_phi(double phi) {
    const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
    return {"zz_phi", 2, {detail::diag({1.0, c, c, 1.0}), detail::diag({0.0, s, s, 0.0})}, {{"phi", phi}}};
}

/// Controlled phase damping: E0 = 1 - (1-c)|11><11|, E1 = s|11><11|.
inline KrausChannel cz_phi(double phi) {
    const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
    return {"cz_phi", 2, {detail::diag({1.0, 1.0, 1.0, c}), detail::diag({0.0, 0.0, 0.0, s})}, {{"phi", phi}}};
}

/// Weight giving the {sqrt(a) 1, sqrt(1-a) P} form the same action as the
/// phi-parameterized damping channel.
inline double damping_weight(double phi) {
    return (1.0 + std::cos(phi / 2.0)) / 2.0;
}

/// {sqrt(a) 1, sqrt(1-a) Z}.
inline KrausChannel z_weighted(double a) {
    detail::check_rate(a, "weight");
    return {"z_weighted", 1, {std::sqrt(a) * pauli::I(), std::sqrt(1.0 - a) * pauli::Z()}, {{"alpha", a}}};
}

/// {sqrt(a) 1, sqrt(1-a) Z (x) Z}.
inline KrausChannel zz_weighted(double a) {
    detail::check_rate(a, "weight");
    return {"zz_weighted",
            2,
            {std::sqrt(a) * Eigen::MatrixXcd::Identity(4, 4), std::sqrt(1.0 - a) * detail::kron(pauli::Z(), pauli::Z())},
            {{"alpha", a}}};
}

/// {sqrt(a) 1, sqrt(1-a) CZ}.
inline KrausChannel cz_weighted(double a) {
    detail::check_rate(a, "weight");
    return {"cz_weighted",
            2,
            {std::sqrt(a) * Eigen::MatrixXcd::Identity(4, 4), std::sqrt(1.0 - a) * detail::diag({1.0, 1.0, 1.0, -1.0})},
            {{"alpha", a}}};
}

/// Unitary channel (one Kraus operator).
inline KrausChannel unitary_channel(std::string name, const Eigen::MatrixXcd &u, std::map<std::string, double> params = {}) {
    const int arity = u.rows() == 2 ? 1 : 2;
    return {std::move(name), arity, {u}, std::move(params)};
}

/// A system-environment unitary acting on env (x) system, the environment
/// being the most significant factor and starting in |e_0>.
class EnvironmentUnitary {
   public:
    explicit EnvironmentUnitary(Eigen::MatrixXcd u, double tol = 1e-12) : u_(std::move(u)) {
        if (u_.rows() != u_.cols() || (u_.rows() != 4 && u_.rows() != 8)) {
            throw ChannelError("environment unitary must be 4x4 or 8x8 (dim-2 environment)");
        }
        const double r = (u_.adjoint() * u_ - Eigen::MatrixXcd::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
        if (r > tol) throw ChannelError("environment coupling is not unitary");
    }

    const Eigen::MatrixXcd &matrix() const {
        return u_;
    }
    int system_arity() const {
        return u_.rows() == 4 ? 1 : 2;
    }

    /// 1_env (x) |0><0| + R (x) |1><1| with R acting on the environment,
    /// for a one-qubit system.
    static EnvironmentUnitary controlled(const Eigen::Matrix2cd &r) {
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
        for (int e = 0; e < 2; ++e) {
            for (int f = 0; f < 2; ++f) {
                u(2 * e + 0, 2 * f + 0) = e == f ? 1.0 : 0.0;
                u(2 * e + 1, 2 * f + 1) = r(e, f);
            }
        }
        return EnvironmentUnitary(u);
    }

   private:
    Eigen::MatrixXcd u_;
};

/// R_Y(phi) = [[cos(phi/2), -sin(phi/2)], [sin(phi/2), cos(phi/2)]].
inline Eigen::Matrix2cd ry(double phi) {
    Eigen::Matrix2cd m;
    const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
    m << c, -s, s, c;
    return m;
}

/// E_k = (<e_k| (x) 1) U (|e_0> (x) 1).
inline KrausChannel kraus_from_environment(const EnvironmentUnitary &env, std::string name = "environment") {
    const Eigen::Index d = env.matrix().rows() / 2;
    std::vector<Eigen::MatrixXcd> ops;
    for (Eigen::Index k = 0; k < 2; ++k) ops.push_back(env.matrix().block(k * d, 0, d, d));
    return {std::move(name), env.system_arity(), std::move(ops)};
}

/// Registry lookup for the named channels addressable from configs.
inline KrausChannel make_channel(const std::string &name, const std::map<std::string, double> &params) {
    auto get = [&](const char *key) {
        auto it = params.find(key);
        if (it == params.end()) throw ChannelError("channel '" + name + "' needs parameter '" + key + "'");
        return it->second;
    };
    if (name == "dephasing") return dephasing(get("alpha"));
    if (name == "bitflip") return bitflip(get("beta"));
    if (name == "z_phi") return z_phi(get("phi"));
    if (name == "zz_phi") return zz_phi(get("phi"));
    if (name == "cz_phi") return cz_phi(get("phi"));
    throw ChannelError("unknown channel '" + name + "'");
}

inline const std::vector<std::string> &registry_names() {
    static const std::vector<std::string> names{"dephasing", "bitflip", "z_phi", "zz_phi", "cz_phi"};
    return names;
}

/// Bookkeeping of one channel application.
struct ApplyDiagnostics {
    std::size_t kappa_before = 1;         // combined kappa over the touched sites
    std::size_t kappa_stacked = 1;        // after stacking the Kraus index, before any compression
    std::size_t kappa_after = 1;          // what the touched site(s) finally carry
    double min_relative_eigenvalue = 0.0; // two-body factorization: lambda_min / lambda_max
    double discarded_weight = 0.0;
};

/// Applies a one-qubit channel at `site`. The new mixture index is
/// (Kraus index, old kappa) fused, Kraus index slowest; the center ends on
/// `site`.
inline MPrho apply_one_body(const MPrho &rho, const KrausChannel &ch, std::size_t site,
                            const TruncationPolicy &policy = {}, ApplyDiagnostics *diag = nullptr) {
    if (ch.arity() != 1) throw ChannelError("apply_one_body needs a one-qubit channel");
    if (site >= rho.size()) throw RangeError("apply_one_body: site out of range");
    const MPrho c = orthogonalize(rho, site, policy);
    const std::string s = lbl::phys(site);
    const LabeledTensor k = ch.as_tensor({s});  // (s', s, L)
    LabeledTensor a = contract(c.site(site), k);  // (chi, kappa, chi', s', L)
    a = relabel(a, primed(s), s);
    const std::size_t kb = c.kappa_dim(site);
    a = merge_labels(a, {"L", lbl::mix(site)}, lbl::mix(site), IndexKind::mixture);
    MPrho out = c.with_site(site, std::move(a), site, true);
    const std::size_t stacked = out.kappa_dim(site);
    if (policy.compress_kappa || stacked > policy.max_kappa) out = compress_kappa(out, site, policy);
    if (diag != nullptr) {
        diag->kappa_before = kb;
        diag->kappa_stacked = stacked;
        diag->kappa_after = out.kappa_dim(site);
        diag->min_relative_eigenvalue = 0.0;
    }
    return out;
}

/// Applies a two-qubit channel on sites (i, i+1) without any variational
/// loop: the pair is contracted, the channel is applied, the resulting
/// positive two-site form is factorized through a Hermitian eigensolve into
/// a combined mixture index, and the pair is split again by SVD with that
/// index riding on site i. Site i+1 is left with kappa = 1; the center ends
/// on i+1.
inline MPrho apply_two_body(const MPrho &rho, const KrausChannel &ch, std::size_t i,
                            const TruncationPolicy &policy = {}, ApplyDiagnostics *diag = nullptr) {
    if (ch.arity() != 2) throw ChannelError("apply_two_body needs a two-qubit channel");
    if (i + 1 >= rho.size()) throw RangeError("apply_two_body: bond (i, i+1) out of range");
    const std::size_t j = i + 1;

    // (1) center onto the pair
    const std::size_t target = rho.is_canonical() && rho.oc() == j ? j : i;
    const MPrho c = orthogonalize(rho, target, policy);
    const std::size_t kb = c.kappa_dim(i) * c.kappa_dim(j);

    // (2) contract the shared bond
    LabeledTensor theta = contract(c.site(i), c.site(j));  // (chi_i, s_i, k_i, s_j, k_j, chi_{j+1})

    // (3) channel on the two physical legs
    const std::string si = lbl::phys(i), sj = lbl::phys(j);
    LabeledTensor phi = contract(theta, ch.as_tensor({si, sj}));  // (chi_i, k_i, k_j, chi_{j+1}, s_i', s_j', L)
    phi = relabel(phi, {{primed(si), si}, {primed(sj), sj}});

    // (4) transverse factorization of the positive two-site form
    const std::vector<std::string> rows{lbl::bond(i), si, sj, lbl::bond(j + 1)};
    const std::vector<std::string> cols{"L", lbl::mix(i), lbl::mix(j)};
    const Eigen::MatrixXcd m = to_matrix(phi, rows, cols);
    const PositiveFactor pf = positive_factor(m, policy.kappa_cutoff, policy.max_kappa);
    std::vector<IndexLabel> row_labels;
    for (const auto &r : rows) row_labels.push_back(phi.label(r));
    const std::string kc = "kappa_pair";
    const LabeledTensor b =
        from_matrix(pf.b, row_labels, {{kc, static_cast<std::size_t>(pf.b.cols()), IndexKind::mixture}});

    // (5) longitudinal split, kappa riding on site i
    const std::string mid = lbl::bond(j);
    const SvdResult f = svd(b, {lbl::bond(i), si, kc}, policy.cutoff, policy.max_chi, {mid, 1, IndexKind::coherence});

    // (6) site i+1 gets a unit kappa
    LabeledTensor left = relabel(f.u, kc, lbl::mix(i));
    LabeledTensor right = add_unit_label(scale_along(f.vt, mid, f.s), {lbl::mix(j), 1, IndexKind::mixture});

    // (7) reassemble
    std::vector<std::pair<std::size_t, LabeledTensor>> changes;
    changes.emplace_back(i, std::move(left));
    changes.emplace_back(j, std::move(right));
    MPrho out = c.with_sites(std::move(changes), j, true);
    if (diag != nullptr) {
        const double top = pf.weights.size() > 0 ? pf.weights(0) : 0.0;
        diag->kappa_before = kb;
        diag->kappa_stacked = kb * ch.kraus_count();
        diag->kappa_after = out.kappa_dim(i);
        diag->min_relative_eigenvalue = top > 0.0 ? pf.min_eigenvalue / top : 0.0;
        diag->discarded_weight = pf.discarded_weight + f.discarded_weight;
    }
    return out;
}

/// Dispatches on arity; `site` is the left site for two-qubit channels.
inline MPrho apply_channel(const MPrho &rho, const KrausChannel &ch, std::size_t site,
                           const TruncationPolicy &policy = {}, ApplyDiagnostics *diag = nullptr) {
    return ch.arity() == 1 ? apply_one_body(rho, ch, site, policy, diag) : apply_two_body(rho, ch, site, policy, diag);
}

/// How a channel changes the mixture dimension at a site (or site pair).
struct KrausCountReport {
    std::size_t kraus_count = 0;
    std::size_t kappa_before = 0;
    std::size_t kappa_after_stacking = 0;  // before compression
    std::size_t kappa_after_compression = 0;
    bool bound_holds = false;  // kappa_after_stacking <= L * kappa_before
};

inline KrausCountReport kraus_count_effect(const MPrho &rho, const KrausChannel &ch, std::size_t site = 0) {
    KrausCountReport rep;
    rep.kraus_count = ch.kraus_count();
    ApplyDiagnostics d;
    TruncationPolicy raw;
    raw.kappa_cutoff = 0.0;
    if (ch.arity() == 1) {
        apply_one_body(rho, ch, site, raw, &d);
        rep.kappa_before = d.kappa_before;
        rep.kappa_after_stacking = d.kappa_stacked;
        TruncationPolicy comp;
        comp.compress_kappa = true;
        rep.kappa_after_compression = apply_one_body(rho, ch, site, comp).kappa_dim(site);
    } else {
        // Without truncation the factorized rank is the stacked column count
        // capped by the row count; report the actual combined index.
        const MPrho out = apply_two_body(rho, ch, site, raw, &d);
        rep.kappa_before = d.kappa_before;
        rep.kappa_after_stacking = out.kappa_dim(site);
        TruncationPolicy comp;
        rep.kappa_after_compression = apply_two_body(rho, ch, site, comp).kappa_dim(site);
    }
    rep.bound_holds = rep.kappa_after_stacking <= rep.kraus_count * rep.kappa_before;
    return rep;
}

}  // namespace mprho
