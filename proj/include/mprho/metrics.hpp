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

// Scalar diagnostics of MPrho states: trace, purity, Hilbert-Schmidt inner
// product, purity-normalized fidelity, Pauli expectations and bitstring
// probabilities. Nothing here materializes rho.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mprho/mprho.hpp"

namespace mprho {

namespace detail {

// mats[s][k] is the (chi_i x chi_{i+1}) slice of site i at fixed s, kappa.
using SiteSlices = std::array<std::vector<Eigen::MatrixXcd>, 2>;

inline SiteSlices site_slices(const MPrho &rho, std::size_t i) {
    const LabeledTensor &t = rho.site(i);  // (chi_i, s_i, kappa_i, chi_{i+1})
    const auto dl = static_cast<Eigen::Index>(t.dim(lbl::bond(i)));
    const auto dr = static_cast<Eigen::Index>(t.dim(lbl::bond(i + 1)));
    const std::size_t kd = t.dim(lbl::mix(i));
    SiteSlices out;
    auto data = t.data();
    for (std::size_t s = 0; s < 2; ++s) {
        out[s].reserve(kd);
        for (std::size_t k = 0; k < kd; ++k) {
            Eigen::MatrixXcd m(dl, dr);
            for (Eigen::Index a = 0; a < dl; ++a) {
                for (Eigen::Index b = 0; b < dr; ++b) {
                    const auto off = ((static_cast<std::size_t>(a) * 2 + s) * kd + k) * static_cast<std::size_t>(dr) +
                                     static_cast<std::size_t>(b);
                    m(a, b) = data[off];
                }
            }
            out[s].push_back(std::move(m));
        }
    }
    return out;
}

// One-layer transfer through site slices with a local operator O:
// E'[b,b'] = sum O[s',s] A_{s,k}^T E conj(A_{s',k}).
inline Eigen::MatrixXcd transfer(const SiteSlices &a, const Eigen::MatrixXcd &env, const Eigen::Matrix2cd &op) {
    const Eigen::Index dr = a[0][0].cols();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dr, dr);
    for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
            const cplx w = op(sp, s);
            if (w == cplx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < a[0].size(); ++k) {
                out.noalias() += w * (a[s][k].transpose() * env * a[sp][k].conjugate());
            }
        }
    }
    return out;
}

inline Eigen::Matrix2cd pauli_matrix(char c) {
    Eigen::Matrix2cd m;
    switch (c) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, cplx(0, -1), cplx(0, 1), 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            throw ParseError(std::string("unknown Pauli letter '") + c + "'");
    }
    return m;
}

inline Eigen::Matrix2cd projector(int bit) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(bit, bit) = 1.0;
    return m;
}

// "MPO form" of one site: R[chi_i, s_i, chi_{i+1}, chi_i', s_i', chi_{i+1}']
// = sum_k A[chi_i, s_i, k, chi_{i+1}] conj(A[chi_i', s_i', k, chi_{i+1}']).
inline LabeledTensor site_operator(const MPrho &rho, std::size_t i) {
    const LabeledTensor &a = rho.site(i);
    const LabeledTensor b = conj(prime(a, {lbl::bond(i), lbl::phys(i), lbl::bond(i + 1)}));
    return contract(a, b);
}

inline std::string hashed(const std::string &name) {
    return name + "#";
}

}  // namespace detail

/// Tr[rho].
inline double trace(const MPrho &rho) {
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (std::size_t i = 0; i < rho.size(); ++i) env = detail::transfer(detail::site_slices(rho, i), env, id);
    return env(0, 0).real();
}

namespace detail {

// Environment over the four layers (rho ket, rho bra, sigma ket, sigma bra)
// at bond b, before anything is absorbed.
inline LabeledTensor hsip_boundary(std::size_t b) {
    return LabeledTensor({{lbl::bond(b), 1, IndexKind::coherence},
                          {primed(lbl::bond(b)), 1, IndexKind::coherence},
                          {hashed(lbl::bond(b)), 1, IndexKind::coherence},
                          {primed(hashed(lbl::bond(b))), 1, IndexKind::coherence}},
                         {cplx{1.0, 0.0}});
}

// Absorbs site i of both chains into an environment from either side.
inline LabeledTensor hsip_absorb(const LabeledTensor &env, const MPrho &rho, const MPrho &sigma, std::size_t i) {
    const LabeledTensor r = site_operator(rho, i);
    // sigma's physical legs are crossed so that the contraction reads
    // sum rho[s, s'] sigma[s', s].
    const LabeledTensor q = relabel(site_operator(sigma, i),
                                    {{lbl::bond(i), hashed(lbl::bond(i))},
                                     {primed(lbl::bond(i)), primed(hashed(lbl::bond(i)))},
                                     {lbl::bond(i + 1), hashed(lbl::bond(i + 1))},
                                     {primed(lbl::bond(i + 1)), primed(hashed(lbl::bond(i + 1)))},
                                     {lbl::phys(i), primed(lbl::phys(i))},
                                     {primed(lbl::phys(i)), lbl::phys(i)}});
    return contract(contract(env, r), q);
}

}  // namespace detail

/// Tr[rho sigma] by a four-layer transfer contraction, clamped at zero.
inline double hsip(const MPrho &rho, const MPrho &sigma) {
    if (rho.size() != sigma.size()) throw RangeError("hsip of chains with different lengths");
    LabeledTensor env = detail::hsip_boundary(0);
    for (std::size_t i = 0; i < rho.size(); ++i) env = detail::hsip_absorb(env, rho, sigma, i);
    return std::max(0.0, env.data()[0].real());
}

/// Tr[rho sigma] for a pair of chains that change locally between calls.
/// Left and right environments are cached, and only the span of sites whose
/// tensors changed since the previous call is contracted again. Results agree
/// with hsip() to rounding.
class HsipTracker {
   public:
    double operator()(const MPrho &rho, const MPrho &sigma) {
        if (rho.size() != sigma.size()) throw RangeError("hsip of chains with different lengths");
        const std::size_t n = rho.size();
        if (rho_.size() != n) reset(n);

        // Sites [first, last) differ from those the caches were built on.
        std::size_t first = n, last = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!rho_[i].shares_storage_with(rho.site(i)) || !sigma_[i].shares_storage_with(sigma.site(i))) {
                first = std::min(first, i);
                last = i + 1;
                rho_[i] = rho.site(i);
                sigma_[i] = sigma.site(i);
            }
        }
        // left_[k] covers sites < k and right_[k] sites >= k. left_[k] is
        // reusable for k <= first and right_[k] for k >= last; the two sides
        // are rebuilt towards a join at the right end of the changed span,
        // which keeps left-to-right sweeps cheap.
        const std::size_t lo = std::min(left_valid_, first);
        const std::size_t hi = std::max(right_valid_, last);
        const std::size_t join = std::clamp(last, lo, hi);
        for (std::size_t k = lo; k < join; ++k) left_[k + 1] = detail::hsip_absorb(left_[k], rho, sigma, k);
        for (std::size_t k = hi; k > join; --k) right_[k - 1] = detail::hsip_absorb(right_[k], rho, sigma, k - 1);
        left_valid_ = join;
        right_valid_ = join;
        return std::max(0.0, contract(left_[join], right_[join]).scalar_value().real());
    }

   private:
    void reset(std::size_t n) {
        rho_.assign(n, LabeledTensor());
        sigma_.assign(n, LabeledTensor());
        left_.assign(n + 1, LabeledTensor());
        right_.assign(n + 1, LabeledTensor());
        left_[0] = detail::hsip_boundary(0);
        right_[n] = detail::hsip_boundary(n);
        left_valid_ = 0;
        right_valid_ = n;
    }

    std::vector<LabeledTensor> rho_, sigma_;
    std::vector<LabeledTensor> left_, right_;
    std::size_t left_valid_ = 0;
    std::size_t right_valid_ = 0;
};

inline double purity(const MPrho &rho) {
    return hsip(rho, rho);
}

/// Tr[rho sigma] / max(P(rho), P(sigma)).
inline double fidelity_p(const MPrho &rho, const MPrho &sigma) {
    const double pr = purity(rho);
    const double ps = purity(sigma);
    const double denom = std::max(pr, ps);
    if (!(denom > 0.0)) return 0.0;
    return hsip(rho, sigma) / denom;
}

namespace detail {

inline void check_pauli_string(std::string_view p, std::size_t n) {
    if (p.size() != n) {
        throw ParseError("Pauli string '" + std::string(p) + "' has length " + std::to_string(p.size()) +
                         ", expected " + std::to_string(n));
    }
    for (char c : p) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw ParseError("Pauli string '" + std::string(p) + "' contains '" + std::string(1, c) + "'");
        }
    }
}

}  // namespace detail

/// Tr[rho P] for a Pauli string; character k acts on site k.
inline double expectation(const MPrho &rho, std::string_view pauli) {
    detail::check_pauli_string(pauli, rho.size());
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        env = detail::transfer(detail::site_slices(rho, i), env, detail::pauli_matrix(pauli[i]));
    }
    return env(0, 0).real();
}

/// <s|rho|s> for a string over {'0','1'}, clamped to [0, 1].
inline double bitstring_probability(const MPrho &rho, std::string_view bits) {
    if (bits.size() != rho.size()) throw ParseError("bitstring length does not match chain length");
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') throw ParseError("bitstring must contain only '0' and '1'");
        env = detail::transfer(detail::site_slices(rho, i), env, detail::projector(bits[i] - '0'));
    }
    return std::clamp(env(0, 0).real(), 0.0, 1.0);
}

/// Every computational-basis probability, indexed with site 0 as the most
/// significant bit. Prefix environments are shared through a depth-first
/// walk. Refuses N > 24.
inline std::vector<double> all_bitstring_probabilities(const MPrho &rho) {
    const std::size_t n = rho.size();
    if (n > 24) throw RangeError("all_bitstring_probabilities is limited to N <= 24");
    std::vector<detail::SiteSlices> slices;
    slices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) slices.push_back(detail::site_slices(rho, i));
    std::vector<double> out(std::size_t{1} << n, 0.0);
    const std::array<Eigen::Matrix2cd, 2> proj{detail::projector(0), detail::projector(1)};

    std::vector<Eigen::MatrixXcd> stack(n + 1);
    stack[0] = Eigen::MatrixXcd::Ones(1, 1);
    auto walk = [&](auto &&self, std::size_t depth, std::uint64_t prefix) -> void {
        if (depth == n) {
            out[prefix] = std::clamp(stack[n](0, 0).real(), 0.0, 1.0);
            return;
        }
        for (int b = 0; b < 2; ++b) {
            stack[depth + 1] = detail::transfer(slices[depth], stack[depth], proj[static_cast<std::size_t>(b)]);
            self(self, depth + 1, (prefix << 1) | static_cast<std::uint64_t>(b));
        }
    };
    walk(walk, 0, 0);
    return out;
}

namespace detail {

// Transfer of one site for each Pauli letter, acting on the column-major
// vectorized environment: T[b + b' chi_r, a + a' chi_l]. Built from the
// kappa-contracted Gram form of the site, so applying it costs no more
// than chi_l^2 chi_r^2 whatever the mixture dimension.
struct PauliTransfers {
    std::array<Eigen::MatrixXcd, 4> t;  // I, X, Y, Z
};

inline std::size_t pauli_slot(char c) {
    switch (c) {
        case 'I':
            return 0;
        case 'X':
            return 1;
        case 'Y':
            return 2;
        default:
            return 3;
    }
}

inline PauliTransfers pauli_transfers(const MPrho &rho, std::size_t i) {
    const LabeledTensor &a = rho.site(i);
    const auto dl = static_cast<Eigen::Index>(a.dim(lbl::bond(i)));
    const auto dr = static_cast<Eigen::Index>(a.dim(lbl::bond(i + 1)));
    const Eigen::MatrixXcd m = to_matrix(a, {lbl::bond(i), lbl::phys(i), lbl::bond(i + 1)}, {lbl::mix(i)});
    const Eigen::MatrixXcd g = m * m.adjoint();  // rows (a, s, b), (a', s', b')
    auto row = [&](Eigen::Index al, Eigen::Index s, Eigen::Index b) { return (al * 2 + s) * dr + b; };
    PauliTransfers out;
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    for (std::size_t p = 0; p < 4; ++p) {
        const Eigen::Matrix2cd op = pauli_matrix(kLetters[p]);
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dr * dr, dl * dl);
        for (Eigen::Index s = 0; s < 2; ++s) {
            for (Eigen::Index sp = 0; sp < 2; ++sp) {
                const cplx w = op(sp, s);
                if (w == cplx{0.0, 0.0}) continue;
                for (Eigen::Index ap = 0; ap < dl; ++ap) {
                    for (Eigen::Index al = 0; al < dl; ++al) {
                        for (Eigen::Index bp = 0; bp < dr; ++bp) {
                            for (Eigen::Index b = 0; b < dr; ++b) {
                                t(b + bp * dr, al + ap * dl) += w * g(row(al, s, b), row(ap, sp, bp));
                            }
                        }
                    }
                }
            }
        }
        out.t[p] = std::move(t);
    }
    return out;
}

// Gram-based transfers need (2 chi_l chi_r)^2 entries per site.
inline bool pauli_transfers_fit(const MPrho &rho, std::size_t i) {
    const std::size_t side = 2 * rho.bond_dim(i) * rho.bond_dim(i + 1);
    return side * side <= (std::size_t{1} << 22);
}

}  // namespace detail

/// Expectations of many Pauli strings, in input order. Per-site transfers
/// are built once and environments of the prefix shared with the previous
/// string are reused, so lexicographically ordered input is cheapest.
inline std::vector<double> pauli_tomography(const MPrho &rho, const std::vector<std::string> &strings) {
    const std::size_t n = rho.size();
    for (const auto &p : strings) detail::check_pauli_string(p, n);
    std::vector<std::optional<detail::PauliTransfers>> fast(n);
    std::vector<detail::SiteSlices> slices(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (detail::pauli_transfers_fit(rho, i)) {
            fast[i] = detail::pauli_transfers(rho, i);
        } else {
            slices[i] = detail::site_slices(rho, i);
        }
    }
    auto step = [&](std::size_t i, char c, const Eigen::MatrixXcd &env) -> Eigen::MatrixXcd {
        if (!fast[i]) return detail::transfer(slices[i], env, detail::pauli_matrix(c));
        const auto dr = static_cast<Eigen::Index>(rho.bond_dim(i + 1));
        const Eigen::VectorXcd v = fast[i]->t[detail::pauli_slot(c)] *
                                   Eigen::Map<const Eigen::VectorXcd>(env.data(), env.size());
        return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dr, dr);
    };

    std::vector<Eigen::MatrixXcd> stack(n + 1);
    stack[0] = Eigen::MatrixXcd::Ones(1, 1);
    const std::string *prev = nullptr;
    std::vector<double> out;
    out.reserve(strings.size());
    for (const auto &p : strings) {
        std::size_t common = 0;
        if (prev != nullptr) {
            while (common < n && (*prev)[common] == p[common]) ++common;
        }
        for (std::size_t i = common; i < n; ++i) stack[i + 1] = step(i, p[i], stack[i]);
        out.push_back(stack[n](0, 0).real());
        prev = &p;
    }
    return out;
}

/// All 4^N Pauli strings in lexicographic I < X < Y < Z order. N <= 8.
inline std::vector<std::string> all_pauli_strings(std::size_t n) {
    if (n > 8) throw RangeError("all_pauli_strings is limited to N <= 8");
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::vector<std::string> out;
    const std::size_t total = std::size_t{1} << (2 * n);
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        std::string p(n, 'I');
        for (std::size_t i = 0; i < n; ++i) p[i] = kLetters[(code >> (2 * (n - 1 - i))) & 3];
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace mprho
