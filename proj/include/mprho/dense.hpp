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

// Brute-force 2^N x 2^N density matrices, the trusted reference for every
// tensor-network operation. Deliberately simple: plain loops, no shared code
// with the contraction engine beyond reading raw site data.
//
// Qubit ordering: site 0 is the most significant bit of the dense index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mprho/channels.hpp"
#include "mprho/errors.hpp"
#include "mprho/mprho.hpp"
#include "mprho/mps.hpp"

namespace mprho::dense {

inline constexpr std::size_t kDefaultCap = 10;

struct DenseDensityMatrix {
    std::size_t n = 0;
    Eigen::MatrixXcd data;
};

namespace detail {

inline void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap) {
        throw OracleError("dense oracle refuses N = " + std::to_string(n) + " (cap " + std::to_string(cap) + ")");
    }
}

// Reads A[a, s, k, b] of an MPrho site by label name, whatever the stored order.
struct SiteView {
    const LabeledTensor *t;
    std::size_t sa, ss, sk, sb;  // strides
    std::size_t da, dk, db;

    SiteView(const LabeledTensor &tensor, std::size_t i, bool has_kappa) : t(&tensor) {
        const auto st = tensor.strides();
        sa = st[tensor.position(lbl::bond(i))];
        ss = st[tensor.position(lbl::phys(i))];
        sb = st[tensor.position(lbl::bond(i + 1))];
        da = tensor.dim(lbl::bond(i));
        db = tensor.dim(lbl::bond(i + 1));
        if (has_kappa) {
            sk = st[tensor.position(lbl::mix(i))];
            dk = tensor.dim(lbl::mix(i));
        } else {
            sk = 0;
            dk = 1;
        }
    }
    cplx operator()(std::size_t a, std::size_t s, std::size_t k, std::size_t b) const {
        return t->data()[a * sa + s * ss + k * sk + b * sb];
    }
};

}  // namespace detail

/// Materializes A A^dagger by sweeping site by site; T[S, S', b, b'] holds
/// the prefix operator with open right bonds.
inline DenseDensityMatrix from_mprho(const MPrho &rho, std::size_t cap = kDefaultCap) {
    const std::size_t n = rho.size();
    detail::check_cap(n, cap);
    // t is indexed ((S * P + S') * B + b) * B + b'
    std::size_t p = 1, bd = 1;
    std::vector<cplx> t(1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const detail::SiteView a(rho.site(i), i, true);
        const std::size_t np = p * 2, nb = a.db;
        // y[S, S', a', s, k, b] = sum_a t[S, S', a, a'] A[a, s, k, b]
        std::vector<cplx> y(p * p * bd * 2 * a.dk * nb, 0.0);
        for (std::size_t x = 0; x < p * p; ++x) {
            for (std::size_t al = 0; al < bd; ++al) {
                for (std::size_t alp = 0; alp < bd; ++alp) {
                    const cplx tv = t[(x * bd + al) * bd + alp];
                    if (tv == cplx{0.0, 0.0}) continue;
                    for (std::size_t s = 0; s < 2; ++s) {
                        for (std::size_t k = 0; k < a.dk; ++k) {
                            for (std::size_t b = 0; b < nb; ++b) {
                                y[((((x * bd + alp) * 2 + s) * a.dk + k) * nb) + b] += tv * a(al, s, k, b);
                            }
                        }
                    }
                }
            }
        }
        std::vector<cplx> nt(np * np * nb * nb, 0.0);
        for (std::size_t sr = 0; sr < p; ++sr) {
            for (std::size_t sc = 0; sc < p; ++sc) {
                const std::size_t x = sr * p + sc;
                for (std::size_t alp = 0; alp < bd; ++alp) {
                    for (std::size_t s = 0; s < 2; ++s) {
                        for (std::size_t k = 0; k < a.dk; ++k) {
                            for (std::size_t b = 0; b < nb; ++b) {
                                const cplx yv = y[((((x * bd + alp) * 2 + s) * a.dk + k) * nb) + b];
                                if (yv == cplx{0.0, 0.0}) continue;
                                for (std::size_t sp = 0; sp < 2; ++sp) {
                                    const std::size_t row = sr * 2 + s, col = sc * 2 + sp;
                                    for (std::size_t bp = 0; bp < nb; ++bp) {
                                        nt[((row * np + col) * nb + b) * nb + bp] += yv * std::conj(a(alp, sp, k, bp));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        t = std::move(nt);
        p = np;
        bd = nb;
    }
    DenseDensityMatrix out{n, Eigen::MatrixXcd(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))};
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < p; ++c) out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[r * p + c];
    }
    return out;
}

/// Amplitudes of an MPS, site 0 most significant.
inline Eigen::VectorXcd state_vector(const MatrixProductState &psi, std::size_t cap = 20) {
    const std::size_t n = psi.size();
    detail::check_cap(n, cap);
    std::size_t p = 1, bd = 1;
    std::vector<cplx> v(1, 1.0);  // v[S * B + b]
    for (std::size_t i = 0; i < n; ++i) {
        const detail::SiteView a(psi.site(i), i, false);
        std::vector<cplx> nv(p * 2 * a.db, 0.0);
        for (std::size_t x = 0; x < p; ++x) {
            for (std::size_t al = 0; al < bd; ++al) {
                const cplx vv = v[x * bd + al];
                for (std::size_t s = 0; s < 2; ++s) {
                    for (std::size_t b = 0; b < a.db; ++b) nv[(x * 2 + s) * a.db + b] += vv * a(al, s, 0, b);
                }
            }
        }
        v = std::move(nv);
        p *= 2;
        bd = a.db;
    }
    Eigen::VectorXcd out(static_cast<Eigen::Index>(p));
    for (std::size_t x = 0; x < p; ++x) out(static_cast<Eigen::Index>(x)) = v[x];
    return out;
}

inline DenseDensityMatrix from_state_vector(const Eigen::VectorXcd &v) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < static_cast<std::size_t>(v.size())) ++n;
    if ((std::size_t{1} << n) != static_cast<std::size_t>(v.size())) throw OracleError("state length is not a power of 2");
    return {n, v * v.adjoint()};
}

inline DenseDensityMatrix maximally_mixed(std::size_t n) {
    detail::check_cap(n, kDefaultCap);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    return {n, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d)};
}

namespace detail {

// Applies a 2^k x 2^k operator to the row index of m on the given sites
// (k = sites.size(), first site most significant within the operator).
inline Eigen::MatrixXcd left_apply(const Eigen::MatrixXcd &m, std::size_t n, const Eigen::MatrixXcd &op,
                                   const std::vector<std::size_t> &sites) {
    const std::size_t k = sites.size();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<std::size_t> bit(k);
    std::size_t mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (sites[j] >= n) throw OracleError("site index out of range");
        bit[j] = std::size_t{1} << (n - 1 - sites[j]);
        mask |= bit[j];
    }
    const std::size_t local = std::size_t{1} << k;
    auto compose = [&](std::size_t base, std::size_t code) {
        std::size_t idx = base;
        for (std::size_t j = 0; j < k; ++j) {
            if ((code >> (k - 1 - j)) & 1) idx |= bit[j];
        }
        return static_cast<Eigen::Index>(idx);
    };
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (std::size_t r = 0; r < local; ++r) {
            const Eigen::Index row = compose(base, r);
            for (std::size_t c = 0; c < local; ++c) {
                const cplx w = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                if (w == cplx{0.0, 0.0}) continue;
                out.row(row) += w * m.row(compose(base, c));
            }
        }
    }
    return out;
}

}  // namespace detail

/// sum_k K_k rho K_k^dagger with the channel acting on `sites`.
inline DenseDensityMatrix apply_channel_dense(const DenseDensityMatrix &rho, const KrausChannel &ch,
                                              const std::vector<std::size_t> &sites) {
    if (sites.size() != static_cast<std::size_t>(ch.arity())) throw OracleError("channel arity does not match sites");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.data.rows(), rho.data.cols());
    for (const auto &k : ch.operators()) {
        const Eigen::MatrixXcd kr = detail::left_apply(rho.data, rho.n, k, sites);
        acc += detail::left_apply(kr.adjoint(), rho.n, k, sites).adjoint();
    }
    return {rho.n, acc};
}

/// Traces out qubit i; the remaining qubits keep their relative order.
inline DenseDensityMatrix partial_trace_dense(const DenseDensityMatrix &rho, std::size_t i) {
    if (rho.n < 1 || i >= rho.n) throw OracleError("partial_trace_dense: site out of range");
    const std::size_t n = rho.n;
    const std::size_t low = n - 1 - i;  // bit position of site i
    const std::size_t d = std::size_t{1} << (n - 1);
    auto expand = [&](std::size_t x, std::size_t b) {
        const std::size_t lo = x & ((std::size_t{1} << low) - 1);
        const std::size_t hi = x >> low;
        return static_cast<Eigen::Index>((hi << (low + 1)) | (b << low) | lo);
    };
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rho.data(expand(r, 0), expand(c, 0)) + rho.data(expand(r, 1), expand(c, 1));
        }
    }
    return {n - 1, out};
}

inline double trace_dense(const DenseDensityMatrix &rho) {
    return rho.data.trace().real();
}

inline double hsip_dense(const DenseDensityMatrix &a, const DenseDensityMatrix &b) {
    if (a.data.rows() != b.data.rows()) throw OracleError("hsip_dense: dimension mismatch");
    // Tr[a b] = sum_ij a_ij b_ji
    return (a.data.cwiseProduct(b.data.transpose())).sum().real();
}

inline double purity_dense(const DenseDensityMatrix &rho) {
    return hsip_dense(rho, rho);
}

inline double fidelity_p_dense(const DenseDensityMatrix &a, const DenseDensityMatrix &b) {
    return hsip_dense(a, b) / std::max(purity_dense(a), purity_dense(b));
}

namespace detail {

inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd &m) {
    const Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const Eigen::VectorXd &lam = eig.eigenvalues();
    if (lam.size() > 0 && lam.minCoeff() < -1e-8) {
        throw OracleError("matrix is not positive semidefinite (min eigenvalue " + std::to_string(lam.minCoeff()) + ")");
    }
    const Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann-Jozsa fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity_uj(const DenseDensityMatrix &rho, const DenseDensityMatrix &sigma) {
    if (rho.data.rows() != sigma.data.rows()) throw OracleError("fidelity_uj: dimension mismatch");
    detail::psd_sqrt(sigma.data);  // validity check only
    const Eigen::MatrixXcd sr = detail::psd_sqrt(rho.data);
    const Eigen::MatrixXcd inner = sr * sigma.data * sr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig((inner + inner.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    const double t = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return t * t;
}

/// Tr[rho P]; letter k of the string acts on site k.
inline double expectation_dense(const DenseDensityMatrix &rho, std::string_view pauli) {
    const std::size_t n = rho.n;
    if (pauli.size() != n) throw OracleError("Pauli string length does not match N");
    std::size_t flip = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const char c = pauli[k];
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw OracleError("bad Pauli letter");
        if (c == 'X' || c == 'Y') flip |= std::size_t{1} << (n - 1 - k);
    }
    // P|y> = c(y)|y ^ flip>, so Tr[rho P] = sum_y c(y) rho[y, y ^ flip].
    cplx acc = 0.0;
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t y = 0; y < dim; ++y) {
        cplx c = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const int b = static_cast<int>((y >> (n - 1 - k)) & 1);
            switch (pauli[k]) {
                case 'Y':
                    c *= b == 0 ? cplx(0, 1) : cplx(0, -1);
                    break;
                case 'Z':
                    if (b == 1) c = -c;
                    break;
                default:
                    break;
            }
        }
        acc += c * rho.data(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(y ^ flip));
    }
    return acc.real();
}

inline std::vector<double> pauli_tomography_dense(const DenseDensityMatrix &rho, const std::vector<std::string> &strings) {
    std::vector<double> out;
    out.reserve(strings.size());
    for (const auto &p : strings) out.push_back(expectation_dense(rho, p));
    return out;
}

inline std::vector<double> bitstring_probabilities_dense(const DenseDensityMatrix &rho) {
    std::vector<double> out(static_cast<std::size_t>(rho.data.rows()));
    for (Eigen::Index k = 0; k < rho.data.rows(); ++k) out[static_cast<std::size_t>(k)] = rho.data(k, k).real();
    return out;
}

inline double min_eigenvalue(const DenseDensityMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig((rho.data + rho.data.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

inline double max_abs_diff(const DenseDensityMatrix &a, const DenseDensityMatrix &b) {
    if (a.data.rows() != b.data.rows()) throw OracleError("max_abs_diff: dimension mismatch");
    return (a.data - b.data).cwiseAbs().maxCoeff();
}

}  // namespace mprho::dense
