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

// Matrix decompositions over labeled tensors: truncated SVD, thin QR, and
// the factorization of positive semidefinite forms.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mprho/tensor.hpp"

namespace mprho {

/// Relative singular-value cutoff used when nothing else is requested.
inline constexpr double kDefaultCutoff = 1e-12;
inline constexpr std::size_t kUnlimitedRank = std::numeric_limits<std::size_t>::max();

struct SvdResult {
    LabeledTensor u;   // row labels + bond, isometric over the rows
    std::vector<double> s;  // descending, non-negative
    LabeledTensor vt;  // bond + column labels, isometric over the columns
    double discarded_weight = 0.0;  // sum of squared dropped singular values
};

namespace detail {

struct Partition {
    std::vector<IndexLabel> rows;
    std::vector<IndexLabel> cols;
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
};

// Row and column groups both keep the tensor's stored label order.
inline Partition partition(const LabeledTensor &t, const std::vector<std::string> &row_labels) {
    if (row_labels.empty()) throw PartitionError("row label set is empty");
    for (const auto &name : row_labels) {
        if (!t.has(name)) throw PartitionError("row label '" + name + "' is not on the tensor");
    }
    Partition p;
    for (const auto &l : t.labels()) {
        if (std::find(row_labels.begin(), row_labels.end(), l.name) != row_labels.end()) {
            p.rows.push_back(l);
            p.row_names.push_back(l.name);
        } else {
            p.cols.push_back(l);
            p.col_names.push_back(l.name);
        }
    }
    if (p.cols.empty()) throw PartitionError("row label set covers every label");
    return p;
}

inline std::size_t kept_rank(const Eigen::VectorXd &s, double cutoff, std::size_t max_rank) {
    const auto full = static_cast<std::size_t>(s.size());
    std::size_t keep = 1;
    if (cutoff == 0.0) {
        keep = full;
    } else if (full > 0 && s(0) > 0.0) {
        const double floor = cutoff * s(0);
        keep = 0;
        while (keep < full && s(static_cast<Eigen::Index>(keep)) > floor) ++keep;
    }
    keep = std::min(keep, max_rank);
    return std::max<std::size_t>(keep, 1);
}

}  // namespace detail

/// Truncated SVD of `t` viewed as a (row_labels) x (remaining labels)
/// matrix. Singular values at or below cutoff * s_max are dropped, then at
/// most max_rank are kept. The new bond carries `bond.name`/`bond.kind` on
/// both factors; `bond.dim` is ignored.
inline SvdResult svd(const LabeledTensor &t, const std::vector<std::string> &row_labels,
                     double cutoff = kDefaultCutoff, std::size_t max_rank = kUnlimitedRank,
                     IndexLabel bond = {"sigma", 1, IndexKind::coherence}) {
    if (cutoff < 0.0) throw PartitionError("svd cutoff must be non-negative");
    if (max_rank < 1) throw PartitionError("svd max_rank must be at least 1");
    const auto part = detail::partition(t, row_labels);
    const Eigen::MatrixXcd m = to_matrix(t, part.row_names, part.col_names);

    Eigen::BDCSVD<Eigen::MatrixXcd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = dec.singularValues();
    const std::size_t keep = detail::kept_rank(sv, cutoff, max_rank);
    const auto k = static_cast<Eigen::Index>(keep);

    SvdResult out;
    out.s.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) out.s[i] = sv(static_cast<Eigen::Index>(i));
    for (Eigen::Index i = k; i < sv.size(); ++i) out.discarded_weight += sv(i) * sv(i);

    bond.dim = keep;
    out.u = from_matrix(dec.matrixU().leftCols(k), part.rows, {bond});
    out.vt = from_matrix(dec.matrixV().leftCols(k).adjoint(), {bond}, part.cols);
    return out;
}

/// U * diag(s) * Vt with the bond contracted away.
inline LabeledTensor reconstruct(const SvdResult &r) {
    const std::string &bond = r.vt.labels().front().name;
    return contract(scale_along(r.u, bond, r.s), r.vt);
}

struct QrResult {
    LabeledTensor q;  // row labels + bond, isometric over the rows
    LabeledTensor r;  // bond + column labels
};

/// Thin QR with the same partition rules as svd(). No truncation.
inline QrResult qr(const LabeledTensor &t, const std::vector<std::string> &row_labels,
                   IndexLabel bond = {"sigma", 1, IndexKind::coherence}) {
    const auto part = detail::partition(t, row_labels);
    const Eigen::MatrixXcd m = to_matrix(t, part.row_names, part.col_names);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Eigen::MatrixXcd> dec(m);
    const Eigen::MatrixXcd q = dec.householderQ() * Eigen::MatrixXcd::Identity(m.rows(), k);
    const Eigen::MatrixXcd r = dec.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    bond.dim = static_cast<std::size_t>(k);
    return {from_matrix(q, part.rows, {bond}), from_matrix(r, {bond}, part.cols)};
}

/// B with B B^dagger = M M^dagger, columns ordered by descending weight.
struct PositiveFactor {
    Eigen::MatrixXcd b;
    Eigen::VectorXd weights;   // kept eigenvalues of M M^dagger, descending
    double min_eigenvalue = 0.0;  // before clamping
    double discarded_weight = 0.0;
};

/// Factorizes the positive form M M^dagger through a Hermitian
/// eigendecomposition of whichever Gram matrix is smaller. Eigenvalues at or
/// below weight_cutoff * lambda_max are dropped (negative ones included),
/// then at most max_rank are kept.
inline PositiveFactor positive_factor(const Eigen::MatrixXcd &m, double weight_cutoff = kDefaultCutoff,
                                      std::size_t max_rank = kUnlimitedRank) {
    const bool via_columns = m.cols() < m.rows();
    const Eigen::MatrixXcd gram = via_columns ? Eigen::MatrixXcd(m.adjoint() * m) : Eigen::MatrixXcd(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    const Eigen::VectorXd &lam = eig.eigenvalues();  // ascending
    const Eigen::Index n = lam.size();

    PositiveFactor out;
    out.min_eigenvalue = n > 0 ? lam(0) : 0.0;
    const double top = n > 0 ? std::max(lam(n - 1), 0.0) : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = n; i-- > 0;) {
        if (lam(i) > weight_cutoff * top && keep.size() < max_rank) {
            keep.push_back(i);
        } else if (lam(i) > 0.0) {
            out.discarded_weight += lam(i);
        }
    }
    if (keep.empty()) keep.push_back(n - 1);

    const auto r = static_cast<Eigen::Index>(keep.size());
    out.b.resize(m.rows(), r);
    out.weights.resize(r);
    for (Eigen::Index c = 0; c < r; ++c) {
        const Eigen::Index i = keep[static_cast<std::size_t>(c)];
        const double w = std::max(lam(i), 0.0);
        out.weights(c) = w;
        if (via_columns) {
            out.b.col(c) = m * eig.eigenvectors().col(i);
        } else {
            out.b.col(c) = eig.eigenvectors().col(i) * std::sqrt(w);
        }
    }
    return out;
}

/// Largest entry of |Q^dagger Q - 1| where Q is `t` read as a
/// (contracted labels) x (open labels) matrix.
inline double isometry_residual(const LabeledTensor &t, const std::vector<std::string> &open) {
    std::vector<std::string> contracted;
    for (const auto &l : t.labels()) {
        if (std::find(open.begin(), open.end(), l.name) == open.end()) contracted.push_back(l.name);
    }
    const Eigen::MatrixXcd q = to_matrix(t, contracted, open);
    const Eigen::MatrixXcd g = q.adjoint() * q;
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace mprho
