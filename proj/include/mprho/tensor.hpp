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

// Dense complex tensors with named indices.
//
// Storage is row-major over the stored label order: the last label varies
// fastest. Every operation returns a new tensor; nothing mutates in place.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mprho/errors.hpp"

namespace mprho {

using cplx = std::complex<double>;

enum class IndexKind { coherence, physical, mixture, kraus };

inline const char *to_string(IndexKind kind) {
    switch (kind) {
        case IndexKind::coherence:
            return "coherence";
        case IndexKind::physical:
            return "physical";
        case IndexKind::mixture:
            return "mixture";
        case IndexKind::kraus:
            return "kraus";
    }
    return "coherence";
}

inline IndexKind index_kind_from_string(std::string_view text) {
    if (text == "coherence") return IndexKind::coherence;
    if (text == "physical") return IndexKind::physical;
    if (text == "mixture") return IndexKind::mixture;
    if (text == "kraus") return IndexKind::kraus;
    throw ParseError("unknown index kind '" + std::string(text) + "'");
}

struct IndexLabel {
    std::string name;
    std::size_t dim = 1;
    IndexKind kind = IndexKind::coherence;

    bool operator==(const IndexLabel &) const = default;
};

class LabeledTensor {
   public:
    /// Rank-0 tensor holding zero.
    LabeledTensor() : data_(std::make_shared<const std::vector<cplx>>(1, cplx{0.0, 0.0})) {
    }

    LabeledTensor(std::vector<IndexLabel> labels, std::vector<cplx> data)
        : labels_(std::move(labels)), data_(std::make_shared<const std::vector<cplx>>(std::move(data))) {
        validate();
    }

    /// True when both tensors carry the same labels over the same shared
    /// buffer (a cheap identity test, not a value comparison).
    bool shares_storage_with(const LabeledTensor &o) const {
        return data_ == o.data_ && labels_ == o.labels_;
    }

    /// Same data under new labels (dims must multiply to the same size).
    /// The element buffer is immutable and shared, not copied.
    LabeledTensor with_labels(std::vector<IndexLabel> labels) const {
        return LabeledTensor(SharedTag{}, std::move(labels), data_);
    }

    static LabeledTensor zeros(std::vector<IndexLabel> labels) {
        std::size_t n = 1;
        for (const auto &l : labels) n *= l.dim;
        return LabeledTensor(std::move(labels), std::vector<cplx>(n, cplx{0.0, 0.0}));
    }

    static LabeledTensor scalar(cplx value) {
        return LabeledTensor({}, {value});
    }

    const std::vector<IndexLabel> &labels() const {
        return labels_;
    }
    std::span<const cplx> data() const {
        return *data_;
    }
    std::size_t rank() const {
        return labels_.size();
    }
    std::size_t size() const {
        return data_->size();
    }

    bool has(std::string_view name) const {
        return find(name) != labels_.size();
    }

    std::size_t position(std::string_view name) const {
        std::size_t p = find(name);
        if (p == labels_.size()) {
            throw LabelError("tensor has no label '" + std::string(name) + "'");
        }
        return p;
    }

    const IndexLabel &label(std::string_view name) const {
        return labels_[position(name)];
    }

    std::size_t dim(std::string_view name) const {
        return label(name).dim;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(labels_.size());
        for (const auto &l : labels_) out.push_back(l.name);
        return out;
    }

    /// Element access with indices given in stored label order.
    cplx at(std::initializer_list<std::size_t> index) const {
        return (*data_)[offset(std::span<const std::size_t>(index.begin(), index.size()))];
    }
    cplx at(std::span<const std::size_t> index) const {
        return (*data_)[offset(index)];
    }

    cplx scalar_value() const {
        if (!labels_.empty()) throw LabelError("scalar_value() on a tensor of rank " + std::to_string(rank()));
        return (*data_)[0];
    }

    double norm() const {
        double acc = 0.0;
        for (const auto &z : *data_) acc += std::norm(z);
        return std::sqrt(acc);
    }

    /// Row-major strides over the stored label order.
    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(labels_.size(), 1);
        for (std::size_t k = labels_.size(); k-- > 1;) s[k - 1] = s[k] * labels_[k].dim;
        return s;
    }

   private:
    std::size_t find(std::string_view name) const {
        for (std::size_t k = 0; k < labels_.size(); ++k) {
            if (labels_[k].name == name) return k;
        }
        return labels_.size();
    }

    std::size_t offset(std::span<const std::size_t> index) const {
        if (index.size() != labels_.size()) throw LabelError("index arity does not match tensor rank");
        std::size_t off = 0;
        for (std::size_t k = 0; k < labels_.size(); ++k) {
            if (index[k] >= labels_[k].dim) throw RangeError("index out of range on label '" + labels_[k].name + "'");
            off = off * labels_[k].dim + index[k];
        }
        return off;
    }

    void validate() const {
        std::size_t n = 1;
        for (std::size_t k = 0; k < labels_.size(); ++k) {
            if (labels_[k].dim < 1) throw LabelError("label '" + labels_[k].name + "' has dimension 0");
            for (std::size_t j = 0; j < k; ++j) {
                if (labels_[j].name == labels_[k].name) {
                    throw LabelError("duplicate label '" + labels_[k].name + "'");
                }
            }
            n *= labels_[k].dim;
        }
        if (n != data_->size()) {
            throw LabelError(
                "data length " + std::to_string(data_->size()) + " does not match label dims product " +
                std::to_string(n));
        }
    }

    std::vector<IndexLabel> labels_;
    std::shared_ptr<const std::vector<cplx>> data_;

    struct SharedTag {};
    LabeledTensor(SharedTag, std::vector<IndexLabel> labels, std::shared_ptr<const std::vector<cplx>> data)
        : labels_(std::move(labels)), data_(std::move(data)) {
        validate();
    }
};

/// Reorders the stored labels. `order` must name every label exactly once.
inline LabeledTensor permute(const LabeledTensor &t, std::span<const std::string> order) {
    const std::size_t r = t.rank();
    if (order.size() != r) throw LabelError("permute: order names " + std::to_string(order.size()) + " labels, tensor has " + std::to_string(r));
    std::vector<std::size_t> perm(r);
    bool identity = true;
    for (std::size_t k = 0; k < r; ++k) {
        perm[k] = t.position(order[k]);
        identity = identity && perm[k] == k;
    }
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (perm[j] == perm[k]) throw LabelError("permute: label '" + order[k] + "' repeated");
        }
    }
    if (identity) return t;

    const auto &old = t.labels();
    const auto old_strides = t.strides();
    std::vector<IndexLabel> labels(r);
    std::vector<std::size_t> dims(r), step(r);
    for (std::size_t k = 0; k < r; ++k) {
        labels[k] = old[perm[k]];
        dims[k] = old[perm[k]].dim;
        step[k] = old_strides[perm[k]];
    }
    auto src_data = t.data();
    std::vector<cplx> out(t.size());
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    for (std::size_t o = 0; o < out.size(); ++o) {
        out[o] = src_data[src];
        for (std::size_t k = r; k-- > 0;) {
            ++idx[k];
            src += step[k];
            if (idx[k] < dims[k]) break;
            src -= step[k] * dims[k];
            idx[k] = 0;
        }
    }
    return LabeledTensor(std::move(labels), std::move(out));
}

inline LabeledTensor permute(const LabeledTensor &t, std::initializer_list<std::string> order) {
    std::vector<std::string> v(order);
    return permute(t, std::span<const std::string>(v));
}

/// Renames labels; pairs whose source name is absent are ignored.
inline LabeledTensor relabel(const LabeledTensor &t, std::span<const std::pair<std::string, std::string>> renames) {
    std::vector<IndexLabel> labels = t.labels();
    for (auto &l : labels) {
        for (const auto &[from, to] : renames) {
            if (l.name == from) {
                l.name = to;
                break;
            }
        }
    }
    return t.with_labels(std::move(labels));
}

inline LabeledTensor relabel(const LabeledTensor &t, std::initializer_list<std::pair<std::string, std::string>> renames) {
    std::vector<std::pair<std::string, std::string>> v(renames);
    return relabel(t, std::span<const std::pair<std::string, std::string>>(v));
}

inline LabeledTensor relabel(const LabeledTensor &t, const std::string &from, const std::string &to) {
    return relabel(t, {{from, to}});
}

/// Changes the kind tag of one label.
inline LabeledTensor retag(const LabeledTensor &t, std::string_view name, IndexKind kind) {
    std::vector<IndexLabel> labels = t.labels();
    labels[t.position(name)].kind = kind;
    return LabeledTensor(std::move(labels), std::vector<cplx>(t.data().begin(), t.data().end()));
}

inline LabeledTensor conj(const LabeledTensor &t) {
    std::vector<cplx> out(t.data().begin(), t.data().end());
    for (auto &z : out) z = std::conj(z);
    return LabeledTensor(t.labels(), std::move(out));
}

/// Suffix appended to a label name to form its primed (bra-side) partner.
inline constexpr std::string_view kPrime = "'";

inline std::string primed(std::string_view name) {
    return std::string(name) + std::string(kPrime);
}

/// Primes the given labels; with an empty list every label is primed.
inline LabeledTensor prime(const LabeledTensor &t, const std::vector<std::string> &names = {}) {
    std::vector<IndexLabel> labels = t.labels();
    for (auto &l : labels) {
        if (names.empty() || std::find(names.begin(), names.end(), l.name) != names.end()) l.name = primed(l.name);
    }
    return LabeledTensor(std::move(labels), std::vector<cplx>(t.data().begin(), t.data().end()));
}

/// Strips one prime from every label that carries it.
inline LabeledTensor unprime(const LabeledTensor &t) {
    std::vector<IndexLabel> labels = t.labels();
    for (auto &l : labels) {
        if (l.name.size() >= kPrime.size() && l.name.ends_with(kPrime)) l.name.resize(l.name.size() - kPrime.size());
    }
    return LabeledTensor(std::move(labels), std::vector<cplx>(t.data().begin(), t.data().end()));
}

/// Complex conjugate with every label mapped to its primed partner.
inline LabeledTensor dagger(const LabeledTensor &t) {
    return prime(conj(t));
}

inline LabeledTensor scale(const LabeledTensor &t, cplx factor) {
    std::vector<cplx> out(t.data().begin(), t.data().end());
    for (auto &z : out) z *= factor;
    return LabeledTensor(t.labels(), std::move(out));
}

/// Multiplies every slice along `name` by the matching weight.
inline LabeledTensor scale_along(const LabeledTensor &t, std::string_view name, std::span<const double> weights) {
    const std::size_t p = t.position(name);
    const std::size_t d = t.labels()[p].dim;
    if (weights.size() != d) throw ReshapeError("scale_along: weight count does not match label dim");
    const std::size_t inner = t.strides()[p];
    std::vector<cplx> out(t.data().begin(), t.data().end());
    for (std::size_t o = 0; o < out.size(); ++o) out[o] *= weights[(o / inner) % d];
    return LabeledTensor(t.labels(), std::move(out));
}

/// Appends a dimension-1 label.
inline LabeledTensor add_unit_label(const LabeledTensor &t, IndexLabel label) {
    if (label.dim != 1) throw ReshapeError("add_unit_label needs a dimension-1 label");
    std::vector<IndexLabel> labels = t.labels();
    labels.push_back(std::move(label));
    return LabeledTensor(std::move(labels), std::vector<cplx>(t.data().begin(), t.data().end()));
}

/// Fixes `name` to `value`, dropping the label.
inline LabeledTensor slice(const LabeledTensor &t, std::string_view name, std::size_t value) {
    const std::size_t p = t.position(name);
    const std::size_t d = t.labels()[p].dim;
    if (value >= d) throw RangeError("slice value out of range on '" + std::string(name) + "'");
    const std::size_t inner = t.strides()[p];
    const std::size_t outer = t.size() / (inner * d);
    std::vector<IndexLabel> labels = t.labels();
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(p));
    std::vector<cplx> out;
    out.reserve(outer * inner);
    auto src = t.data();
    for (std::size_t a = 0; a < outer; ++a) {
        const std::size_t base = (a * d + value) * inner;
        out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(base),
                   src.begin() + static_cast<std::ptrdiff_t>(base + inner));
    }
    return LabeledTensor(std::move(labels), std::move(out));
}

namespace detail {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::size_t dims_product(const std::vector<IndexLabel> &labels) {
    std::size_t n = 1;
    for (const auto &l : labels) n *= l.dim;
    return n;
}

}  // namespace detail

/// Sums over every label name shared by `a` and `b`. The result carries the
/// unshared labels of `a` followed by those of `b`.
inline LabeledTensor contract(const LabeledTensor &a, const LabeledTensor &b) {
    std::vector<std::string> free_a, shared, free_b;
    std::vector<IndexLabel> out_labels;
    for (const auto &la : a.labels()) {
        if (b.has(la.name)) {
            const auto &lb = b.label(la.name);
            if (lb.dim != la.dim) {
                throw ContractionError(
                    "label '" + la.name + "' has dim " + std::to_string(la.dim) + " vs " + std::to_string(lb.dim));
            }
            shared.push_back(la.name);
        } else {
            free_a.push_back(la.name);
            out_labels.push_back(la);
        }
    }
    for (const auto &lb : b.labels()) {
        if (!a.has(lb.name)) {
            free_b.push_back(lb.name);
            out_labels.push_back(lb);
        }
    }

    std::vector<std::string> order_a = free_a;
    order_a.insert(order_a.end(), shared.begin(), shared.end());
    std::vector<std::string> order_b = shared;
    order_b.insert(order_b.end(), free_b.begin(), free_b.end());
    const LabeledTensor pa = permute(a, order_a);
    const LabeledTensor pb = permute(b, order_b);

    std::size_t k = 1;
    for (const auto &s : shared) k *= a.dim(s);
    const auto m = static_cast<Eigen::Index>(pa.size() / k);
    const auto n = static_cast<Eigen::Index>(pb.size() / k);
    const auto kk = static_cast<Eigen::Index>(k);

    std::vector<cplx> out(static_cast<std::size_t>(m * n));
    Eigen::Map<const detail::RowMatrix> ma(pa.data().data(), m, kk);
    Eigen::Map<const detail::RowMatrix> mb(pb.data().data(), kk, n);
    Eigen::Map<detail::RowMatrix> mc(out.data(), m, n);
    mc.noalias() = ma * mb;
    return LabeledTensor(std::move(out_labels), std::move(out));
}

/// Flattens the tensor into a matrix whose row index runs over `rows` and
/// column index over `cols`, each linearized row-major in the given order.
inline Eigen::MatrixXcd to_matrix(const LabeledTensor &t, const std::vector<std::string> &rows,
                                  const std::vector<std::string> &cols) {
    std::vector<std::string> order = rows;
    order.insert(order.end(), cols.begin(), cols.end());
    const LabeledTensor p = permute(t, order);
    std::size_t m = 1;
    for (const auto &r : rows) m *= t.dim(r);
    const std::size_t n = t.size() / m;
    Eigen::Map<const detail::RowMatrix> view(p.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    return Eigen::MatrixXcd(view);
}

/// Inverse of to_matrix.
inline LabeledTensor from_matrix(const Eigen::MatrixXcd &m, std::vector<IndexLabel> rows,
                                 const std::vector<IndexLabel> &cols) {
    if (detail::dims_product(rows) != static_cast<std::size_t>(m.rows()) ||
        detail::dims_product(cols) != static_cast<std::size_t>(m.cols())) {
        throw ReshapeError("from_matrix: label dims do not match matrix shape");
    }
    std::vector<cplx> data(static_cast<std::size_t>(m.size()));
    Eigen::Map<detail::RowMatrix>(data.data(), m.rows(), m.cols()) = m;
    rows.insert(rows.end(), cols.begin(), cols.end());
    return LabeledTensor(std::move(rows), std::move(data));
}

/// Fuses `names` into one label of dimension prod(dims). The fused label
/// takes the slot of `names[0]`; the first name is the slowest-varying
/// digit of the fused index.
inline LabeledTensor merge_labels(const LabeledTensor &t, const std::vector<std::string> &names,
                                  const std::string &merged_name, IndexKind kind) {
    if (names.empty()) throw ReshapeError("merge_labels: no labels given");
    const std::size_t anchor = t.position(names.front());
    std::size_t dim = 1;
    for (const auto &n : names) dim *= t.dim(n);

    std::vector<std::string> order;
    std::vector<IndexLabel> labels;
    for (std::size_t k = 0; k < t.rank(); ++k) {
        const auto &l = t.labels()[k];
        const bool merged = std::find(names.begin(), names.end(), l.name) != names.end();
        if (k == anchor) {
            order.insert(order.end(), names.begin(), names.end());
            labels.push_back(IndexLabel{merged_name, dim, kind});
        } else if (!merged) {
            order.push_back(l.name);
            labels.push_back(l);
        }
    }
    LabeledTensor p = permute(t, order);
    return LabeledTensor(std::move(labels), std::vector<cplx>(p.data().begin(), p.data().end()));
}

/// Splits `name` into `parts` in place; the first part is the slowest digit.
inline LabeledTensor split_label(const LabeledTensor &t, std::string_view name, const std::vector<IndexLabel> &parts) {
    const std::size_t p = t.position(name);
    std::size_t prod = 1;
    for (const auto &l : parts) prod *= l.dim;
    if (prod != t.labels()[p].dim) {
        throw ReshapeError("split_label: parts multiply to " + std::to_string(prod) + ", label '" + std::string(name) +
                           "' has dim " + std::to_string(t.labels()[p].dim));
    }
    std::vector<IndexLabel> labels;
    for (std::size_t k = 0; k < t.rank(); ++k) {
        if (k == p) {
            labels.insert(labels.end(), parts.begin(), parts.end());
        } else {
            labels.push_back(t.labels()[k]);
        }
    }
    return LabeledTensor(std::move(labels), std::vector<cplx>(t.data().begin(), t.data().end()));
}

/// Largest entrywise deviation after aligning `b` to the label order of `a`.
inline double max_abs_diff(const LabeledTensor &a, const LabeledTensor &b) {
    const LabeledTensor pb = permute(b, a.names());
    for (std::size_t k = 0; k < a.rank(); ++k) {
        if (a.labels()[k].dim != pb.labels()[k].dim) throw ContractionError("max_abs_diff: dim mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - pb.data()[i]));
    return worst;
}

inline double frobenius_distance(const LabeledTensor &a, const LabeledTensor &b) {
    const LabeledTensor pb = permute(b, a.names());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a.data()[i] - pb.data()[i]);
    return std::sqrt(acc);
}

}  // namespace mprho
