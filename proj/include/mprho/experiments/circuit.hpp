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

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mprho/channels.hpp"
#include "mprho/dense.hpp"
#include "mprho/gates.hpp"
#include "mprho/random.hpp"

namespace mprho::experiments {

/// One gate or channel: a registry/gate kind, its sites and parameters.
struct CircuitRecord {
    std::string kind;
    std::vector<std::size_t> sites;
    std::map<std::string, double> params;

    bool operator==(const CircuitRecord &) const = default;
};

struct CircuitDescription {
    std::size_t n = 0;
    std::vector<std::vector<CircuitRecord>> layers;

    bool operator==(const CircuitDescription &) const = default;
};

/// The channel a record denotes, with the operator reordered when a
/// two-site record lists its sites right to left.
inline KrausChannel record_channel(const CircuitRecord &r) {
    KrausChannel ch = gates::is_gate(r.kind) ? gates::make_gate(r.kind, r.params) : make_channel(r.kind, r.params);
    if (ch.arity() == 2 && r.sites.size() == 2 && r.sites[0] > r.sites[1]) {
        Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
        swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
        std::vector<Eigen::MatrixXcd> ops;
        for (const auto &k : ch.operators()) ops.push_back(swap * k * swap);
        ch = KrausChannel(ch.name(), 2, std::move(ops), ch.params());
    }
    return ch;
}

namespace detail {

inline std::size_t line_of(const std::string &text, std::size_t byte) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
    return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

inline void check_record(const CircuitRecord &r, std::size_t n) {
    const KrausChannel ch = record_channel(r);
    if (r.sites.size() != static_cast<std::size_t>(ch.arity())) {
        throw ParseError("'" + r.kind + "' acts on " + std::to_string(ch.arity()) + " site(s), got " +
                         std::to_string(r.sites.size()));
    }
    for (auto s : r.sites) {
        if (s >= n) throw ParseError("site " + std::to_string(s) + " out of range for n = " + std::to_string(n));
    }
    if (r.sites.size() == 2) {
        const auto lo = std::min(r.sites[0], r.sites[1]), hi = std::max(r.sites[0], r.sites[1]);
        if (hi != lo + 1) throw ParseError("two-site '" + r.kind + "' needs adjacent sites");
    }
}

}  // namespace detail

/// Validates a description; errors name the offending layer and record.
inline void validate(const CircuitDescription &c) {
    if (c.n == 0) throw ParseError("circuit needs n >= 1");
    for (std::size_t l = 0; l < c.layers.size(); ++l) {
        for (std::size_t k = 0; k < c.layers[l].size(); ++k) {
            try {
                detail::check_record(c.layers[l][k], c.n);
            } catch (const Error &e) {
                throw ParseError("layer " + std::to_string(l) + ", record " + std::to_string(k) + ": " + e.what());
            }
        }
    }
}

inline nlohmann::json circuit_to_json(const CircuitDescription &c) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &layer : c.layers) {
        nlohmann::json recs = nlohmann::json::array();
        for (const auto &r : layer) {
            nlohmann::json params = nlohmann::json::object();
            for (const auto &[k, v] : r.params) params[k] = v;
            recs.push_back({{"kind", r.kind}, {"sites", r.sites}, {"params", params}});
        }
        layers.push_back(recs);
    }
    return {{"n", c.n}, {"layers", layers}};
}

/// JSON text; doubles are written in shortest round-trip form, so
/// parse_circuit(emit_circuit(c)) == c.
inline std::string emit_circuit(const CircuitDescription &c) {
    return circuit_to_json(c).dump(2) + "\n";
}

inline CircuitDescription parse_circuit(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError("circuit JSON, line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
    }
    CircuitDescription c;
    if (!j.is_object() || !j.contains("n") || !j.contains("layers")) {
        throw ParseError("circuit must be an object with 'n' and 'layers'");
    }
    for (const auto &[key, v] : j.items()) {
        if (key != "n" && key != "layers") throw ParseError("circuit: unknown key '" + key + "'");
    }
    if (!j["n"].is_number_unsigned()) throw ParseError("circuit: 'n' must be a positive integer");
    c.n = j["n"].get<std::size_t>();
    if (!j["layers"].is_array()) throw ParseError("circuit: 'layers' must be an array");
    for (std::size_t l = 0; l < j["layers"].size(); ++l) {
        const auto &layer = j["layers"][l];
        if (!layer.is_array()) throw ParseError("layer " + std::to_string(l) + ": must be an array of records");
        std::vector<CircuitRecord> recs;
        for (std::size_t k = 0; k < layer.size(); ++k) {
            const auto where = "layer " + std::to_string(l) + ", record " + std::to_string(k) + ": ";
            const auto &rj = layer[k];
            if (!rj.is_object()) throw ParseError(where + "must be an object");
            CircuitRecord r;
            for (const auto &[key, v] : rj.items()) {
                if (key == "kind") {
                    if (!v.is_string()) throw ParseError(where + "'kind' must be a string");
                    r.kind = v.get<std::string>();
                } else if (key == "sites") {
                    if (!v.is_array()) throw ParseError(where + "'sites' must be an array");
                    for (const auto &s : v) {
                        if (!s.is_number_unsigned()) throw ParseError(where + "sites must be non-negative integers");
                        r.sites.push_back(s.get<std::size_t>());
                    }
                } else if (key == "params") {
                    if (!v.is_object()) throw ParseError(where + "'params' must be an object");
                    for (const auto &[pk, pv] : v.items()) {
                        if (!pv.is_number()) throw ParseError(where + "parameter '" + pk + "' must be a number");
                        r.params[pk] = pv.get<double>();
                    }
                } else {
                    throw ParseError(where + "unknown key '" + key + "'");
                }
            }
            if (r.kind.empty()) throw ParseError(where + "missing 'kind'");
            recs.push_back(std::move(r));
        }
        c.layers.push_back(std::move(recs));
    }
    validate(c);
    return c;
}

struct CircuitGenerator {
    std::size_t n = 6;
    std::size_t depth = 6;
    std::uint64_t seed = 0;
    double noise_phi_max = std::numbers::pi / 4;
    double fsim_theta_max = 2 * std::numbers::pi;
    double fsim_phi_max = 2 * std::numbers::pi;
};

/// Noisy random circuit. Each layer: a random gate from {sqrtX, sqrtY,
/// sqrtW} on every qubit; one-qubit noise on every qubit (dephasing after
/// the 1st, 3rd, ... layer, bit flip after the 2nd, 4th, ...); fSim on a
/// brick pattern of adjacent pairs; then two-qubit noise on the same pairs,
/// controlled damping for two layers and parity damping for the next two.
/// Noise angles are uniform on [0, noise_phi_max]; the one-qubit rates are
/// damping_weight(angle).
inline CircuitDescription generate_circuit(const CircuitGenerator &g) {
    if (g.n == 0) throw ParseError("circuit needs n >= 1");
    static const char *kOneQubit[] = {"sqrtX", "sqrtY", "sqrtW"};
    Rng rng(g.seed);
    CircuitDescription c;
    c.n = g.n;
    for (std::size_t l = 0; l < g.depth; ++l) {
        std::vector<CircuitRecord> layer;
        for (std::size_t q = 0; q < g.n; ++q) layer.push_back({kOneQubit[rng.below(3)], {q}, {}});
        for (std::size_t q = 0; q < g.n; ++q) {
            const double rate = damping_weight(rng.uniform(0.0, g.noise_phi_max));
            if (l % 2 == 0) {
                layer.push_back({"dephasing", {q}, {{"alpha", rate}}});
            } else {
                layer.push_back({"bitflip", {q}, {{"beta", rate}}});
            }
        }
        std::vector<std::size_t> lefts;
        for (std::size_t q = l % 2; q + 1 < g.n; q += 2) lefts.push_back(q);
        for (auto q : lefts) {
            const double theta = rng.uniform(0.0, g.fsim_theta_max);
            const double phi = rng.uniform(0.0, g.fsim_phi_max);
            layer.push_back({"fsim", {q, q + 1}, {{"theta", theta}, {"phi", phi}}});
        }
        const char *pair_noise = (l / 2) % 2 == 0 ? "cz_phi" : "zz_phi";
        for (auto q : lefts) layer.push_back({pair_noise, {q, q + 1}, {{"phi", rng.uniform(0.0, g.noise_phi_max)}}});
        c.layers.push_back(std::move(layer));
    }
    return c;
}

/// Called after every gate or channel application with the updated state.
using ApplyObserver = std::function<void(const MPrho &, const std::string &kind)>;

/// Evolves |0...0> through the circuit.
inline MPrho evolve_circuit(const CircuitDescription &c, const TruncationPolicy &policy = {},
                            const ApplyObserver &observer = {}) {
    validate(c);
    MPrho rho = product_rho(std::vector<int>(c.n, 0));
    for (const auto &layer : c.layers) {
        for (const auto &r : layer) {
            const KrausChannel ch = record_channel(r);
            rho = apply_channel(rho, ch, std::min(r.sites[0], r.sites.back()), policy);
            if (observer) observer(rho, r.kind);
        }
    }
    return rho;
}

/// The same evolution on the dense density matrix (independent oracle).
inline dense::DenseDensityMatrix evolve_circuit_dense(const CircuitDescription &c,
                                                      std::size_t cap = dense::kDefaultCap) {
    validate(c);
    dense::DenseDensityMatrix rho = dense::from_mprho(product_rho(std::vector<int>(c.n, 0)), cap);
    for (const auto &layer : c.layers) {
        for (const auto &r : layer) {
            const std::size_t lo = std::min(r.sites[0], r.sites.back());
            std::vector<std::size_t> sites{lo};
            if (r.sites.size() == 2) sites.push_back(lo + 1);
            rho = dense::apply_channel_dense(rho, record_channel(r), sites);
        }
    }
    return rho;
}

}  // namespace mprho::experiments
