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
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mprho/channels.hpp"
#include "mprho/checkpoint.hpp"
#include "mprho/dense.hpp"
#include "mprho/experiments/circuit.hpp"
#include "mprho/experiments/config.hpp"
#include "mprho/experiments/csv.hpp"
#include "mprho/metrics.hpp"
#include "mprho/mprho.hpp"
#include "mprho/parallel.hpp"
#include "mprho/random.hpp"

namespace mprho::experiments {

struct RunOptions {
    bool strict = false;
    unsigned threads = 1;
    /// Invoked after every channel application, erasure and transport step.
    /// Must be thread-safe when threads > 1.
    ApplyObserver observer;
    /// When set, final states are written as <prefix>_<name>.mprho.
    std::string checkpoint_prefix;
};

/// Collects --strict post-condition failures and reports them together.
class StrictLog {
   public:
    StrictLog(std::string experiment, bool enabled) : experiment_(std::move(experiment)), enabled_(enabled) {
    }
    bool enabled() const {
        return enabled_;
    }
    void require(bool ok, const std::string &what) {
        if (enabled_ && !ok) failures_.push_back(what);
    }
    void finish() const {
        if (failures_.empty()) return;
        std::string msg = experiment_ + ": " + std::to_string(failures_.size()) + " strict check(s) failed";
        for (std::size_t k = 0; k < std::min<std::size_t>(failures_.size(), 10); ++k) msg += "\n  " + failures_[k];
        throw StrictCheckError(msg);
    }

   private:
    std::string experiment_;
    bool enabled_;
    std::vector<std::string> failures_;
};

namespace detail {

inline void notify(const RunOptions &o, const MPrho &rho, const std::string &what) {
    if (o.observer) o.observer(rho, what);
}

inline void checkpoint(const RunOptions &o, const std::string &name, const MPrho &rho) {
    if (!o.checkpoint_prefix.empty()) save_checkpoint(o.checkpoint_prefix + "_" + name + ".mprho", rho);
}

inline std::string describe(const std::string &what, double got, double want) {
    return what + ": got " + format_double(got) + ", want " + format_double(want);
}

}  // namespace detail

// --------------------------------------------------------------------------
// random-flow

struct RandomFlowResult {
    std::size_t n = 0;
    std::vector<std::size_t> chis;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::vector<double>> fidelity;  // [step][pair]
    std::vector<std::vector<double>> purity;    // [step][state]
    std::vector<MPrho> final_states;
};

/// One random MPS per chi value, each turned into an MPrho; time step t
/// (1-based) applies dephasing then bit flip to site (t-1) mod N, for n_c
/// cycles of N steps. Pairwise F_P and purities are recorded every step.
inline RandomFlowResult run_random_flow(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    validate(cfg);
    const std::uint64_t seed = cfg.require_seed();
    const TruncationPolicy policy = cfg.policy();
    RandomFlowResult res;
    res.n = cfg.N;
    res.chis = cfg.chi_list;
    const std::size_t m = res.chis.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) res.pairs.emplace_back(i, j);
    }
    std::vector<MPrho> states(m);
    parallel_for(m, opts.threads, [&](std::size_t k) {
        states[k] = from_mps(random_mps(cfg.N, res.chis[k], derive_seed(seed, k)));
    });
    const KrausChannel deph = dephasing(cfg.alpha), flip = bitflip(cfg.beta);

    // Each step touches one site, so the overlaps are tracked incrementally.
    std::vector<HsipTracker> self(m), cross(res.pairs.size());
    auto record = [&] {
        std::vector<double> pur(m), fid(res.pairs.size());
        parallel_for(m, opts.threads, [&](std::size_t k) { pur[k] = self[k](states[k], states[k]); });
        parallel_for(res.pairs.size(), opts.threads, [&](std::size_t p) {
            const auto [i, j] = res.pairs[p];
            fid[p] = cross[p](states[i], states[j]) / std::max(pur[i], pur[j]);
        });
        res.purity.push_back(std::move(pur));
        res.fidelity.push_back(std::move(fid));
    };
    record();
    const std::size_t total = cfg.n_c * cfg.N;
    for (std::size_t t = 1; t <= total; ++t) {
        const std::size_t site = (t - 1) % cfg.N;
        parallel_for(m, opts.threads, [&](std::size_t k) {
            states[k] = apply_one_body(states[k], deph, site, policy);
            detail::notify(opts, states[k], "dephasing");
            states[k] = apply_one_body(states[k], flip, site, policy);
            detail::notify(opts, states[k], "bitflip");
        });
        record();
    }

    StrictLog log("random-flow", opts.strict);
    for (std::size_t p = 0; p < res.pairs.size(); ++p) {
        const double f0 = res.fidelity.front()[p], f1 = res.fidelity.back()[p];
        log.require(f0 <= 1e-13, detail::describe("initial F_P of pair " + std::to_string(p), f0, 0.0));
        if (cfg.alpha == 1.0 && cfg.beta == 1.0) {
            for (const auto &row : res.fidelity) log.require(row[p] <= 1e-13, "noiseless F_P of pair " + std::to_string(p) + " exceeded 1e-13");
        } else {
            log.require(f1 >= 0.1 && f1 <= 1.0 + 1e-10, detail::describe("final F_P of pair " + std::to_string(p), f1, 1.0));
        }
    }
    log.finish();
    for (std::size_t k = 0; k < m; ++k) detail::checkpoint(opts, "state" + std::to_string(k), states[k]);
    res.final_states = std::move(states);
    return res;
}

inline std::string to_csv(const RandomFlowResult &r) {
    CsvWriter w({"step", "i", "j", "chi_i", "chi_j", "fidelity", "purity_i", "purity_j"});
    for (std::size_t t = 0; t < r.fidelity.size(); ++t) {
        for (std::size_t p = 0; p < r.pairs.size(); ++p) {
            const auto [i, j] = r.pairs[p];
            w.row(t, i, j, r.chis[i], r.chis[j], r.fidelity[t][p], r.purity[t][i], r.purity[t][j]);
        }
    }
    return w.str();
}

// --------------------------------------------------------------------------
// ghz-channels

struct GhzChannelsRow {
    double phi = 0.0;
    double purity_zz = 0.0, fidelity_zz = 0.0;
    double purity_z = 0.0, fidelity_z = 0.0;
    double purity_cz = 0.0, fidelity_cz = 0.0;
    double fidelity_z_cz = 0.0;
    double purity_analytic = 0.0, fidelity_analytic = 0.0;
};

struct GhzChannelsResult {
    std::size_t n = 0;
    std::string mode;
    std::size_t damped = 0;  // applications of the one-site / controlled damping
    std::vector<GhzChannelsRow> rows;
};

/// Closed forms for m damping applications on GHZ: the coherence
/// |0..0><1..1| is multiplied by cos(phi/2) per application.
inline std::pair<double, double> ghz_damping_closed_form(double phi, std::size_t m) {
    const double cm = std::pow(std::cos(phi / 2.0), static_cast<double>(m));
    return {(1.0 + cm * cm) / 2.0, (1.0 + cm) / 2.0};
}

/// Parity damping on every bond of ghz(N); one-site damping and controlled
/// damping either once in the middle of the chain ("single") or on sites
/// 1..N-1 and their left bonds ("sweep").
inline GhzChannelsResult run_ghz_channels(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    validate(cfg);
    cfg.require_seed();
    const TruncationPolicy policy = cfg.policy();
    const std::size_t n = cfg.N;
    GhzChannelsResult res;
    res.n = n;
    res.mode = cfg.mode;
    std::vector<std::size_t> z_sites;
    if (cfg.mode == "single") {
        z_sites = {n / 2};
    } else {
        for (std::size_t i = 1; i < n; ++i) z_sites.push_back(i);
    }
    res.damped = z_sites.size();
    res.rows.resize(cfg.phi_grid.size());
    const MPrho ideal = ghz(n);
    parallel_for(cfg.phi_grid.size(), opts.threads, [&](std::size_t k) {
        const double phi = cfg.phi_grid[k];
        MPrho zz = ideal, z = ideal, cz = ideal;
        const KrausChannel zzc = zz_phi(phi), zc = z_phi(phi), czc = cz_phi(phi);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            zz = apply_two_body(zz, zzc, i, policy);
            detail::notify(opts, zz, "zz_phi");
        }
        for (auto i : z_sites) {
            z = apply_one_body(z, zc, i, policy);
            detail::notify(opts, z, "z_phi");
            cz = apply_two_body(cz, czc, i - 1, policy);
            detail::notify(opts, cz, "cz_phi");
        }
        GhzChannelsRow &row = res.rows[k];
        row.phi = phi;
        row.purity_zz = purity(zz);
        row.fidelity_zz = fidelity_p(zz, ideal);
        row.purity_z = purity(z);
        row.fidelity_z = fidelity_p(z, ideal);
        row.purity_cz = purity(cz);
        row.fidelity_cz = fidelity_p(cz, ideal);
        row.fidelity_z_cz = fidelity_p(z, cz);
        std::tie(row.purity_analytic, row.fidelity_analytic) = ghz_damping_closed_form(phi, z_sites.size());
        detail::checkpoint(opts, "phi" + std::to_string(k) + "_zz", zz);
        detail::checkpoint(opts, "phi" + std::to_string(k) + "_z", z);
        detail::checkpoint(opts, "phi" + std::to_string(k) + "_cz", cz);
    });

    StrictLog log("ghz-channels", opts.strict);
    for (const auto &r : res.rows) {
        const std::string at = " at phi=" + format_double(r.phi);
        log.require(std::abs(r.purity_zz - 1.0) <= 1e-8, detail::describe("ZZ purity" + at, r.purity_zz, 1.0));
        log.require(std::abs(r.fidelity_zz - 1.0) <= 1e-8, detail::describe("ZZ fidelity" + at, r.fidelity_zz, 1.0));
        log.require(std::abs(r.purity_z - r.purity_analytic) <= 1e-8, detail::describe("Z purity" + at, r.purity_z, r.purity_analytic));
        log.require(std::abs(r.purity_cz - r.purity_analytic) <= 1e-8, detail::describe("CZ purity" + at, r.purity_cz, r.purity_analytic));
        log.require(std::abs(r.fidelity_z - r.fidelity_analytic) <= 1e-8,
                    detail::describe("Z fidelity" + at, r.fidelity_z, r.fidelity_analytic));
        log.require(std::abs(r.fidelity_cz - r.fidelity_analytic) <= 1e-8,
                    detail::describe("CZ fidelity" + at, r.fidelity_cz, r.fidelity_analytic));
        log.require(std::abs(r.fidelity_z_cz - 1.0) <= 1e-8, detail::describe("Z vs CZ fidelity" + at, r.fidelity_z_cz, 1.0));
    }
    log.finish();
    return res;
}

inline std::string to_csv(const GhzChannelsResult &r) {
    CsvWriter w({"phi", "purity_zz", "fidelity_zz", "purity_z", "fidelity_z", "purity_cz", "fidelity_cz", "fidelity_z_cz",
                 "purity_analytic", "fidelity_analytic"});
    for (const auto &x : r.rows) {
        w.row(x.phi, x.purity_zz, x.fidelity_zz, x.purity_z, x.fidelity_z, x.purity_cz, x.fidelity_cz, x.fidelity_z_cz,
              x.purity_analytic, x.fidelity_analytic);
    }
    return w.str();
}

// --------------------------------------------------------------------------
// erasure-growth

struct ErasureStep {
    std::size_t step = 0;
    long long erased = -1;  // position traced out at this step, -1 initially
    double trace = 1.0;
    std::vector<std::size_t> chi;    // bond to the right of each site
    std::vector<std::size_t> kappa;  // mixture dimension of each site
};

struct ErasureResult {
    std::vector<ErasureStep> steps;
    MPrho final_state;
};

/// Repeated erasure of a uniformly chosen site of a random state; the chain
/// is relabelled to stay contiguous. The site receiving the erased mixture
/// is compressed (without truncation) whenever its kappa exceeds kappa_max,
/// or after every step when compress_kappa is set.
inline ErasureResult run_erasure_growth(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    validate(cfg);
    const std::uint64_t seed = cfg.require_seed();
    TruncationPolicy policy = cfg.policy();
    policy.max_kappa = kUnlimitedRank;
    Rng rng(derive_seed(seed, 1));
    MPrho rho = from_mps(random_mps(cfg.N, cfg.chi_list.front(), derive_seed(seed, 0)));
    const bool use_dense = opts.strict && cfg.N <= dense::kDefaultCap;
    dense::DenseDensityMatrix shadow;
    if (use_dense) shadow = dense::from_mprho(rho);

    ErasureResult res;
    auto snapshot = [&](std::size_t step, long long erased) {
        ErasureStep s;
        s.step = step;
        s.erased = erased;
        s.trace = trace(rho);
        for (std::size_t i = 0; i < rho.size(); ++i) {
            s.chi.push_back(rho.bond_dim(i + 1));
            s.kappa.push_back(rho.kappa_dim(i));
        }
        res.steps.push_back(std::move(s));
    };
    snapshot(0, -1);

    StrictLog log("erasure-growth", opts.strict);
    bool saturated = false;
    std::size_t prev_max = rho.max_kappa_dim();
    for (std::size_t t = 1; t <= cfg.steps; ++t) {
        const std::size_t i = static_cast<std::size_t>(rng.below(rho.size()));
        rho = partial_trace_site(rho, i, policy);
        if (rho.kappa_dim(rho.oc()) > cfg.kappa_max) {
            rho = compress_kappa(rho, rho.oc(), policy);
            saturated = true;
        }
        detail::notify(opts, rho, "partial_trace");
        snapshot(t, static_cast<long long>(i));
        const std::size_t cur_max = rho.max_kappa_dim();
        log.require(std::abs(res.steps.back().trace - 1.0) <= 1e-8,
                    detail::describe("trace after step " + std::to_string(t), res.steps.back().trace, 1.0));
        if (!saturated && !cfg.compress_kappa) {
            log.require(cur_max >= prev_max, "largest kappa shrank at step " + std::to_string(t));
        }
        prev_max = cur_max;
        if (use_dense) {
            shadow = dense::partial_trace_dense(shadow, i);
            const double diff = dense::max_abs_diff(shadow, dense::from_mprho(rho));
            log.require(diff <= 1e-10, detail::describe("dense mismatch after step " + std::to_string(t), diff, 0.0));
        }
    }
    log.finish();
    detail::checkpoint(opts, "final", rho);
    res.final_state = std::move(rho);
    return res;
}

inline std::string to_csv(const ErasureResult &r) {
    CsvWriter w({"step", "erased", "site", "chi", "kappa", "trace"});
    for (const auto &s : r.steps) {
        for (std::size_t i = 0; i < s.chi.size(); ++i) w.row(s.step, s.erased, i, s.chi[i], s.kappa[i], s.trace);
    }
    return w.str();
}

// --------------------------------------------------------------------------
// kappa-transport

struct KappaTransportRow {
    std::size_t hop = 0;
    std::size_t kappa_site = 0;      // where the mixture index sits after the hop
    std::size_t sites_with_kappa = 0;  // number of sites with kappa > 1
    std::size_t kappa_dim = 0;
    double fidelity = 0.0;  // F_P against the state before any hop
    double trace = 0.0;
};

struct KappaTransportResult {
    std::size_t n = 0;
    std::vector<KappaTransportRow> rows;
    MPrho final_state;
};

/// ghz(N) with its last qubit erased; the resulting kappa (on site N-2) is
/// moved one site to the left per hop until it reaches site 0. Row 0 is the
/// state before the first hop.
inline KappaTransportResult run_kappa_transport(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    validate(cfg);
    cfg.require_seed();
    const TruncationPolicy policy = cfg.policy();
    const MPrho lambda = partial_trace_site(ghz(cfg.N), cfg.N - 1, policy);
    const double p_lambda = purity(lambda);
    const bool use_dense = opts.strict && lambda.size() <= dense::kDefaultCap;
    const dense::DenseDensityMatrix ref = use_dense ? dense::from_mprho(lambda) : dense::DenseDensityMatrix{};
    KappaTransportResult res;
    res.n = cfg.N;
    StrictLog log("kappa-transport", opts.strict);

    MPrho rho = lambda;
    std::size_t at = lambda.size() - 1;
    auto record = [&](std::size_t hop) {
        KappaTransportRow row;
        row.hop = hop;
        row.kappa_site = at;
        row.kappa_dim = rho.kappa_dim(at);
        for (std::size_t i = 0; i < rho.size(); ++i) row.sites_with_kappa += rho.kappa_dim(i) > 1 ? 1 : 0;
        row.fidelity = hsip(rho, lambda) / std::max(purity(rho), p_lambda);
        row.trace = trace(rho);
        log.require(std::abs(row.fidelity - 1.0) <= 1e-8, detail::describe("F_P at hop " + std::to_string(hop), row.fidelity, 1.0));
        log.require(row.sites_with_kappa == 1 && row.kappa_dim == 2,
                    "hop " + std::to_string(hop) + ": expected kappa = 2 on site " + std::to_string(at) + " only");
        if (use_dense) {
            const double diff = dense::max_abs_diff(ref, dense::from_mprho(rho));
            log.require(diff <= 1e-10, detail::describe("dense mismatch at hop " + std::to_string(hop), diff, 0.0));
        }
        res.rows.push_back(row);
    };
    record(0);
    for (std::size_t hop = 1; at > 0; ++hop) {
        rho = transport_kappa(rho, at, at - 1, policy);
        --at;
        detail::notify(opts, rho, "transport");
        record(hop);
    }
    log.finish();
    detail::checkpoint(opts, "final", rho);
    res.final_state = std::move(rho);
    return res;
}

inline std::string to_csv(const KappaTransportResult &r) {
    CsvWriter w({"hop", "kappa_site", "kappa_dim", "sites_with_kappa", "fidelity", "trace"});
    for (const auto &x : r.rows) w.row(x.hop, x.kappa_site, x.kappa_dim, x.sites_with_kappa, x.fidelity, x.trace);
    return w.str();
}

// --------------------------------------------------------------------------
// random-circuit

struct RandomCircuitResult {
    CircuitDescription circuit;
    std::vector<std::string> pauli_strings;
    std::vector<double> expectations;
    std::vector<std::string> bitstrings;
    std::vector<double> probabilities;
    bool all_bitstrings = false;
    MPrho final_state;
};

inline CircuitDescription circuit_for(const ExperimentConfig &cfg) {
    if (!cfg.circuit.empty()) {
        std::ifstream is(cfg.circuit);
        if (!is) throw ConfigError("cannot open circuit file '" + cfg.circuit + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        return parse_circuit(ss.str());
    }
    CircuitGenerator g;
    g.n = cfg.N;
    g.depth = cfg.d;
    g.seed = derive_seed(cfg.require_seed(), 0);
    g.noise_phi_max = cfg.noise_phi_max;
    g.fsim_theta_max = cfg.fsim_theta_max;
    g.fsim_phi_max = cfg.fsim_phi_max;
    return generate_circuit(g);
}

/// Evolves |0...0> through the circuit; full tomography for N <= 6
/// (sampled strings otherwise) and all bitstring probabilities for
/// N <= 16 (sampled otherwise).
inline RandomCircuitResult run_random_circuit(const ExperimentConfig &cfg, const RunOptions &opts = {},
                                              const CircuitDescription *given = nullptr) {
    validate(cfg);
    const std::uint64_t seed = cfg.require_seed();
    RandomCircuitResult res;
    res.circuit = given != nullptr ? *given : circuit_for(cfg);
    validate(res.circuit);
    const std::size_t n = res.circuit.n;
    res.final_state = evolve_circuit(res.circuit, cfg.policy(), opts.observer);

    if (n <= 6) {
        res.pauli_strings = all_pauli_strings(n);
    } else {
        Rng rng(derive_seed(seed, 2));
        static const char kLetters[] = "IXYZ";
        for (std::size_t k = 0; k < cfg.tomography_samples; ++k) {
            std::string s(n, 'I');
            for (auto &c : s) c = kLetters[rng.below(4)];
            res.pauli_strings.push_back(std::move(s));
        }
    }
    res.expectations.resize(res.pauli_strings.size());
    const std::size_t chunk = 64;
    const std::size_t chunks = (res.pauli_strings.size() + chunk - 1) / chunk;
    parallel_for(chunks, opts.threads, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(lo + chunk, res.pauli_strings.size());
        const std::vector<std::string> part(res.pauli_strings.begin() + static_cast<std::ptrdiff_t>(lo),
                                            res.pauli_strings.begin() + static_cast<std::ptrdiff_t>(hi));
        const auto vals = pauli_tomography(res.final_state, part);
        std::copy(vals.begin(), vals.end(), res.expectations.begin() + static_cast<std::ptrdiff_t>(lo));
    });

    res.all_bitstrings = n <= 16;
    if (res.all_bitstrings) {
        res.probabilities = all_bitstring_probabilities(res.final_state);
        for (std::size_t x = 0; x < res.probabilities.size(); ++x) {
            std::string s(n, '0');
            for (std::size_t q = 0; q < n; ++q) s[q] = ((x >> (n - 1 - q)) & 1U) != 0 ? '1' : '0';
            res.bitstrings.push_back(std::move(s));
        }
    } else {
        Rng rng(derive_seed(seed, 3));
        for (std::size_t k = 0; k < cfg.bitstring_samples; ++k) {
            std::string s(n, '0');
            for (auto &c : s) c = rng.below(2) != 0 ? '1' : '0';
            res.probabilities.push_back(bitstring_probability(res.final_state, s));
            res.bitstrings.push_back(std::move(s));
        }
    }

    StrictLog log("random-circuit", opts.strict);
    if (log.enabled() && n <= 6) {
        const auto d = evolve_circuit_dense(res.circuit);
        const auto ref = dense::pauli_tomography_dense(d, res.pauli_strings);
        double worst = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(ref[k] - res.expectations[k]));
        log.require(worst <= 1e-10, detail::describe("tomography deviation from the dense oracle", worst, 0.0));
    }
    if (res.all_bitstrings) {
        const double total = std::accumulate(res.probabilities.begin(), res.probabilities.end(), 0.0);
        log.require(std::abs(total - 1.0) <= 1e-8, detail::describe("bitstring probability sum", total, 1.0));
    }
    log.finish();
    detail::checkpoint(opts, "final", res.final_state);
    return res;
}

namespace detail {

// Raw order plus an ascending-by-value order (ties keep the raw order).
inline nlohmann::json sorted_series(const std::vector<std::string> &keys, const std::vector<double> &vals,
                                    const char *key_name, const char *val_name) {
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    nlohmann::json sk = nlohmann::json::array(), sv = nlohmann::json::array();
    for (auto i : idx) {
        sk.push_back(keys[i]);
        sv.push_back(vals[i]);
    }
    return {{key_name, keys}, {val_name, vals}, {"sorted", {{key_name, sk}, {val_name, sv}}}};
}

}  // namespace detail

inline std::string to_json(const RandomCircuitResult &r) {
    nlohmann::json j;
    j["experiment"] = "random-circuit";
    j["n"] = r.circuit.n;
    j["depth"] = r.circuit.layers.size();
    j["tomography"] = detail::sorted_series(r.pauli_strings, r.expectations, "strings", "values");
    j["bitstrings"] = detail::sorted_series(r.bitstrings, r.probabilities, "strings", "probabilities");
    j["bitstrings"]["complete"] = r.all_bitstrings;
    return j.dump(2) + "\n";
}

// --------------------------------------------------------------------------
// gate-timing

struct TimingEntry {
    std::string state;
    std::size_t n = 0;
    std::string channel;
    std::string mode;  // "cold": first application; "warm": median of repeats
    double seconds = 0.0;
};

struct GateTimingResult {
    std::size_t repeats = 0;
    std::vector<TimingEntry> entries;
};

namespace detail {

// Streams through a buffer larger than the last-level cache so that the
// next measurement starts cold.
inline void evict_caches() {
    static std::vector<unsigned char> buffer(std::size_t{64} << 20);
    volatile unsigned char sink = 0;
    for (std::size_t k = 0; k < buffer.size(); k += 64) {
        buffer[k] = static_cast<unsigned char>(buffer[k] + 1);
        sink = sink + buffer[k];
    }
    (void)sink;
}

}  // namespace detail

/// Wall-clock time of a single channel application at the middle of a
/// random MPS (N sites, chi_list[0]) and of ghz(ghz_n). The state is
/// centered on the target site beforehand, so only the application itself
/// is timed. "cold" is one application right after the caches have been
/// flushed; "warm" is the median of `repeats` back-to-back applications.
/// Runs serially.
inline GateTimingResult run_gate_timing(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    validate(cfg);
    const std::uint64_t seed = cfg.require_seed();
    const TruncationPolicy policy = cfg.policy();
    const std::vector<std::pair<std::string, MPrho>> states{
        {"random_mps", from_mps(random_mps(cfg.N, cfg.chi_list.front(), derive_seed(seed, 0)))}, {"ghz", ghz(cfg.ghz_n)}};
    const std::vector<KrausChannel> channels{dephasing(cfg.alpha), bitflip(cfg.beta), zz_phi(cfg.phi), cz_phi(cfg.phi)};
    GateTimingResult res;
    res.repeats = cfg.repeats;
    using clock = std::chrono::steady_clock;
    for (const auto &[name, rho] : states) {
        const std::size_t mid = rho.size() / 2;
        for (const auto &ch : channels) {
            const std::size_t site = ch.arity() == 1 ? mid : mid - 1;
            const MPrho centered = orthogonalize(rho, site, policy);
            auto once = [&] {
                const auto t0 = clock::now();
                const MPrho out = apply_channel(centered, ch, site, policy);
                const auto t1 = clock::now();
                detail::notify(opts, out, ch.name());
                return std::chrono::duration<double>(t1 - t0).count();
            };
            detail::evict_caches();
            const double cold = once();
            std::vector<double> warm(cfg.repeats);
            for (auto &w : warm) w = once();
            std::nth_element(warm.begin(), warm.begin() + static_cast<std::ptrdiff_t>(warm.size() / 2), warm.end());
            res.entries.push_back({name, rho.size(), ch.name(), "cold", cold});
            res.entries.push_back({name, rho.size(), ch.name(), "warm", warm[warm.size() / 2]});
        }
    }

    StrictLog log("gate-timing", opts.strict);
    log.require(res.entries.size() == 16, "expected 4 channels x 2 states x {cold, warm} entries");
    for (std::size_t k = 0; k + 1 < res.entries.size(); k += 2) {
        const auto &c = res.entries[k], &w = res.entries[k + 1];
        log.require(w.seconds <= c.seconds, "warm slower than cold for " + c.channel + " on " + c.state);
    }
    for (const auto &[name, rho] : states) {
        double one = 0.0, two = 1e300;
        for (const auto &e : res.entries) {
            if (e.state != name || e.mode != "warm") continue;
            if (e.channel == "dephasing" || e.channel == "bitflip") one = std::max(one, e.seconds);
            else two = std::min(two, e.seconds);
        }
        log.require(two > one, "two-body channels not slower than one-body channels on " + name);
    }
    log.finish();
    return res;
}

inline std::string to_json(const GateTimingResult &r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &e : r.entries) {
        entries.push_back({{"state", e.state}, {"n", e.n}, {"channel", e.channel}, {"mode", e.mode}, {"seconds", e.seconds}});
    }
    return nlohmann::json{{"experiment", "gate-timing"}, {"repeats", r.repeats}, {"entries", entries}}.dump(2) + "\n";
}

/// Timing report with the wall-clock fields removed; everything left is
/// deterministic.
inline std::string strip_timings(const std::string &report) {
    nlohmann::json j = nlohmann::json::parse(report);
    for (auto &e : j["entries"]) e.erase("seconds");
    return j.dump(2) + "\n";
}

// --------------------------------------------------------------------------

struct RunOutput {
    std::string text;
    std::string format;  // "csv" or "json"
};

/// Runs the configured experiment and renders its output.
inline RunOutput run_experiment(const ExperimentConfig &cfg, const RunOptions &opts = {}) {
    const std::string &e = cfg.experiment;
    if (e == "random-flow") return {to_csv(run_random_flow(cfg, opts)), "csv"};
    if (e == "ghz-channels") return {to_csv(run_ghz_channels(cfg, opts)), "csv"};
    if (e == "erasure-growth") return {to_csv(run_erasure_growth(cfg, opts)), "csv"};
    if (e == "kappa-transport") return {to_csv(run_kappa_transport(cfg, opts)), "csv"};
    if (e == "random-circuit") return {to_json(run_random_circuit(cfg, opts)), "json"};
    if (e == "gate-timing") return {to_json(run_gate_timing(cfg, opts)), "json"};
    throw ConfigError("unknown experiment '" + e + "'");
}

}  // namespace mprho::experiments
