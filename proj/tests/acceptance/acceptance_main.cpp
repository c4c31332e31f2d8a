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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--threads k]
//
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mprho/channels.hpp"
#include "mprho/dense.hpp"
#include "mprho/experiments/runners.hpp"
#include "mprho/metrics.hpp"
#include "mprho/mprho.hpp"
#include "mprho/mps.hpp"
#include "mprho/parallel.hpp"
#include "mprho/random.hpp"

namespace {

using namespace mprho;
namespace ex = mprho::experiments;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

class Stopwatch {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Worst canonical-form and trace deviations seen across observed states.
class CanonicalTracker {
   public:
    void observe(const MPrho &rho) {
        const double iso = check_isometry(rho);
        const double tr = std::abs(trace(rho) - 1.0);
        std::lock_guard<std::mutex> lock(mu_);
        iso_ = std::max(iso_, iso);
        trace_ = std::max(trace_, tr);
        ++count_;
    }
    double iso() const {
        return iso_;
    }
    double trace_dev() const {
        return trace_;
    }
    std::size_t count() const {
        return count_;
    }

   private:
    std::mutex mu_;
    double iso_ = 0.0;
    double trace_ = 0.0;
    std::size_t count_ = 0;
};

void observe(CanonicalTracker *t, const MPrho &rho) {
    if (t != nullptr) t->observe(rho);
}

std::vector<double> phi_sweep() {
    std::vector<double> g;
    for (int k = 0; k <= 10; ++k) g.push_back(0.1 * k * std::numbers::pi);
    return g;
}

TruncationPolicy ghz_policy() {
    return ex::defaults_for("ghz-channels").policy();
}

unsigned g_threads = 1;

// --------------------------------------------------------------------------

Outcome c1_zz_invariance(CanonicalTracker *t) {
    Stopwatch sw;
    const TruncationPolicy policy = ghz_policy();
    double worst_p = 0.0, worst_f = 0.0;
    for (std::size_t n : {8, 64, 500}) {
        const MPrho ideal = ghz(n);
        for (double phi : phi_sweep()) {
            const KrausChannel ch = zz_phi(phi);
            MPrho rho = ideal;
            for (std::size_t b = 0; b + 1 < n; ++b) {
                rho = apply_channel(rho, ch, b, policy);
                observe(t, rho);
            }
            worst_p = std::max(worst_p, std::abs(purity(rho) - 1.0));
            worst_f = std::max(worst_f, std::abs(fidelity_p(rho, ideal) - 1.0));
        }
    }
    const double secs = sw.seconds();
    const bool ok = worst_p <= 1e-8 && worst_f <= 1e-8 && secs < 30.0;
    return {ok, "max|P-1| = " + fmt(worst_p) + ", max|F_P-1| = " + fmt(worst_f) + " (tol 1e-8); " + fmt(secs) +
                    " s (limit 30 s)"};
}

Outcome c2_ghz_closed_forms(CanonicalTracker *t) {
    const std::size_t n = 500;
    const TruncationPolicy policy = ghz_policy();
    const MPrho ideal = ghz(n);
    double worst_p = 0.0, worst_f = 0.0, worst_zcz = 0.0;
    for (double phi : phi_sweep()) {
        const MPrho z = apply_channel(ideal, z_phi(phi), n / 2, policy);
        observe(t, z);
        const MPrho cz = apply_channel(ideal, cz_phi(phi), n / 2 - 1, policy);
        observe(t, cz);
        const double p_ref = (3.0 + std::cos(phi)) / 4.0;
        const double f_ref = std::pow(std::cos(phi / 4.0), 2);
        worst_p = std::max({worst_p, std::abs(purity(z) - p_ref), std::abs(purity(cz) - p_ref)});
        worst_f = std::max({worst_f, std::abs(fidelity_p(z, ideal) - f_ref), std::abs(fidelity_p(cz, ideal) - f_ref)});
        worst_zcz = std::max(worst_zcz, std::abs(fidelity_p(z, cz) - 1.0));
    }
    const bool ok = worst_p <= 1e-8 && worst_f <= 1e-8 && worst_zcz <= 1e-8;
    return {ok, "N = 500: max|P-(3+cos phi)/4| = " + fmt(worst_p) + ", max|F_P-cos^2(phi/4)| = " + fmt(worst_f) +
                    ", max|F_P(Z,CZ)-1| = " + fmt(worst_zcz) + " (tol 1e-8)"};
}

Outcome c3_ghz_erasure(CanonicalTracker *t) {
    double worst_spec = 0.0, worst_off = 0.0;
    bool shape_ok = true;
    for (std::size_t n : {4, 100}) {
        const MPrho g = ghz(n);
        for (std::size_t i = 0; i < n; ++i) {
            const MPrho r = partial_trace_site(g, i);
            observe(t, r);
            const std::size_t at = i > 0 ? i - 1 : 0;
            const MixtureSpectrum spec = mixture_spectrum(r, at);
            std::vector<double> nonzero;
            for (double p : spec.probabilities) {
                if (p > 1e-10) nonzero.push_back(p);
            }
            if (nonzero.size() != 2) shape_ok = false;
            for (double p : spec.probabilities) {
                const double want = p > 1e-10 ? 0.5 : 0.0;
                worst_spec = std::max(worst_spec, std::abs(p - want));
            }
            if (n == 4) {
                const auto d = dense::from_mprho(r);
                for (Eigen::Index a = 0; a < d.data.rows(); ++a) {
                    for (Eigen::Index b = 0; b < d.data.cols(); ++b) {
                        if (a != b) worst_off = std::max(worst_off, std::abs(d.data(a, b)));
                    }
                }
            }
        }
    }
    const bool ok = shape_ok && worst_spec <= 1e-10 && worst_off <= 1e-12;
    return {ok, std::string("spectrum {1/2, 1/2}") + (shape_ok ? "" : " NOT") + " found at every site; max dev " +
                    fmt(worst_spec) + " (tol 1e-10); N = 4 max off-diagonal " + fmt(worst_off) + " (tol 1e-12)"};
}

Outcome c4_kappa_transport(CanonicalTracker *t) {
    Stopwatch sw;
    const std::size_t n = 500;
    const TruncationPolicy policy = ghz_policy();
    const MPrho lambda = partial_trace_site(ghz(n), n - 1, policy);
    MPrho rho = lambda;
    double worst = std::abs(fidelity_p(rho, lambda) - 1.0);
    std::size_t evaluations = 1;
    bool single = true;
    for (std::size_t at = lambda.size() - 1; at > 0; --at) {
        rho = transport_kappa(rho, at, at - 1, policy);
        observe(t, rho);
        worst = std::max(worst, std::abs(fidelity_p(rho, lambda) - 1.0));
        ++evaluations;
        std::size_t mixed = 0;
        for (std::size_t i = 0; i < rho.size(); ++i) mixed += rho.kappa_dim(i) > 1 ? 1 : 0;
        single = single && mixed == 1 && rho.kappa_dim(at - 1) == 2;
    }
    const double secs = sw.seconds();
    const bool ok = worst <= 1e-8 && single && secs < 60.0;
    return {ok, std::to_string(evaluations) + " states: max|F_P-1| = " + fmt(worst) + " (tol 1e-8); kappa = 2 " +
                    (single ? "on exactly one site" : "NOT confined to one site") + "; " + fmt(secs) +
                    " s (limit 60 s)"};
}

Outcome c5_oracle_equivalence(CanonicalTracker *t) {
    const std::size_t circuits = 50;
    const TruncationPolicy policy = ex::defaults_for("random-circuit").policy();
    std::vector<double> dev(circuits, 0.0);
    parallel_for(circuits, g_threads, [&](std::size_t k) {
        ex::CircuitGenerator g;
        g.n = 2 + k % 5;
        g.depth = 1 + (k / 5) % 6;
        g.seed = derive_seed(0x5eed, k);
        const ex::CircuitDescription c = ex::generate_circuit(g);
        ex::ApplyObserver obs;
        if (t != nullptr) obs = [t](const MPrho &r, const std::string &) { t->observe(r); };
        const MPrho rho = ex::evolve_circuit(c, policy, obs);
        const auto ref = ex::evolve_circuit_dense(c);
        const auto strings = all_pauli_strings(c.n);
        const auto got = pauli_tomography(rho, strings);
        const auto want = dense::pauli_tomography_dense(ref, strings);
        for (std::size_t s = 0; s < strings.size(); ++s) dev[k] = std::max(dev[k], std::abs(got[s] - want[s]));
    });
    const double worst = *std::max_element(dev.begin(), dev.end());
    return {worst <= 1e-10,
            "50 circuits (N 2..6, d 1..6): max tomography deviation " + fmt(worst) + " (tol 1e-10)"};
}

Outcome c6_canonical_form() {
    CanonicalTracker t;
    c1_zz_invariance(&t);
    c2_ghz_closed_forms(&t);
    c3_ghz_erasure(&t);
    c4_kappa_transport(&t);
    c5_oracle_equivalence(&t);
    const bool ok = t.count() > 0 && t.iso() <= 1e-10 && t.trace_dev() <= 1e-10;
    return {ok, std::to_string(t.count()) + " states: max isometry residual " + fmt(t.iso()) + ", max|Tr-1| " +
                    fmt(t.trace_dev()) + " (tol 1e-10)"};
}

Outcome c7_random_flow() {
    Stopwatch sw;
    ex::ExperimentConfig cfg = ex::defaults_for("random-flow");
    cfg.N = 20;
    cfg.chi_list = {4, 8};
    cfg.n_c = 4;
    cfg.seed = 2026;
    ex::RunOptions opts;
    opts.threads = g_threads;
    const ex::RandomFlowResult r = ex::run_random_flow(cfg, opts);
    const double secs = sw.seconds();
    double init_max = 0.0, final_min = 1.0;
    for (double f : r.fidelity.front()) init_max = std::max(init_max, f);
    for (double f : r.fidelity.back()) final_min = std::min(final_min, f);
    const double target = std::ldexp(1.0, -20);
    double worst_ratio = 1.0;
    for (double p : r.purity.back()) worst_ratio = std::max({worst_ratio, p / target, target / p});
    const bool ok = init_max <= 1e-13 && final_min >= 0.9 && worst_ratio <= 10.0 && secs < 120.0;
    return {ok, "initial max F_P = " + fmt(init_max) + " (want <= 1e-13); final min F_P = " + fmt(final_min) +
                    " (want >= 0.9); worst purity / 2^-20 factor = " + fmt(worst_ratio) + " (want <= 10); " +
                    fmt(secs) + " s (limit 120 s)"};
}

Outcome c8_cptp() {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto &name : registry_names()) {
        for (int k = 0; k < 20; ++k) {
            std::map<std::string, double> params;
            if (name == "dephasing") {
                params["alpha"] = k / 19.0;
            } else if (name == "bitflip") {
                params["beta"] = k / 19.0;
            } else {
                params["phi"] = 2.0 * std::numbers::pi * k / 19.0;
            }
            worst = std::max(worst, completeness_residual(make_channel(name, params)));
            ++checked;
        }
    }
    return {worst <= 1e-12, std::to_string(checked) + " channels (" + std::to_string(registry_names().size()) +
                                " kinds x 20 points): max completeness residual " + fmt(worst) + " (tol 1e-12)"};
}

Eigen::MatrixXcd random_isometry(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd g(rows, cols);
    for (Eigen::Index a = 0; a < rows; ++a) {
        for (Eigen::Index b = 0; b < cols; ++b) g(a, b) = rng.complex_normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
}

// Metrics that must not see a gauge change: trace, purity, Pauli
// expectations, bitstring probabilities and the overlap with a reference.
struct MetricSnapshot {
    double tr, pur, overlap;
    std::vector<double> pauli, probs;
};

MetricSnapshot snapshot(const MPrho &rho, const MPrho &ref, const std::vector<std::string> &strings) {
    return {trace(rho), purity(rho), hsip(rho, ref), pauli_tomography(rho, strings), all_bitstring_probabilities(rho)};
}

double distance(const MetricSnapshot &a, const MetricSnapshot &b) {
    double d = std::max({std::abs(a.tr - b.tr), std::abs(a.pur - b.pur), std::abs(a.overlap - b.overlap)});
    for (std::size_t k = 0; k < a.pauli.size(); ++k) d = std::max(d, std::abs(a.pauli[k] - b.pauli[k]));
    for (std::size_t k = 0; k < a.probs.size(); ++k) d = std::max(d, std::abs(a.probs[k] - b.probs[k]));
    return d;
}

Outcome c9_gauge_invariance() {
    Rng rng(0x9a9e);

    // Mixture-index isometries on a noisy state.
    ex::CircuitGenerator g;
    g.n = 5;
    g.depth = 3;
    g.seed = 77;
    const MPrho noisy = ex::evolve_circuit(ex::generate_circuit(g), ex::defaults_for("random-circuit").policy());
    const auto strings = all_pauli_strings(noisy.size());
    const MetricSnapshot base = snapshot(noisy, noisy, strings);
    MPrho rho = noisy;
    double worst_kappa = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t site = rng.below(rho.size());
        const auto kd = static_cast<Eigen::Index>(rho.kappa_dim(site));
        const Eigen::Index grow = kd >= 16 ? 0 : static_cast<Eigen::Index>(rng.below(3));
        rho = apply_kappa_isometry(rho, site, random_isometry(rng, kd + grow, kd));
        worst_kappa = std::max(worst_kappa, distance(base, snapshot(rho, noisy, strings)));
    }

    // Invertible bond gauges on a pure state.
    const MatrixProductState psi0 = random_mps(6, 4, 4242);
    const MPrho ref = from_mps(psi0);
    const auto strings6 = all_pauli_strings(psi0.size());
    const MetricSnapshot base_mps = snapshot(ref, ref, strings6);
    double worst_bond = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        // Each injection starts from the reference so that the gauges do not
        // compound into an ill-conditioned product.
        const std::size_t b = 1 + rng.below(psi0.size() - 1);
        const auto d = static_cast<Eigen::Index>(psi0.bond_dim(b));
        Eigen::VectorXd scales(d);
        for (Eigen::Index k = 0; k < d; ++k) scales(k) = std::exp(rng.uniform(-0.5, 0.5));
        const Eigen::MatrixXcd r = random_isometry(rng, d, d) * scales.asDiagonal() * random_isometry(rng, d, d);
        const MatrixProductState psi = inject_gauge(psi0, b, r);
        worst_bond = std::max(worst_bond, distance(base_mps, snapshot(from_mps(psi), ref, strings6)));
    }
    const bool ok = worst_kappa <= 1e-10 && worst_bond <= 1e-10;
    return {ok, "100 kappa isometries: max metric change " + fmt(worst_kappa) + "; 100 bond gauges: max metric change " +
                    fmt(worst_bond) + " (tol 1e-10)"};
}

Outcome c10_determinism() {
    std::vector<ex::ExperimentConfig> cfgs;
    auto add = [&](const std::string &name, const std::function<void(ex::ExperimentConfig &)> &tweak) {
        ex::ExperimentConfig c = ex::defaults_for(name);
        c.seed = 1234567;
        tweak(c);
        cfgs.push_back(c);
    };
    add("random-flow", [](auto &c) {
        c.N = 12;
        c.n_c = 2;
        c.chi_list = {2, 4, 8};
    });
    add("ghz-channels", [](auto &c) { c.N = 64; });
    add("erasure-growth", [](auto &c) {
        c.N = 40;
        c.steps = 20;
        c.chi_list = {8};
    });
    add("kappa-transport", [](auto &c) { c.N = 64; });
    add("random-circuit", [](auto &c) {
        c.N = 5;
        c.d = 4;
    });
    add("gate-timing", [](auto &c) {
        c.N = 12;
        c.ghz_n = 64;
        c.chi_list = {8};
        c.repeats = 2;
    });
    std::string mismatched;
    for (const auto &c : cfgs) {
        ex::RunOptions serial, threaded;
        threaded.threads = std::max(2u, g_threads);
        std::string a = ex::run_experiment(c, serial).text;
        std::string b = ex::run_experiment(c, threaded).text;
        if (c.experiment == "gate-timing") {
            a = ex::strip_timings(a);
            b = ex::strip_timings(b);
        }
        if (a != b || a.empty()) mismatched += (mismatched.empty() ? "" : ", ") + c.experiment;
    }
    return {mismatched.empty(), mismatched.empty()
                                    ? "all 6 experiments byte-identical across reruns (1 vs " +
                                          std::to_string(std::max(2u, g_threads)) + " threads; timings excluded)"
                                    : "outputs differ for: " + mismatched};
}

struct Criterion {
    int id;
    const char *title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance suite"};
    int only = 0;
    g_threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
    app.add_option("--threads", g_threads, "worker threads")->check(CLI::Range(1u, 1024u));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "GHZ under ZZ damping stays pure and ideal", [] { return c1_zz_invariance(nullptr); }},
        {2, "GHZ under Z and CZ damping follows the closed forms", [] { return c2_ghz_closed_forms(nullptr); }},
        {3, "GHZ erasure gives an even two-way mixture", [] { return c3_ghz_erasure(nullptr); }},
        {4, "kappa transport leaves the state unchanged", [] { return c4_kappa_transport(nullptr); }},
        {5, "random noisy circuits match the dense oracle", [] { return c5_oracle_equivalence(nullptr); }},
        {6, "canonical form and trace survive every update", c6_canonical_form},
        {7, "random-state flow reaches the depolarized attractor", c7_random_flow},
        {8, "registry channels are trace preserving", c8_cptp},
        {9, "metrics are gauge invariant", c9_gauge_invariance},
        {10, "experiment outputs are deterministic", c10_determinism},
    };

    bool all_ok = true;
    for (const auto &c : all) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_ok = all_ok && o.pass;
        std::printf("[%s] C%-2d %s -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
