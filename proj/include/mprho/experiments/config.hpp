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
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mprho/chain.hpp"
#include "mprho/errors.hpp"

namespace mprho::experiments {

inline const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names{"random-flow",     "ghz-channels",   "erasure-growth",
                                                "kappa-transport", "random-circuit", "gate-timing"};
    return names;
}

/// Parameters of one experiment run. Every field has a per-experiment
/// default (see defaults_for); `seed` has none and must be supplied.
struct ExperimentConfig {
    std::string experiment;
    std::size_t N = 0;
    std::size_t ghz_n = 500;  // gate-timing: size of the GHZ reference state
    std::size_t n_c = 4;
    std::size_t d = 6;
    std::size_t steps = 0;
    std::vector<std::size_t> chi_list;
    double alpha = 0.95;
    double beta = 0.95;
    std::vector<double> phi_grid;
    double phi = std::numbers::pi / 4;  // gate-timing damping angle
    double noise_phi_max = std::numbers::pi / 4;
    double fsim_theta_max = 2 * std::numbers::pi;
    double fsim_phi_max = 2 * std::numbers::pi;
    std::string mode = "single";
    std::string circuit;  // random-circuit: optional circuit file
    std::size_t tomography_samples = 256;
    std::size_t bitstring_samples = 256;
    std::size_t repeats = 5;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t chi_max = kUnlimitedRank;
    std::size_t kappa_max = 256;
    double svd_cutoff = kDefaultCutoff;
    bool compress_kappa = true;

    TruncationPolicy policy() const {
        TruncationPolicy p;
        p.cutoff = svd_cutoff;
        p.max_chi = chi_max;
        p.kappa_cutoff = svd_cutoff;
        p.max_kappa = kappa_max;
        p.compress_kappa = compress_kappa;
        return p;
    }

    std::uint64_t require_seed() const {
        if (!seed) throw ConfigError("a seed is required (config key 'seed' or --seed)");
        return *seed;
    }
};

inline ExperimentConfig defaults_for(const std::string &experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    for (int k = 0; k <= 10; ++k) c.phi_grid.push_back(0.1 * k * std::numbers::pi);
    if (experiment == "random-flow") {
        c.N = 50;
        c.chi_list = {2, 4, 8, 16};
    } else if (experiment == "ghz-channels") {
        c.N = 500;
    } else if (experiment == "erasure-growth") {
        c.N = 100;
        c.chi_list = {16};
        c.steps = 50;
        c.compress_kappa = false;
    } else if (experiment == "kappa-transport") {
        c.N = 500;
    } else if (experiment == "random-circuit") {
        c.N = 6;
        c.d = 6;
        c.kappa_max = 65536;  // effectively exact at the oracle-checked sizes
    } else if (experiment == "gate-timing") {
        c.N = 50;
        c.chi_list = {16};
    } else {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    return c;
}

namespace detail {

inline void check_rate(double r, const char *key) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string("'") + key + "' must lie in [0, 1]");
}

template <typename T>
T get_as(const nlohmann::json &j, const std::string &key) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

inline std::size_t get_count(const nlohmann::json &j, const std::string &key) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError("config key '" + key + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

}  // namespace detail

/// Checks ranges and per-experiment requirements.
inline void validate(const ExperimentConfig &c) {
    const auto &names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        throw ConfigError("unknown experiment '" + c.experiment + "'");
    }
    auto at_least = [](std::size_t v, std::size_t lo, const char *key) {
        if (v < lo) throw ConfigError(std::string("'") + key + "' must be >= " + std::to_string(lo));
    };
    at_least(c.N, 1, "N");
    at_least(c.n_c, 1, "n_c");
    at_least(c.d, 1, "d");
    at_least(c.repeats, 1, "repeats");
    at_least(c.kappa_max, 1, "kappa_max");
    at_least(c.chi_max, 1, "chi_max");
    for (auto chi : c.chi_list) at_least(chi, 1, "chi_list entries");
    detail::check_rate(c.alpha, "alpha");
    detail::check_rate(c.beta, "beta");
    if (!(c.svd_cutoff >= 0.0 && c.svd_cutoff < 1.0)) throw ConfigError("'svd_cutoff' must lie in [0, 1)");
    if (c.mode != "single" && c.mode != "sweep") throw ConfigError("'mode' must be \"single\" or \"sweep\"");
    if (c.experiment == "random-flow" && c.chi_list.size() < 2) throw ConfigError("random-flow needs at least two chi values");
    if ((c.experiment == "erasure-growth" || c.experiment == "gate-timing") && c.chi_list.empty()) {
        throw ConfigError(c.experiment + " needs 'chi_list' with the initial bond dimension");
    }
    if (c.experiment == "ghz-channels" || c.experiment == "kappa-transport") at_least(c.N, 2, "N");
    if (c.experiment == "ghz-channels" && c.phi_grid.empty()) throw ConfigError("'phi_grid' must not be empty");
    if (c.experiment == "erasure-growth") {
        at_least(c.steps, 1, "steps");
        if (c.steps >= c.N) throw ConfigError("'steps' must be smaller than N");
    }
    if (c.experiment == "gate-timing") {
        at_least(c.N, 2, "N");
        at_least(c.ghz_n, 2, "ghz_n");
    }
}

/// Reads a JSON object over the defaults of `experiment`; unknown keys and
/// a mismatching "experiment" entry are rejected.
inline ExperimentConfig parse_config(const nlohmann::json &j, const std::string &experiment) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c = defaults_for(experiment);
    static const std::set<std::string> known{
        "experiment", "N",           "ghz_n",          "n_c",        "d",         "steps",          "chi_list",
        "alpha",      "beta",        "phi_grid",       "phi",        "noise_phi_max", "fsim_theta_max", "fsim_phi_max",
        "mode",       "circuit",     "tomography_samples", "bitstring_samples", "repeats", "seed", "out",
        "chi_max",    "kappa_max",   "svd_cutoff",     "compress_kappa"};
    for (const auto &[key, v] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
        if (key == "experiment") {
            if (detail::get_as<std::string>(v, key) != experiment) {
                throw ConfigError("config is for '" + v.get<std::string>() + "', not '" + experiment + "'");
            }
        } else if (key == "N") {
            c.N = detail::get_count(v, key);
        } else if (key == "ghz_n") {
            c.ghz_n = detail::get_count(v, key);
        } else if (key == "n_c") {
            c.n_c = detail::get_count(v, key);
        } else if (key == "d") {
            c.d = detail::get_count(v, key);
        } else if (key == "steps") {
            c.steps = detail::get_count(v, key);
        } else if (key == "chi_list") {
            if (!v.is_array()) throw ConfigError("'chi_list' must be an array");
            c.chi_list.clear();
            for (const auto &e : v) c.chi_list.push_back(detail::get_count(e, key));
        } else if (key == "alpha") {
            c.alpha = detail::get_as<double>(v, key);
        } else if (key == "beta") {
            c.beta = detail::get_as<double>(v, key);
        } else if (key == "phi_grid") {
            c.phi_grid = detail::get_as<std::vector<double>>(v, key);
        } else if (key == "phi") {
            c.phi = detail::get_as<double>(v, key);
        } else if (key == "noise_phi_max") {
            c.noise_phi_max = detail::get_as<double>(v, key);
        } else if (key == "fsim_theta_max") {
            c.fsim_theta_max = detail::get_as<double>(v, key);
        } else if (key == "fsim_phi_max") {
            c.fsim_phi_max = detail::get_as<double>(v, key);
        } else if (key == "mode") {
            c.mode = detail::get_as<std::string>(v, key);
        } else if (key == "circuit") {
            c.circuit = detail::get_as<std::string>(v, key);
        } else if (key == "tomography_samples") {
            c.tomography_samples = detail::get_count(v, key);
        } else if (key == "bitstring_samples") {
            c.bitstring_samples = detail::get_count(v, key);
        } else if (key == "repeats") {
            c.repeats = detail::get_count(v, key);
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative 64-bit integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "out") {
            c.out = detail::get_as<std::string>(v, key);
        } else if (key == "chi_max") {
            c.chi_max = detail::get_count(v, key);
        } else if (key == "kappa_max") {
            c.kappa_max = detail::get_count(v, key);
        } else if (key == "svd_cutoff") {
            c.svd_cutoff = detail::get_as<double>(v, key);
        } else if (key == "compress_kappa") {
            c.compress_kappa = detail::get_as<bool>(v, key);
        }
    }
    validate(c);
    return c;
}

inline ExperimentConfig parse_config(const std::string &text, const std::string &experiment) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j, experiment);
}

inline ExperimentConfig load_config(const std::string &path, const std::string &experiment) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), experiment);
}

}  // namespace mprho::experiments
