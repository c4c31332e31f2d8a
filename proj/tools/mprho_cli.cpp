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

// mprho: command-line driver for the numerical experiments.
//
//   mprho <experiment> [--config cfg.json] [--out path] [--seed u64]
//                      [--strict] [--threads k] [--checkpoint prefix]
//   mprho random-circuit ... [--circuit file.json] [--emit-circuit file.json]
//   mprho inspect <checkpoint.mprho>
//
// Exit codes: 0 success, 1 runtime or strict-check failure, 2 bad
// configuration or input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mprho/checkpoint.hpp"
#include "mprho/experiments/runners.hpp"
#include "mprho/metrics.hpp"

namespace {

namespace ex = mprho::experiments;

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    unsigned threads = 1;
    std::string checkpoint;
    std::string circuit;
    std::string emit_circuit;
};

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw mprho::ConfigError("cannot open output '" + path + "'");
    os << text;
    if (!os) throw mprho::Error("failed writing '" + path + "'");
}

ex::ExperimentConfig resolve_config(const std::string &experiment, const CommonArgs &a) {
    ex::ExperimentConfig cfg = a.config.empty() ? ex::defaults_for(experiment) : ex::load_config(a.config, experiment);
    if (a.seed) cfg.seed = a.seed;
    if (!a.out.empty()) cfg.out = a.out;
    if (!a.circuit.empty()) cfg.circuit = a.circuit;
    ex::validate(cfg);
    cfg.require_seed();
    return cfg;
}

int run(const std::string &experiment, const CommonArgs &a) {
    const ex::ExperimentConfig cfg = resolve_config(experiment, a);
    ex::RunOptions opts;
    opts.strict = a.strict;
    opts.threads = a.threads;
    opts.checkpoint_prefix = a.checkpoint;
    if (experiment == "random-circuit") {
        const ex::RandomCircuitResult r = ex::run_random_circuit(cfg, opts);
        if (!a.emit_circuit.empty()) write_text(a.emit_circuit, ex::emit_circuit(r.circuit));
        write_text(cfg.out, ex::to_json(r));
        return 0;
    }
    write_text(cfg.out, ex::run_experiment(cfg, opts).text);
    return 0;
}

int inspect(const std::string &path) {
    const mprho::MPrho rho = mprho::load_checkpoint(path);
    nlohmann::json j;
    j["n"] = rho.size();
    j["canonical"] = rho.is_canonical();
    j["oc"] = rho.oc();
    std::vector<std::size_t> chi, kappa;
    for (std::size_t i = 0; i <= rho.size(); ++i) chi.push_back(rho.bond_dim(i));
    for (std::size_t i = 0; i < rho.size(); ++i) kappa.push_back(rho.kappa_dim(i));
    j["chi"] = chi;
    j["kappa"] = kappa;
    j["trace"] = mprho::trace(rho);
    j["purity"] = mprho::purity(rho);
    std::cout << j.dump(2) << "\n";
    return 0;
}

void add_common(CLI::App *sub, CommonArgs &a) {
    sub->add_option("--config", a.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output path (default: config 'out', else stdout)");
    sub->add_option("--seed", a.seed, "64-bit master seed (overrides the config)");
    sub->add_flag("--strict", a.strict, "enforce the experiment's post-conditions");
    sub->add_option("--threads", a.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--checkpoint", a.checkpoint, "write final states as <prefix>_<name>.mprho");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Noisy quantum circuits with matrix product density operators"};
    app.require_subcommand(1);
    CommonArgs args;
    std::string checkpoint_path;

    std::string chosen;
    for (const auto &name : ex::experiment_names()) {
        CLI::App *sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(sub, args);
        if (name == "random-circuit") {
            sub->add_option("--circuit", args.circuit, "circuit description to run instead of generating one")
                ->check(CLI::ExistingFile);
            sub->add_option("--emit-circuit", args.emit_circuit, "write the executed circuit as JSON");
        }
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI::App *insp = app.add_subcommand("inspect", "summarize a checkpointed state");
    insp->add_option("path", checkpoint_path, "checkpoint file")->required()->check(CLI::ExistingFile);
    insp->callback([&chosen] { chosen = "inspect"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (chosen == "inspect") return inspect(checkpoint_path);
        return run(chosen, args);
    } catch (const mprho::ConfigError &e) {
        std::cerr << "mprho: config error: " << e.what() << "\n";
        return 2;
    } catch (const mprho::ParseError &e) {
        std::cerr << "mprho: parse error: " << e.what() << "\n";
        return 2;
    } catch (const mprho::StrictCheckError &e) {
        std::cerr << "mprho: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "mprho: error: " << e.what() << "\n";
        return 1;
    }
}
