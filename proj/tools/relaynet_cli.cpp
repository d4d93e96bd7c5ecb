// Copyright 2026 The relaynet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: runs one experiment spec file.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relaynet/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Relay power allocation experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the experiment described by a spec file");
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> shards;
    std::optional<std::uint64_t> frames;
    std::optional<std::string> out_dir;
    bool print_config = false;
    run->add_option("spec-file", spec_path, "YAML experiment spec")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--shards", shards, "Worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
    run->add_option("--frames-override", frames, "Override frames per point (trials for draw-based kinds)")
        ->check(CLI::PositiveNumber);
    run->add_option("--out-dir", out_dir, "Directory for CSV and plot outputs");
    run->add_flag("--print-config", print_config, "Print the resolved config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto spec = relaynet::load_experiment_spec(spec_path);
        if (seed)
            spec.seed = *seed;
        if (shards)
            spec.shards = *shards;
        if (out_dir)
            spec.out_dir = *out_dir;
        if (frames) {
            switch (spec.kind) {
            case relaynet::ExperimentKind::BlerVsSnr:
            case relaynet::ExperimentKind::BerVsDistance:
            case relaynet::ExperimentKind::BerVsNetworkPower:
                spec.frames = *frames;
                break;
            case relaynet::ExperimentKind::SaddleStudy:
                spec.g_draws = *frames;
                break;
            default:
                spec.trials = *frames;
                break;
            }
        }
        spec.validate();
        if (print_config) {
            std::cout << relaynet::dump_experiment_spec(spec);
            return 0;
        }
        const auto out = relaynet::run_experiment(spec);
        for (const auto& f : out.files)
            std::cerr << "wrote " << f << '\n';
        std::cout << out.summary(spec) << std::endl;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
