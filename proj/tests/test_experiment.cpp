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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "relaynet/errors.hpp"
#include "relaynet/experiment.hpp"

using namespace relaynet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& path)
{
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    return line;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("relaynet_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string expect_error(const std::string& text)
{
    try {
        parse_experiment_spec(text, "spec.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("spec parsing fills defaults")
{
    const auto spec = parse_experiment_spec(R"(
kind: bler_vs_snr
sweep:
  snr_db: [0, 10, 20]
schemes: [onoff, waterfill-statistical]
network:
  M: 2
  p_s: 3.0
)");
    CHECK(spec.kind == ExperimentKind::BlerVsSnr);
    CHECK(spec.sweep == std::vector<double>{0, 10, 20});
    CHECK(spec.schemes.size() == 2);
    CHECK(spec.schemes[1] == SchemeSpec{Scheme::Waterfill, CsitMode::Statistical});
    CHECK(spec.base.relays == 2);
    CHECK(spec.base.block_length == 2);
    CHECK(spec.base.source_power == 3.0);
    CHECK(spec.base.gamma_h == std::vector<double>{1.0, 1.0});
    CHECK(spec.frames == 100000);
    CHECK(spec.seed == 1);

    // The dump parses back to the same spec.
    const auto again = parse_experiment_spec(dump_experiment_spec(spec));
    CHECK(again.schemes == spec.schemes);
    CHECK(again.sweep == spec.sweep);
    CHECK(again.base.gamma_g == spec.base.gamma_g);
    CHECK(dump_experiment_spec(again) == dump_experiment_spec(spec));
}

TEST_CASE("errors carry the file and line")
{
    CHECK(expect_error("kind: convergence\nrelays: [2]\nbogus: 1\n").rfind("spec.yaml:3:", 0) == 0);
    CHECK(expect_error("kind: nope\n").rfind("spec.yaml:1:", 0) == 0);
    CHECK(expect_error("kind: bler_vs_snr\nnetwork:\n  M: 2\nschemes: [onoff]\nsweep:\n  snr_db: [10, 5]\n")
              .rfind("spec.yaml:6:", 0) == 0);
    CHECK(expect_error("kind: bler_vs_snr\nnetwork:\n  M: 2\nsweep:\n  snr_db: [1]\nschemes: [onoff, turbo]\n")
              .rfind("spec.yaml:6:", 0) == 0);
    CHECK(expect_error("kind: ber_vs_distance\nrelays: [2]\nschemes: [onoff]\nsweep:\n  r: [0.5, 1.5]\n")
              .rfind("spec.yaml:5:", 0) == 0);
    CHECK(expect_error("kind: convergence\nrelays: [2]\nnetwork:\n  N0: -1\n").rfind("spec.yaml:4:", 0) == 0);
    CHECK(expect_error("kind: bler_vs_snr\nnetwork:\n  M: 2\nsweep:\n  r: [0.5]\nschemes: [onoff]\n")
              .rfind("spec.yaml:5:", 0) == 0);
    CHECK(expect_error("kind: [unclosed\n").rfind("spec.yaml:", 0) == 0);
    CHECK_FALSE(expect_error("kind: bler_vs_snr\nframes: 10\nnetwork:\n  M: 2\nsweep:\n  snr_db: [1]\nschemes: [onoff]\n")
                    .empty());
}

TEST_CASE("relay-count configs broadcast or take prefixes")
{
    NetworkConfig base;
    base.gamma_g = {0.85, 3.17, 1.50, 1.89};
    const auto cfg = config_for_relays(base, 2);
    CHECK(cfg.gamma_g == std::vector<double>{0.85, 3.17});
    CHECK(cfg.gamma_h == std::vector<double>{1.0, 1.0});
    CHECK(cfg.block_length == 2);
    CHECK_THROWS_AS(config_for_relays(base, 5), ConfigError);
}

TEST_CASE("scheme labels round-trip")
{
    for (const char* label : {"onoff", "waterfill-partial", "waterfill-statistical", "maxpower",
                              "maxpower-statistical", "direct"})
        CHECK(SchemeSpec::parse(label).label() == label);
    for (auto k : {ExperimentKind::Convergence, ExperimentKind::SaddleStudy, ExperimentKind::AsymptoticStudy})
        CHECK(parse_experiment_kind(to_string(k)) == k);
}

TEST_CASE("experiment CSV schemas")
{
    struct Case {
        std::string yaml;
        std::string file;
        std::string header;
    };
    const std::vector<Case> cases = {
        {"kind: convergence\ntrials: 50\nrelays: [2, 3]\nnetwork: {p_s: 10, p_r: 10}\n", "convergence.csv",
         "M,iteration,mean_normalized_objective,fraction_stationary"},
        {"kind: bler_vs_snr\nframes: 1000\nsweep: {snr_db: [0, 5]}\nschemes: [maxpower]\nnetwork: {M: 2}\n",
         "bler_vs_snr_maxpower.csv", "scheme,snr_db,frames,block_errors,bit_errors,bler,ber,stderr_bler"},
        {"kind: ber_vs_distance\nframes: 1000\nrelays: [2]\nsweep: {r: [0.3]}\nschemes: [direct]\n",
         "ber_vs_distance_direct.csv", "scheme,M,r,frames,block_errors,bit_errors,bler,ber,stderr_bler"},
        {"kind: power_ratio_vs_distance\ntrials: 100\nrelays: [2]\nsweep: {r: [0.3]}\nschemes: [onoff]\n",
         "power_ratio_vs_distance_onoff.csv", "scheme,M,r,trials,effective_relays"},
        {"kind: ber_vs_network_power\nframes: 1000\nrelays: [2]\nsweep: {snr_db: [5]}\nschemes: "
         "[waterfill-partial]\nnetwork: {gamma_h: 4, gamma_g: [0.85, 3.17]}\n",
         "ber_vs_network_power_waterfill-partial.csv",
         "scheme,M,snr_db,frames,block_errors,bit_errors,bler,ber,stderr_bler"},
        {"kind: asymptotic_study\ntrials: 50\nrelays: [2]\nsweep: {scale: [1, 100]}\n", "asymptotic.csv",
         "regime,scale,M,trials,onoff_mean_active,onoff_fraction_all_on,onoff_fraction_single,"
         "waterfill_mean_at_cap"},
        {"kind: saddle_study\ntrials: 2\ng_draws: 10000\nrelays: [2]\n", "saddle_study.csv",
         "M,instances,g_draws,eta,mean_relative_error,stderr"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.file);
        auto spec = parse_experiment_spec(c.yaml);
        const auto dir = scratch("schema");
        spec.out_dir = dir.string();
        const auto out = run_experiment(spec);
        CHECK(out.files.size() == 2);
        CHECK(first_line((dir / c.file).string()) == c.header);
        const auto plot = std::find_if(out.files.begin(), out.files.end(),
                                       [](const std::string& f) { return f.ends_with(".py"); });
        REQUIRE(plot != out.files.end());
        CHECK(slurp(*plot).find(c.file) != std::string::npos);
        CHECK(out.summary(spec).rfind("kind=" + to_string(spec.kind) + " seed=1 frames=", 0) == 0);
        fs::remove_all(dir);
    }
}

TEST_CASE("plot scripts use log axes for error rates")
{
    const auto dir = scratch("plot");
    fs::create_directories(dir);
    const auto csv = (dir / "x.csv").string();
    std::ofstream(csv) << "scheme,snr_db\n";
    CHECK(emit_plot_script({csv}, ExperimentKind::BlerVsSnr).find("set_yscale('log')") != std::string::npos);
    CHECK(emit_plot_script({csv}, ExperimentKind::Convergence).find("set_yscale") == std::string::npos);
    CHECK_THROWS_AS(emit_plot_script({(dir / "missing.csv").string()}, ExperimentKind::BlerVsSnr), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("failed runs leave no partial outputs")
{
    // A directory squatting on the plot-script path makes the last write fail
    // after the CSV files are already on disk.
    auto spec = parse_experiment_spec(
        "kind: bler_vs_snr\nframes: 1000\nsweep: {snr_db: [0]}\nschemes: [maxpower, onoff]\nnetwork: {M: 2}\n");
    const auto dir = scratch("partial");
    fs::create_directories(dir / "plot_bler_vs_snr.py");
    spec.out_dir = dir.string();
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);
    CHECK_FALSE(fs::exists(dir / "bler_vs_snr_maxpower.csv"));
    CHECK_FALSE(fs::exists(dir / "bler_vs_snr_onoff.csv"));
    fs::remove_all(dir);
}

TEST_CASE("output bytes do not depend on the shard count")
{
    const std::vector<std::string> specs = {
        "kind: convergence\ntrials: 600\nrelays: [4]\nnetwork: {p_s: 10, p_r: 10}\n",
        "kind: bler_vs_snr\nframes: 1500\nsweep: {snr_db: [5, 10]}\nschemes: [onoff, waterfill-partial]\nnetwork: {M: 2}\n",
        "kind: power_ratio_vs_distance\ntrials: 700\nrelays: [2, 3]\nsweep: {r: [0.2, 0.8]}\nschemes: "
        "[waterfill-partial]\n",
        "kind: saddle_study\ntrials: 2\ng_draws: 10000\nrelays: [2, 3]\n",
    };
    for (const auto& text : specs) {
        auto spec = parse_experiment_spec(text);
        const auto d1 = scratch("det1");
        const auto d3 = scratch("det3");
        spec.out_dir = d1.string();
        spec.shards = 1;
        const auto a = run_experiment(spec);
        spec.out_dir = d3.string();
        spec.shards = 3;
        const auto b = run_experiment(spec);
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t i = 0; i < a.files.size(); ++i)
            if (a.files[i].ends_with(".csv"))
                CHECK(slurp(a.files[i]) == slurp(b.files[i]));
        fs::remove_all(d1);
        fs::remove_all(d3);
    }
}
