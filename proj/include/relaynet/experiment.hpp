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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaynet/core_model.hpp"
#include "relaynet/dstc_sim.hpp"

namespace relaynet {

enum class ExperimentKind {
    Convergence,
    BlerVsSnr,
    BerVsDistance,
    PowerRatioVsDistance,
    BerVsNetworkPower,
    AsymptoticStudy,
    SaddleStudy,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// A scheme together with the CSIT it runs under. Labels: onoff,
/// waterfill-partial, waterfill-statistical, maxpower (short-term caps),
/// maxpower-statistical (long-term caps), direct.
struct SchemeSpec {
    Scheme scheme = Scheme::OnOff;
    CsitMode csit = CsitMode::Perfect;

    std::string label() const;
    static SchemeSpec parse(const std::string& label);
    friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Convergence;
    NetworkConfig base;
    std::vector<int> relay_counts;   // kinds that sweep M
    std::vector<double> sweep;       // snr_db, r or scale factors depending on kind
    std::vector<SchemeSpec> schemes;
    std::uint64_t frames = 100000;   // per simulated point
    std::uint64_t trials = 10000;    // channel draws / instances
    std::uint64_t g_draws = 100000;  // saddle study inner Monte Carlo
    double network_snr_db = 15.0;    // P / N0 for distance sweeps
    double eta = 0.0;                // saddle study; 0 means lambda_min = 4, i.e. p_s / N0
    std::uint64_t seed = 1;
    unsigned shards = 1;
    std::string out_dir = ".";

    /// Name of the sweep key for this kind ("snr_db", "r" or "scale"),
    /// empty when the kind has no sweep.
    std::string sweep_key() const;

    /// Throws ConfigError on an inconsistent spec.
    void validate() const;
};

/// Network configuration for M relays: variance vectors of length 1 are
/// broadcast, longer ones are truncated to their first M entries.
NetworkConfig config_for_relays(const NetworkConfig& base, int relays);

/// Scenario text: key/value fields M, T, p_s, p_r, N0, gamma_h, gamma_g,
/// constraint_kind, csit_mode.
NetworkConfig parse_network_config(const std::string& text);

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& origin = "<spec>");
ExperimentSpec load_experiment_spec(const std::string& path);

/// Fully resolved spec, in the same format the parser reads.
std::string dump_experiment_spec(const ExperimentSpec& spec);

struct ExperimentOutput {
    std::vector<std::string> files;
    std::uint64_t frames = 0;  // frames (or trials) per point actually used
    double elapsed_s = 0.0;

    /// kind=<k> seed=<s> frames=<f> elapsed_s=<t>
    std::string summary(const ExperimentSpec& spec) const;
};

/// Writes one CSV per scheme (or one per study) plus a plot script. Partial
/// outputs are removed if the run fails.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Standalone matplotlib script for the given CSVs. Throws ConfigError naming
/// the first path that does not exist.
std::string emit_plot_script(const std::vector<std::string>& csv_paths, ExperimentKind kind);

} // namespace relaynet
