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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relaynet/codebook.hpp"
#include "relaynet/core_model.hpp"
#include "relaynet/rng.hpp"

namespace relaynet {

enum class Scheme { OnOff, Waterfill, MaxPower, DirectLink };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// Throws ConfigError unless the scheme can run under the CSIT mode:
/// OnOff needs Perfect, Waterfill needs Partial or Statistical.
void check_compatible(Scheme scheme, CsitMode mode);

/// Amplifier powers for one scheme under the CSIT mode of `cfg`. The
/// statistical-CSIT waterfill solution depends only on the variances and is
/// computed once at construction.
class Allocator {
public:
    Allocator(const NetworkConfig& cfg, Scheme scheme, double eta);

    PowerAllocation operator()(const ChannelRealization& chan) const;

private:
    NetworkConfig cfg_;
    Scheme scheme_;
    double eta_;
    std::optional<PowerAllocation> fixed_;
};

/// Internal signals of one transmitted frame.
struct FrameSignals {
    std::vector<Eigen::VectorXcd> relay_tx;  // x_i
    Eigen::VectorXcd noise;                  // v = sum q_i g_i A_i n_i + w
};

/// Sends codeword `index` through the two hops: y_i = sqrt(p_s) h_i s + n_i,
/// x_i = q_i A_i y_i, r = sum g_i x_i + w.
Eigen::VectorXcd transmit_frame(const LdCodebook& code, const ChannelRealization& chan,
                                const PowerAllocation& alloc, double source_power, double noise_var,
                                std::size_t index, Engine& eng, ComplexGaussian& gauss,
                                FrameSignals* signals = nullptr);

/// Noiseless receive points sqrt(p_s) S_k Q f for every codeword.
std::vector<Eigen::VectorXcd> noiseless_points(const LdCodebook& code, const ChannelRealization& chan,
                                               const PowerAllocation& alloc, double source_power);

/// Index of the nearest point; ties resolve to the lowest index.
std::size_t nearest_point(const std::vector<Eigen::VectorXcd>& points, const Eigen::VectorXcd& r);

/// Exhaustive ML decision over all 2^T codewords.
std::size_t ml_decode(const LdCodebook& code, const ChannelRealization& chan, const PowerAllocation& alloc,
                      double source_power, const Eigen::VectorXcd& r);

struct ErrorTally {
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t block_errors = 0;

    ErrorTally& operator+=(const ErrorTally& o)
    {
        frames += o.frames;
        bit_errors += o.bit_errors;
        block_errors += o.block_errors;
        return *this;
    }
    friend bool operator==(const ErrorTally&, const ErrorTally&) = default;
};

struct SimPoint {
    double x = 0.0;  // SNR in dB or distance, depending on the sweep
    ErrorTally tally;
    int bits_per_frame = 1;

    double bler() const;
    double ber() const;
    double stderr_bler() const;
};

struct SimResult {
    std::string scheme;
    std::uint64_t seed = 0;
    std::vector<SimPoint> points;
    double elapsed_s = 0.0;
};

/// How an SNR value in dB maps to node powers (N0 from the config).
enum class PowerSplit {
    PerNode,        // p_s = p_r = snr N0, direct link uses snr N0
    NetworkShared,  // p_s = p_r = snr N0 / (M + 1), direct link uses snr N0
};

struct SimOptions {
    std::uint64_t frames = 1000;
    std::uint64_t seed = 1;
    unsigned shards = 1;
    PowerSplit split = PowerSplit::PerNode;
};

/// Configuration with powers set from an SNR value.
NetworkConfig at_snr(const NetworkConfig& base, double snr_db, PowerSplit split);

/// Transmit power of the direct-link baseline at an SNR value.
double direct_link_power(const NetworkConfig& base, double snr_db);

/// Simulates `frames` frames at one operating point. The random stream of
/// frame chunk c is (seed, stream_id, c), so results do not depend on `shards`.
ErrorTally simulate_point(const NetworkConfig& cfg, Scheme scheme, const LdCodebook& code, std::uint64_t frames,
                          std::uint64_t seed, std::uint64_t stream_id, unsigned shards, double direct_power);

SimResult run_monte_carlo(const NetworkConfig& base, Scheme scheme, const LdCodebook& code,
                          std::span<const double> snr_grid_db, const SimOptions& options);

/// Line topology with unit source-destination distance: gamma_h = 1/r^2,
/// gamma_g = 1/(1-r)^2, p_s = p_r = network_power / (M + 1).
NetworkConfig distance_topology(const NetworkConfig& base, double r, double network_power);

/// Average of sum_i p_i / P_i over channel draws, one value per distance.
std::vector<double> effective_relay_count(const NetworkConfig& base, Scheme scheme, std::span<const double> r_grid,
                                          double network_power, std::uint64_t trials, std::uint64_t seed,
                                          unsigned shards = 1);

/// scheme,<x_label>,frames,block_errors,bit_errors,bler,ber,stderr_bler
void write_sim_csv(std::ostream& os, const SimResult& result, const std::string& x_label = "snr_db");

/// Least-squares slope of -log10(BLER) against SNR/10 (the diversity order),
/// over points with at least one block error.
double fitted_diversity_order(const SimResult& result);

} // namespace relaynet
