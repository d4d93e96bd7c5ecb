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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaynet/rng.hpp"

namespace relaynet {

using cd = std::complex<double>;

enum class ConstraintKind { ShortTerm, LongTerm };
enum class CsitMode { Perfect, Partial, Statistical };

std::string to_string(ConstraintKind kind);
std::string to_string(CsitMode mode);
ConstraintKind parse_constraint_kind(const std::string& text);
CsitMode parse_csit_mode(const std::string& text);

/// Constraint kind implied by a CSIT mode: instantaneous first-hop knowledge
/// pairs with short-term caps, variance-only knowledge with long-term caps.
ConstraintKind constraint_for(CsitMode mode);

/// Static two-hop scenario. Powers and variances are linear.
struct NetworkConfig {
    int relays = 1;        // M
    int block_length = 1;  // T
    double source_power = 1.0;
    double relay_power = 1.0;
    double noise_var = 1.0;
    std::vector<double> gamma_h{1.0};
    std::vector<double> gamma_g{1.0};
    ConstraintKind constraint = ConstraintKind::ShortTerm;
    CsitMode csit = CsitMode::Perfect;

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    /// Homogeneous network with equal variances on every link.
    static NetworkConfig homogeneous(int relays, double gamma_h, double gamma_g,
                                     double source_power, double relay_power, double noise_var,
                                     CsitMode csit);

    /// Copy with `csit` replaced and the constraint kind re-bound to it.
    NetworkConfig with_csit(CsitMode mode) const;
};

/// One fading draw. f is the composite channel h_i g_i.
struct ChannelRealization {
    std::vector<cd> h;
    std::vector<cd> g;
    std::vector<cd> f;

    ChannelRealization() = default;
    ChannelRealization(std::vector<cd> h_in, std::vector<cd> g_in);

    std::size_t size() const { return h.size(); }
    std::vector<double> h_gain() const;  // |h_i|^2
    std::vector<double> g_gain() const;  // |g_i|^2
};

/// Amplifier powers p_i = |q_i|^2 with their caps P_i.
class PowerAllocation {
public:
    static constexpr double kCapTolerance = 1e-12;

    PowerAllocation() = default;
    /// Throws ContractError if p is not in [0, P (1 + 1e-12)] or sizes differ.
    PowerAllocation(std::vector<double> p, std::vector<double> caps);

    static PowerAllocation full(std::vector<double> caps);
    static PowerAllocation zero(std::vector<double> caps);

    const std::vector<double>& p() const { return p_; }
    const std::vector<double>& caps() const { return caps_; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }

    /// Sum of p_i / P_i.
    double power_ratio() const;
    /// Amplifier coefficients q_i = sqrt(p_i), phase fixed to zero.
    std::vector<double> amplitudes() const;

    friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;

private:
    std::vector<double> p_;
    std::vector<double> caps_;
};

/// Maximum amplifier powers P_i. Short-term caps need the first-hop channel.
std::vector<double> amplifier_caps(const NetworkConfig& cfg,
                                   std::optional<std::span<const cd>> h = std::nullopt);

ChannelRealization sample_channels(const NetworkConfig& cfg, std::uint64_t seed);
ChannelRealization sample_channels(const NetworkConfig& cfg, Engine& eng, ComplexGaussian& gauss);

/// sigma_v^2 = N0 (sum_i p_i |g_i|^2 + 1).
double overall_noise_variance(const PowerAllocation& alloc, std::span<const cd> g, double noise_var);

} // namespace relaynet
