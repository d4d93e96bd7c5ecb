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

// Shared fixtures for the unit and acceptance binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "relaynet/core_model.hpp"
#include "relaynet/objectives.hpp"
#include "relaynet/rng.hpp"

namespace relaynet::testing {

/// Channels with real, nonnegative taps of the given power gains.
inline ChannelRealization channels_from_gains(const std::vector<double>& h_gain, const std::vector<double>& g_gain)
{
    std::vector<cd> h, g;
    for (double v : h_gain)
        h.emplace_back(std::sqrt(v), 0.0);
    for (double v : g_gain)
        g.emplace_back(std::sqrt(v), 0.0);
    return ChannelRealization(h, g);
}

/// Random perfect-CSIT instance: unit-variance Rayleigh taps, p_s = p_r = 10, N0 = 1.
struct PerfectInstance {
    PerfectCsitObjective obj;
    std::vector<double> caps;
    ChannelRealization chan;
};

inline PerfectInstance random_perfect_instance(int m, Engine& eng, ComplexGaussian& gauss,
                                               double source_power = 10.0, double relay_power = 10.0)
{
    auto cfg = NetworkConfig::homogeneous(m, 1.0, 1.0, source_power, relay_power, 1.0, CsitMode::Perfect);
    PerfectInstance out;
    out.chan = sample_channels(cfg, eng, gauss);
    out.caps = amplifier_caps(cfg, std::span<const cd>(out.chan.h));
    out.obj = PerfectCsitObjective::from_channels(out.chan, 1.0);
    return out;
}

/// Random log objective with gamma_g and caps log-uniform in [1e-2, 1e2].
struct LogInstance {
    LogObjective obj;
    std::vector<double> caps;
};

inline LogInstance random_log_instance(int m, Engine& eng)
{
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    LogInstance out;
    for (int i = 0; i < m; ++i) {
        out.obj.a.push_back(std::pow(10.0, expo(eng)));
        out.obj.gamma_g.push_back(std::pow(10.0, expo(eng)));
        out.caps.push_back(std::pow(10.0, expo(eng)));
    }
    return out;
}

// Reference E1 in extended precision: series below 2, continued fraction above.
inline long double e1_reference(long double x)
{
    if (x <= 2.0L) {
        long double term = 1.0L;
        long double sum = 0.0L;
        for (int k = 1; k < 200; ++k) {
            term *= -x / k;
            const long double add = -term / k;
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum))
                break;
        }
        return sum - 0.577215664901532860606512090082402431L - std::log(x);
    }
    // E1(x) = e^-x / (x + 1 / (1 + 1 / (x + 2 / (1 + 2 / (x + ...))))), evaluated backwards.
    long double tail = 0.0L;
    for (int k = 400; k >= 1; --k) {
        tail = k / (1.0L + k / (x + tail));
    }
    return std::exp(-x) / (x + tail);
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace relaynet::testing
