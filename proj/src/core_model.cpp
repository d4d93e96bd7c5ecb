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

#include "relaynet/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaynet/errors.hpp"

namespace relaynet {

std::string to_string(ConstraintKind kind)
{
    return kind == ConstraintKind::ShortTerm ? "ShortTerm" : "LongTerm";
}

std::string to_string(CsitMode mode)
{
    switch (mode) {
    case CsitMode::Perfect:
        return "Perfect";
    case CsitMode::Partial:
        return "Partial";
    case CsitMode::Statistical:
        return "Statistical";
    }
    return "?";
}

ConstraintKind parse_constraint_kind(const std::string& text)
{
    if (text == "ShortTerm")
        return ConstraintKind::ShortTerm;
    if (text == "LongTerm")
        return ConstraintKind::LongTerm;
    throw ConfigError("unknown constraint_kind '" + text + "' (expected ShortTerm or LongTerm)");
}

CsitMode parse_csit_mode(const std::string& text)
{
    if (text == "Perfect")
        return CsitMode::Perfect;
    if (text == "Partial")
        return CsitMode::Partial;
    if (text == "Statistical")
        return CsitMode::Statistical;
    throw ConfigError("unknown csit_mode '" + text + "' (expected Perfect, Partial or Statistical)");
}

ConstraintKind constraint_for(CsitMode mode)
{
    return mode == CsitMode::Statistical ? ConstraintKind::LongTerm : ConstraintKind::ShortTerm;
}

void NetworkConfig::validate() const
{
    std::ostringstream err;
    if (relays < 1)
        err << "M must be >= 1; ";
    if (block_length < 1)
        err << "T must be >= 1; ";
    if (!(source_power > 0.0) || !std::isfinite(source_power))
        err << "p_s must be positive; ";
    if (!(relay_power > 0.0) || !std::isfinite(relay_power))
        err << "p_r must be positive; ";
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        err << "N0 must be positive; ";
    if (relays >= 1) {
        const auto m = static_cast<std::size_t>(relays);
        if (gamma_h.size() != m)
            err << "gamma_h has " << gamma_h.size() << " entries, expected " << m << "; ";
        if (gamma_g.size() != m)
            err << "gamma_g has " << gamma_g.size() << " entries, expected " << m << "; ";
    }
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!std::all_of(gamma_h.begin(), gamma_h.end(), positive))
        err << "gamma_h entries must be positive; ";
    if (!std::all_of(gamma_g.begin(), gamma_g.end(), positive))
        err << "gamma_g entries must be positive; ";
    if (constraint != constraint_for(csit))
        err << "csit_mode " << to_string(csit) << " requires constraint_kind "
            << to_string(constraint_for(csit)) << "; ";
    const std::string msg = err.str();
    if (!msg.empty())
        throw ConfigError("invalid network config: " + msg.substr(0, msg.size() - 2));
}

NetworkConfig NetworkConfig::homogeneous(int relays, double gamma_h, double gamma_g,
                                         double source_power, double relay_power, double noise_var,
                                         CsitMode csit)
{
    NetworkConfig cfg;
    cfg.relays = relays;
    cfg.block_length = relays;
    cfg.source_power = source_power;
    cfg.relay_power = relay_power;
    cfg.noise_var = noise_var;
    cfg.gamma_h.assign(static_cast<std::size_t>(std::max(relays, 0)), gamma_h);
    cfg.gamma_g.assign(static_cast<std::size_t>(std::max(relays, 0)), gamma_g);
    cfg.csit = csit;
    cfg.constraint = constraint_for(csit);
    return cfg;
}

NetworkConfig NetworkConfig::with_csit(CsitMode mode) const
{
    NetworkConfig out = *this;
    out.csit = mode;
    out.constraint = constraint_for(mode);
    return out;
}

ChannelRealization::ChannelRealization(std::vector<cd> h_in, std::vector<cd> g_in)
    : h(std::move(h_in)), g(std::move(g_in))
{
    if (h.size() != g.size())
        throw ContractError("channel vectors h and g differ in length");
    f.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        f[i] = h[i] * g[i];
}

std::vector<double> ChannelRealization::h_gain() const
{
    std::vector<double> out(h.size());
    std::transform(h.begin(), h.end(), out.begin(), [](cd v) { return std::norm(v); });
    return out;
}

std::vector<double> ChannelRealization::g_gain() const
{
    std::vector<double> out(g.size());
    std::transform(g.begin(), g.end(), out.begin(), [](cd v) { return std::norm(v); });
    return out;
}

PowerAllocation::PowerAllocation(std::vector<double> p, std::vector<double> caps)
    : p_(std::move(p)), caps_(std::move(caps))
{
    if (p_.size() != caps_.size())
        throw ContractError("allocation and cap vectors differ in length");
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (!(caps_[i] > 0.0))
            throw ContractError("amplifier cap P_" + std::to_string(i + 1) + " must be positive");
        if (!(p_[i] >= 0.0) || p_[i] > caps_[i] * (1.0 + kCapTolerance))
            throw ContractError("p_" + std::to_string(i + 1) + " outside [0, P_" + std::to_string(i + 1) + "]");
    }
}

PowerAllocation PowerAllocation::full(std::vector<double> caps)
{
    std::vector<double> p = caps;
    return PowerAllocation(std::move(p), std::move(caps));
}

PowerAllocation PowerAllocation::zero(std::vector<double> caps)
{
    std::vector<double> p(caps.size(), 0.0);
    return PowerAllocation(std::move(p), std::move(caps));
}

double PowerAllocation::power_ratio() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i)
        sum += p_[i] / caps_[i];
    return sum;
}

std::vector<double> PowerAllocation::amplitudes() const
{
    std::vector<double> q(p_.size());
    std::transform(p_.begin(), p_.end(), q.begin(), [](double v) { return std::sqrt(v); });
    return q;
}

std::vector<double> amplifier_caps(const NetworkConfig& cfg, std::optional<std::span<const cd>> h)
{
    const auto m = static_cast<std::size_t>(cfg.relays);
    std::vector<double> caps(m);
    if (cfg.constraint == ConstraintKind::ShortTerm) {
        if (!h)
            throw ConfigError("short-term amplifier caps need the first-hop channel h");
        if (h->size() != m)
            throw ConfigError("channel h has wrong length for amplifier caps");
        for (std::size_t i = 0; i < m; ++i)
            caps[i] = cfg.relay_power / (cfg.source_power * std::norm((*h)[i]) + cfg.noise_var);
    } else {
        for (std::size_t i = 0; i < m; ++i)
            caps[i] = cfg.relay_power / (cfg.source_power * cfg.gamma_h[i] + cfg.noise_var);
    }
    return caps;
}

ChannelRealization sample_channels(const NetworkConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    Engine eng = make_stream(seed);
    ComplexGaussian gauss;
    return sample_channels(cfg, eng, gauss);
}

ChannelRealization sample_channels(const NetworkConfig& cfg, Engine& eng, ComplexGaussian& gauss)
{
    const auto m = static_cast<std::size_t>(cfg.relays);
    std::vector<cd> h(m), g(m);
    for (std::size_t i = 0; i < m; ++i)
        h[i] = gauss(eng, cfg.gamma_h[i]);
    for (std::size_t i = 0; i < m; ++i)
        g[i] = gauss(eng, cfg.gamma_g[i]);
    return ChannelRealization(std::move(h), std::move(g));
}

double overall_noise_variance(const PowerAllocation& alloc, std::span<const cd> g, double noise_var)
{
    if (g.size() != alloc.size())
        throw ContractError("allocation and channel g differ in length");
    double sum = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        sum += alloc[i] * std::norm(g[i]);
    return noise_var * sum;
}

} // namespace relaynet
