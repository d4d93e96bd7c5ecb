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

#include "relaynet/dstc_sim.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "relaynet/errors.hpp"
#include "relaynet/objectives.hpp"
#include "relaynet/onoff.hpp"
#include "relaynet/parallel.hpp"
#include "relaynet/waterfill.hpp"

namespace relaynet {

std::string to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::OnOff:
        return "OnOff";
    case Scheme::Waterfill:
        return "Waterfill";
    case Scheme::MaxPower:
        return "MaxPower";
    case Scheme::DirectLink:
        return "DirectLink";
    }
    return "?";
}

Scheme parse_scheme(const std::string& text)
{
    for (Scheme s : {Scheme::OnOff, Scheme::Waterfill, Scheme::MaxPower, Scheme::DirectLink})
        if (text == to_string(s))
            return s;
    throw ConfigError("unknown scheme '" + text + "' (expected OnOff, Waterfill, MaxPower or DirectLink)");
}

void check_compatible(Scheme scheme, CsitMode mode)
{
    if (scheme == Scheme::OnOff && mode != CsitMode::Perfect)
        throw ConfigError("scheme OnOff requires csit_mode Perfect, got " + to_string(mode));
    if (scheme == Scheme::Waterfill && mode == CsitMode::Perfect)
        throw ConfigError("scheme Waterfill requires csit_mode Partial or Statistical");
}

Allocator::Allocator(const NetworkConfig& cfg, Scheme scheme, double eta) : cfg_(cfg), scheme_(scheme), eta_(eta)
{
    cfg_.validate();
    check_compatible(scheme, cfg_.csit);
    if (scheme_ == Scheme::DirectLink)
        throw ConfigError("the direct link baseline has no relay allocation");
    if (cfg_.csit == CsitMode::Statistical) {
        const auto caps = amplifier_caps(cfg_);
        if (scheme_ == Scheme::Waterfill) {
            auto obj = StatisticalCsitObjective::make(cfg_.gamma_h, cfg_.gamma_g, eta_);
            fixed_ = solve_waterfill(obj, caps).allocation;
        } else {
            fixed_ = PowerAllocation::full(caps);
        }
    }
}

PowerAllocation Allocator::operator()(const ChannelRealization& chan) const
{
    if (fixed_)
        return *fixed_;
    auto caps = amplifier_caps(cfg_, std::span<const cd>(chan.h));
    switch (scheme_) {
    case Scheme::OnOff:
        return solve_onoff(PerfectCsitObjective::from_channels(chan, eta_), caps).allocation;
    case Scheme::Waterfill:
        return solve_waterfill(PartialCsitObjective::make(chan.h, cfg_.gamma_g, eta_), caps).allocation;
    default:
        return PowerAllocation::full(std::move(caps));
    }
}

Eigen::VectorXcd transmit_frame(const LdCodebook& code, const ChannelRealization& chan, const PowerAllocation& alloc,
                                double source_power, double noise_var, std::size_t index, Engine& eng,
                                ComplexGaussian& gauss, FrameSignals* signals)
{
    const std::size_t m = code.relays();
    if (chan.size() != m || alloc.size() != m)
        throw ContractError("frame: channel, allocation and codebook sizes differ");
    if (index >= code.size())
        throw ContractError("frame: codeword index out of range");
    const int t = code.block_length;
    const Eigen::VectorXcd& s = code.symbols[index];
    const double sqrt_ps = std::sqrt(source_power);
    const auto q = alloc.amplitudes();

    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(t);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(t);
    Eigen::VectorXcd n(t);
    if (signals)
        signals->relay_tx.assign(m, Eigen::VectorXcd());
    for (std::size_t i = 0; i < m; ++i) {
        for (int k = 0; k < t; ++k)
            n(k) = gauss(eng, noise_var);
        const Eigen::VectorXcd y = (sqrt_ps * chan.h[i]) * s + n;
        const Eigen::VectorXcd x = q[i] * (code.dispersion[i] * y);
        r += chan.g[i] * x;
        if (signals) {
            v += (q[i] * chan.g[i]) * (code.dispersion[i] * n);
            signals->relay_tx[i] = x;
        }
    }
    for (int k = 0; k < t; ++k) {
        const cd w = gauss(eng, noise_var);
        r(k) += w;
        v(k) += w;
    }
    if (signals)
        signals->noise = std::move(v);
    return r;
}

std::vector<Eigen::VectorXcd> noiseless_points(const LdCodebook& code, const ChannelRealization& chan,
                                               const PowerAllocation& alloc, double source_power)
{
    const std::size_t m = code.relays();
    if (chan.size() != m || alloc.size() != m)
        throw ContractError("decoder: channel, allocation and codebook sizes differ");
    Eigen::VectorXcd weights(static_cast<Eigen::Index>(m));
    const double sqrt_ps = std::sqrt(source_power);
    for (std::size_t i = 0; i < m; ++i)
        weights(static_cast<Eigen::Index>(i)) = sqrt_ps * std::sqrt(alloc[i]) * chan.f[i];
    std::vector<Eigen::VectorXcd> points;
    points.reserve(code.size());
    for (const auto& cw : code.codewords)
        points.push_back(cw * weights);
    return points;
}

std::size_t nearest_point(const std::vector<Eigen::VectorXcd>& points, const Eigen::VectorXcd& r)
{
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double d = (r - points[k]).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

std::size_t ml_decode(const LdCodebook& code, const ChannelRealization& chan, const PowerAllocation& alloc,
                      double source_power, const Eigen::VectorXcd& r)
{
    return nearest_point(noiseless_points(code, chan, alloc, source_power), r);
}

double SimPoint::bler() const
{
    return tally.frames ? static_cast<double>(tally.block_errors) / static_cast<double>(tally.frames) : 0.0;
}

double SimPoint::ber() const
{
    const double bits = static_cast<double>(tally.frames) * bits_per_frame;
    return bits > 0 ? static_cast<double>(tally.bit_errors) / bits : 0.0;
}

double SimPoint::stderr_bler() const
{
    if (!tally.frames)
        return 0.0;
    const double p = bler();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(tally.frames));
}

NetworkConfig at_snr(const NetworkConfig& base, double snr_db, PowerSplit split)
{
    NetworkConfig cfg = base;
    double power = std::pow(10.0, snr_db / 10.0) * base.noise_var;
    if (split == PowerSplit::NetworkShared)
        power /= static_cast<double>(base.relays + 1);
    cfg.source_power = power;
    cfg.relay_power = power;
    return cfg;
}

double direct_link_power(const NetworkConfig& base, double snr_db)
{
    return std::pow(10.0, snr_db / 10.0) * base.noise_var;
}

namespace {

ErrorTally simulate_direct_chunk(const NetworkConfig& cfg, int bits, std::uint64_t count, double power, Engine& eng,
                                 ComplexGaussian& gauss)
{
    ErrorTally tally;
    const double amp = std::sqrt(power);
    for (std::uint64_t f = 0; f < count; ++f) {
        const cd c = gauss(eng, 1.0);
        const std::uint64_t word = eng() >> (64 - bits);
        int errors = 0;
        for (int b = 0; b < bits; ++b) {
            const double s = ((word >> b) & 1u) ? -1.0 : 1.0;
            const cd r = amp * c * s + gauss(eng, cfg.noise_var);
            const double metric = std::real(std::conj(c) * r);
            const bool decided_one = metric < 0.0;
            if (decided_one != (((word >> b) & 1u) != 0))
                ++errors;
        }
        ++tally.frames;
        tally.bit_errors += static_cast<std::uint64_t>(errors);
        tally.block_errors += errors ? 1 : 0;
    }
    return tally;
}

} // namespace

ErrorTally simulate_point(const NetworkConfig& cfg, Scheme scheme, const LdCodebook& code, std::uint64_t frames,
                          std::uint64_t seed, std::uint64_t stream_id, unsigned shards, double direct_power)
{
    cfg.validate();
    const int bits = code.block_length;
    if (scheme != Scheme::DirectLink && static_cast<int>(code.relays()) != cfg.relays)
        throw ConfigError("codebook size does not match relay count M = " + std::to_string(cfg.relays));
    std::optional<Allocator> allocator;
    if (scheme != Scheme::DirectLink)
        allocator.emplace(cfg, scheme, chernoff_eta(code.lambda_min, cfg.source_power, cfg.noise_var));

    const std::size_t chunks = chunk_count(frames);
    std::vector<ErrorTally> partial(chunks);
    for_each_chunk(chunks, shards, [&](std::size_t c) {
        Engine eng = make_stream(seed, {stream_id, c});
        ComplexGaussian gauss;
        const std::uint64_t begin = c * kChunkSize;
        const std::uint64_t count = std::min<std::uint64_t>(kChunkSize, frames - begin);
        if (scheme == Scheme::DirectLink) {
            partial[c] = simulate_direct_chunk(cfg, bits, count, direct_power, eng, gauss);
            return;
        }
        ErrorTally tally;
        for (std::uint64_t f = 0; f < count; ++f) {
            const auto chan = sample_channels(cfg, eng, gauss);
            const auto alloc = (*allocator)(chan);
            const std::size_t sent = static_cast<std::size_t>(eng() >> (64 - bits));
            const auto r = transmit_frame(code, chan, alloc, cfg.source_power, cfg.noise_var, sent, eng, gauss);
            const std::size_t decoded = ml_decode(code, chan, alloc, cfg.source_power, r);
            const int errors = std::popcount(static_cast<std::uint64_t>(sent ^ decoded));
            ++tally.frames;
            tally.bit_errors += static_cast<std::uint64_t>(errors);
            tally.block_errors += errors ? 1 : 0;
        }
        partial[c] = tally;
    });
    ErrorTally total;
    for (const auto& t : partial)
        total += t;
    return total;
}

SimResult run_monte_carlo(const NetworkConfig& base, Scheme scheme, const LdCodebook& code,
                          std::span<const double> snr_grid_db, const SimOptions& options)
{
    if (options.frames < 1000)
        throw ConfigError("Monte Carlo needs at least 10^3 frames per point");
    base.validate();
    if (scheme != Scheme::DirectLink)
        check_compatible(scheme, base.csit);
    const auto start = std::chrono::steady_clock::now();
    SimResult result;
    result.scheme = to_string(scheme);
    result.seed = options.seed;
    for (std::size_t j = 0; j < snr_grid_db.size(); ++j) {
        const auto cfg = at_snr(base, snr_grid_db[j], options.split);
        SimPoint point;
        point.x = snr_grid_db[j];
        point.bits_per_frame = code.block_length;
        point.tally = simulate_point(cfg, scheme, code, options.frames, options.seed, j, options.shards,
                                     direct_link_power(base, snr_grid_db[j]));
        result.points.push_back(point);
    }
    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

NetworkConfig distance_topology(const NetworkConfig& base, double r, double network_power)
{
    if (!(r > 0.0 && r < 1.0))
        throw DomainError("relay distance r must lie in (0, 1), got " + std::to_string(r));
    NetworkConfig cfg = base;
    const auto m = static_cast<std::size_t>(base.relays);
    cfg.gamma_h.assign(m, 1.0 / (r * r));
    cfg.gamma_g.assign(m, 1.0 / ((1.0 - r) * (1.0 - r)));
    cfg.source_power = network_power / static_cast<double>(base.relays + 1);
    cfg.relay_power = cfg.source_power;
    return cfg;
}

std::vector<double> effective_relay_count(const NetworkConfig& base, Scheme scheme, std::span<const double> r_grid,
                                          double network_power, std::uint64_t trials, std::uint64_t seed,
                                          unsigned shards)
{
    if (trials < 1)
        throw ConfigError("effective relay count needs at least one trial");
    std::vector<double> out;
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
        const auto cfg = distance_topology(base, r_grid[j], network_power);
        // eta does not move any allocation; unit scale keeps the objectives finite
        const Allocator allocator(cfg, scheme, 1.0);
        const std::size_t chunks = chunk_count(trials);
        std::vector<double> partial(chunks, 0.0);
        for_each_chunk(chunks, shards, [&](std::size_t c) {
            Engine eng = make_stream(seed, {j, c});
            ComplexGaussian gauss;
            const std::uint64_t begin = c * kChunkSize;
            const std::uint64_t count = std::min<std::uint64_t>(kChunkSize, trials - begin);
            double sum = 0.0;
            for (std::uint64_t t = 0; t < count; ++t)
                sum += allocator(sample_channels(cfg, eng, gauss)).power_ratio();
            partial[c] = sum;
        });
        double total = 0.0;
        for (double v : partial)
            total += v;
        out.push_back(total / static_cast<double>(trials));
    }
    return out;
}

void write_sim_csv(std::ostream& os, const SimResult& result, const std::string& x_label)
{
    const auto old = os.precision(10);
    os << "scheme," << x_label << ",frames,block_errors,bit_errors,bler,ber,stderr_bler\n";
    for (const auto& pt : result.points) {
        os << result.scheme << ',' << pt.x << ',' << pt.tally.frames << ',' << pt.tally.block_errors << ','
           << pt.tally.bit_errors << ',' << pt.bler() << ',' << pt.ber() << ',' << pt.stderr_bler() << '\n';
    }
    os.precision(old);
}

double fitted_diversity_order(const SimResult& result)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& pt : result.points) {
        if (pt.tally.block_errors == 0)
            continue;
        const double x = pt.x / 10.0;
        const double y = std::log10(pt.bler());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

} // namespace relaynet
