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

#include "relaynet/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "relaynet/errors.hpp"
#include "relaynet/objectives.hpp"
#include "relaynet/onoff.hpp"
#include "relaynet/parallel.hpp"
#include "relaynet/rng.hpp"
#include "relaynet/waterfill.hpp"

namespace relaynet {

namespace fs = std::filesystem;

namespace {

struct KindInfo {
    ExperimentKind kind;
    const char* name;
    const char* sweep_key;
    const char* file_prefix;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::Convergence, "convergence", "", "convergence"},
    {ExperimentKind::BlerVsSnr, "bler_vs_snr", "snr_db", "bler_vs_snr"},
    {ExperimentKind::BerVsDistance, "ber_vs_distance", "r", "ber_vs_distance"},
    {ExperimentKind::PowerRatioVsDistance, "power_ratio_vs_distance", "r", "power_ratio_vs_distance"},
    {ExperimentKind::BerVsNetworkPower, "ber_vs_network_power", "snr_db", "ber_vs_network_power"},
    {ExperimentKind::AsymptoticStudy, "asymptotic_study", "scale", "asymptotic"},
    {ExperimentKind::SaddleStudy, "saddle_study", "", "saddle_study"},
};

const KindInfo& info(ExperimentKind kind)
{
    for (const auto& k : kKinds)
        if (k.kind == kind)
            return k;
    throw ContractError("unknown experiment kind");
}

bool sweeps_relays(ExperimentKind kind)
{
    return kind != ExperimentKind::BlerVsSnr;
}

bool uses_schemes(ExperimentKind kind)
{
    return kind == ExperimentKind::BlerVsSnr || kind == ExperimentKind::BerVsDistance ||
           kind == ExperimentKind::PowerRatioVsDistance || kind == ExperimentKind::BerVsNetworkPower;
}

std::string where(const std::string& origin, const YAML::Node& node)
{
    const auto mark = node.Mark();
    if (mark.line < 0)
        return origin;
    return origin + ":" + std::to_string(mark.line + 1);
}

template <class T>
T read_scalar(const YAML::Node& node, const std::string& key, const std::string& origin)
{
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where(origin, node) + ": field '" + key + "' has the wrong type");
    }
}

std::vector<double> read_doubles(const YAML::Node& node, const std::string& key, const std::string& origin)
{
    if (node.IsScalar())
        return {read_scalar<double>(node, key, origin)};
    if (!node.IsSequence())
        throw ConfigError(where(origin, node) + ": field '" + key + "' must be a number or a list");
    std::vector<double> out;
    for (const auto& item : node)
        out.push_back(read_scalar<double>(item, key, origin));
    return out;
}

const std::map<std::string, int> kNetworkKeys = {{"M", 0},       {"T", 0},       {"p_s", 0},
                                                 {"p_r", 0},     {"N0", 0},      {"gamma_h", 0},
                                                 {"gamma_g", 0}, {"constraint_kind", 0}, {"csit_mode", 0}};

NetworkConfig read_network(const YAML::Node& node, const std::string& origin, bool strict_lengths)
{
    if (!node.IsMap())
        throw ConfigError(where(origin, node) + ": network block must be a key/value map");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!kNetworkKeys.count(key))
            throw ConfigError(where(origin, kv.first) + ": unknown network field '" + key + "'");
    }
    NetworkConfig cfg;
    bool csit_given = false;
    bool constraint_given = false;
    if (node["M"])
        cfg.relays = read_scalar<int>(node["M"], "M", origin);
    cfg.block_length = node["T"] ? read_scalar<int>(node["T"], "T", origin) : cfg.relays;
    if (node["p_s"])
        cfg.source_power = read_scalar<double>(node["p_s"], "p_s", origin);
    if (node["p_r"])
        cfg.relay_power = read_scalar<double>(node["p_r"], "p_r", origin);
    if (node["N0"])
        cfg.noise_var = read_scalar<double>(node["N0"], "N0", origin);
    cfg.gamma_h = node["gamma_h"] ? read_doubles(node["gamma_h"], "gamma_h", origin) : std::vector<double>{1.0};
    cfg.gamma_g = node["gamma_g"] ? read_doubles(node["gamma_g"], "gamma_g", origin) : std::vector<double>{1.0};
    try {
        if (node["csit_mode"]) {
            cfg.csit = parse_csit_mode(node["csit_mode"].as<std::string>());
            csit_given = true;
        }
        if (node["constraint_kind"]) {
            cfg.constraint = parse_constraint_kind(node["constraint_kind"].as<std::string>());
            constraint_given = true;
        }
    } catch (const ConfigError& e) {
        throw ConfigError(where(origin, node) + ": " + e.what());
    }
    if (!constraint_given)
        cfg.constraint = constraint_for(cfg.csit);
    (void)csit_given;
    if (strict_lengths) {
        const auto m = static_cast<std::size_t>(std::max(cfg.relays, 1));
        if (cfg.gamma_h.size() == 1)
            cfg.gamma_h.assign(m, cfg.gamma_h.front());
        if (cfg.gamma_g.size() == 1)
            cfg.gamma_g.assign(m, cfg.gamma_g.front());
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(where(origin, node) + ": " + e.what());
        }
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& content, std::vector<std::string>& written)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    written.push_back(path.string());
    os << content;
    if (!os)
        throw ConfigError("failed writing " + path.string());
}

std::string fmt_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

// Convergence of the on-off iteration, normalized by the enumeration optimum.
std::string run_convergence(const ExperimentSpec& spec)
{
    std::ostringstream csv;
    csv << "M,iteration,mean_normalized_objective,fraction_stationary\n";
    for (int m : spec.relay_counts) {
        const auto cfg = config_for_relays(spec.base, m).with_csit(CsitMode::Perfect);
        struct Run {
            std::vector<double> normalized;
            int iterations = 0;
        };
        std::vector<Run> runs(spec.trials);
        const std::size_t chunks = chunk_count(spec.trials);
        for_each_chunk(chunks, spec.shards, [&](std::size_t c) {
            Engine eng = make_stream(spec.seed, {static_cast<std::uint64_t>(m), c});
            ComplexGaussian gauss;
            const std::size_t begin = c * kChunkSize;
            const std::size_t end = std::min<std::size_t>(spec.trials, begin + kChunkSize);
            for (std::size_t t = begin; t < end; ++t) {
                const auto chan = sample_channels(cfg, eng, gauss);
                const auto caps = amplifier_caps(cfg, std::span<const cd>(chan.h));
                const auto obj = PerfectCsitObjective::from_channels(chan, 1.0);
                const auto res = solve_onoff(obj, caps);
                const double best = f0_value(obj, vertex_enumeration_oracle(obj, caps).p());
                Run run;
                for (double v : res.trace.objective_values)
                    run.normalized.push_back(best > 0.0 ? v / best : 1.0);
                run.iterations = res.trace.iterations;
                runs[t] = std::move(run);
            }
        });
        std::size_t longest = 0;
        for (const auto& r : runs)
            longest = std::max(longest, r.normalized.size());
        for (std::size_t n = 0; n < longest; ++n) {
            double sum = 0.0;
            std::size_t stationary = 0;
            for (const auto& r : runs) {
                sum += r.normalized[std::min(n, r.normalized.size() - 1)];
                if (static_cast<int>(n) >= r.iterations)
                    ++stationary;
            }
            const double count = static_cast<double>(runs.size());
            csv << m << ',' << n << ',' << fmt_double(sum / count) << ',' << fmt_double(stationary / count) << '\n';
        }
    }
    return csv.str();
}

std::string run_saddle(const ExperimentSpec& spec)
{
    std::ostringstream csv;
    csv << "M,instances,g_draws,eta,mean_relative_error,stderr\n";
    for (int m : spec.relay_counts) {
        const auto cfg = config_for_relays(spec.base, m).with_csit(CsitMode::Partial);
        const double eta = spec.eta > 0.0 ? spec.eta : chernoff_eta(4.0, cfg.source_power, cfg.noise_var);
        std::vector<double> errors(spec.trials);
        for (std::size_t k = 0; k < spec.trials; ++k) {
            const auto chan = sample_channels(cfg, spec.seed ^ (0x5ad0ULL + 1000003ULL * static_cast<std::uint64_t>(m) + k));
            const auto caps = amplifier_caps(cfg, std::span<const cd>(chan.h));
            const auto est = saddle_point_error(chan.h, cfg.gamma_g, caps, eta, spec.g_draws,
                                                spec.seed + 7919ULL * (k + 1) + static_cast<std::uint64_t>(m),
                                                spec.shards);
            errors[k] = est.relative_error;
        }
        double mean = 0.0;
        for (double e : errors)
            mean += e;
        mean /= static_cast<double>(errors.size());
        double var = 0.0;
        for (double e : errors)
            var += (e - mean) * (e - mean);
        const double n = static_cast<double>(errors.size());
        const double se = n > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
        csv << m << ',' << spec.trials << ',' << spec.g_draws << ',' << fmt_double(eta) << ',' << fmt_double(mean)
            << ',' << fmt_double(se) << '\n';
    }
    return csv.str();
}

// Channel-scaling limits: regime "h" multiplies |h_i|^2 by the scale, regime
// "g" multiplies |g_i|^2 and gamma_g.
std::string run_asymptotic(const ExperimentSpec& spec)
{
    std::ostringstream csv;
    csv << "regime,scale,M,trials,onoff_mean_active,onoff_fraction_all_on,onoff_fraction_single,"
           "waterfill_mean_at_cap\n";
    for (const char* regime : {"h", "g"}) {
        const bool scale_h = regime[0] == 'h';
        for (std::size_t j = 0; j < spec.sweep.size(); ++j) {
            const double c = spec.sweep[j];
            for (int m : spec.relay_counts) {
                auto cfg = config_for_relays(spec.base, m).with_csit(CsitMode::Perfect);
                if (scale_h)
                    for (auto& v : cfg.gamma_h)
                        v *= c;
                else
                    for (auto& v : cfg.gamma_g)
                        v *= c;
                struct Acc {
                    double active = 0, all_on = 0, single = 0, at_cap = 0;
                };
                const std::size_t chunks = chunk_count(spec.trials);
                std::vector<Acc> partial(chunks);
                for_each_chunk(chunks, spec.shards, [&](std::size_t ch) {
                    Engine eng = make_stream(spec.seed, {scale_h ? 1u : 2u, j, static_cast<std::uint64_t>(m), ch});
                    ComplexGaussian gauss;
                    const std::size_t begin = ch * kChunkSize;
                    const std::size_t end = std::min<std::size_t>(spec.trials, begin + kChunkSize);
                    Acc acc;
                    for (std::size_t t = begin; t < end; ++t) {
                        const auto chan = sample_channels(cfg, eng, gauss);
                        const auto caps = amplifier_caps(cfg, std::span<const cd>(chan.h));
                        const auto on = solve_onoff(PerfectCsitObjective::from_channels(chan, 1.0), caps).allocation;
                        const auto mask = vertex_mask(on);
                        const auto active = static_cast<double>(std::count(mask.begin(), mask.end(), true));
                        acc.active += active;
                        acc.all_on += active == m ? 1.0 : 0.0;
                        acc.single += active == 1.0 ? 1.0 : 0.0;
                        const auto wf = solve_waterfill(PartialCsitObjective::make(chan.h, cfg.gamma_g, 1.0), caps);
                        for (std::size_t i = 0; i < caps.size(); ++i)
                            acc.at_cap += wf.allocation[i] == caps[i] ? 1.0 : 0.0;
                    }
                    partial[ch] = acc;
                });
                Acc total;
                for (const auto& a : partial) {
                    total.active += a.active;
                    total.all_on += a.all_on;
                    total.single += a.single;
                    total.at_cap += a.at_cap;
                }
                const double n = static_cast<double>(spec.trials);
                csv << regime << ',' << fmt_double(c) << ',' << m << ',' << spec.trials << ','
                    << fmt_double(total.active / n) << ',' << fmt_double(total.all_on / n) << ','
                    << fmt_double(total.single / n) << ',' << fmt_double(total.at_cap / n) << '\n';
            }
        }
    }
    return csv.str();
}

void append_sim_rows(std::ostringstream& csv, const std::string& label, int m, const SimResult& res)
{
    for (const auto& pt : res.points) {
        csv << label << ',' << m << ',' << fmt_double(pt.x) << ',' << pt.tally.frames << ',' << pt.tally.block_errors
            << ',' << pt.tally.bit_errors << ',' << fmt_double(pt.bler()) << ',' << fmt_double(pt.ber()) << ','
            << fmt_double(pt.stderr_bler()) << '\n';
    }
}

std::string run_scheme(const ExperimentSpec& spec, const SchemeSpec& scheme)
{
    const std::string label = scheme.label();
    std::ostringstream csv;
    switch (spec.kind) {
    case ExperimentKind::BlerVsSnr: {
        const auto base = spec.base.with_csit(scheme.csit);
        const auto code = generate_codebook(base.block_length, spec.seed);
        SimOptions opts{spec.frames, spec.seed, spec.shards, PowerSplit::PerNode};
        auto res = run_monte_carlo(base, scheme.scheme, code, spec.sweep, opts);
        res.scheme = label;
        write_sim_csv(csv, res, "snr_db");
        break;
    }
    case ExperimentKind::BerVsNetworkPower: {
        csv << "scheme,M,snr_db,frames,block_errors,bit_errors,bler,ber,stderr_bler\n";
        for (int m : spec.relay_counts) {
            const auto base = config_for_relays(spec.base, m).with_csit(scheme.csit);
            const auto code = generate_codebook(m, spec.seed);
            SimOptions opts{spec.frames, spec.seed + static_cast<std::uint64_t>(m), spec.shards,
                            PowerSplit::NetworkShared};
            append_sim_rows(csv, label, scheme.scheme == Scheme::DirectLink ? 0 : m,
                            run_monte_carlo(base, scheme.scheme, code, spec.sweep, opts));
            if (scheme.scheme == Scheme::DirectLink)
                break;
        }
        break;
    }
    case ExperimentKind::BerVsDistance: {
        csv << "scheme,M,r,frames,block_errors,bit_errors,bler,ber,stderr_bler\n";
        const double network_power = std::pow(10.0, spec.network_snr_db / 10.0) * spec.base.noise_var;
        for (int m : spec.relay_counts) {
            const auto base = config_for_relays(spec.base, m).with_csit(scheme.csit);
            const auto code = generate_codebook(m, spec.seed);
            SimResult res;
            for (std::size_t j = 0; j < spec.sweep.size(); ++j) {
                const auto cfg = distance_topology(base, spec.sweep[j], network_power);
                SimPoint pt;
                pt.x = spec.sweep[j];
                pt.bits_per_frame = code.block_length;
                pt.tally = simulate_point(cfg, scheme.scheme, code, spec.frames,
                                          spec.seed + static_cast<std::uint64_t>(m), j, spec.shards, network_power);
                res.points.push_back(pt);
            }
            append_sim_rows(csv, label, scheme.scheme == Scheme::DirectLink ? 0 : m, res);
            if (scheme.scheme == Scheme::DirectLink)
                break;
        }
        break;
    }
    case ExperimentKind::PowerRatioVsDistance: {
        csv << "scheme,M,r,trials,effective_relays\n";
        const double network_power = std::pow(10.0, spec.network_snr_db / 10.0) * spec.base.noise_var;
        for (int m : spec.relay_counts) {
            const auto base = config_for_relays(spec.base, m).with_csit(scheme.csit);
            const auto erc = effective_relay_count(base, scheme.scheme, spec.sweep, network_power, spec.trials,
                                                   spec.seed + static_cast<std::uint64_t>(m), spec.shards);
            for (std::size_t j = 0; j < spec.sweep.size(); ++j)
                csv << label << ',' << m << ',' << fmt_double(spec.sweep[j]) << ',' << spec.trials << ','
                    << fmt_double(erc[j]) << '\n';
        }
        break;
    }
    default:
        throw ContractError("experiment kind has no per-scheme output");
    }
    return csv.str();
}

} // namespace

std::string to_string(ExperimentKind kind)
{
    return info(kind).name;
}

ExperimentKind parse_experiment_kind(const std::string& text)
{
    for (const auto& k : kKinds)
        if (text == k.name)
            return k.kind;
    std::string names;
    for (const auto& k : kKinds)
        names += std::string(names.empty() ? "" : ", ") + k.name;
    throw ConfigError("unknown experiment kind '" + text + "' (expected one of " + names + ")");
}

std::string SchemeSpec::label() const
{
    switch (scheme) {
    case Scheme::OnOff:
        return "onoff";
    case Scheme::Waterfill:
        return csit == CsitMode::Statistical ? "waterfill-statistical" : "waterfill-partial";
    case Scheme::MaxPower:
        return csit == CsitMode::Statistical ? "maxpower-statistical" : "maxpower";
    case Scheme::DirectLink:
        return "direct";
    }
    return "?";
}

SchemeSpec SchemeSpec::parse(const std::string& label)
{
    static const std::map<std::string, SchemeSpec> table = {
        {"onoff", {Scheme::OnOff, CsitMode::Perfect}},
        {"waterfill-partial", {Scheme::Waterfill, CsitMode::Partial}},
        {"waterfill-statistical", {Scheme::Waterfill, CsitMode::Statistical}},
        {"maxpower", {Scheme::MaxPower, CsitMode::Perfect}},
        {"maxpower-statistical", {Scheme::MaxPower, CsitMode::Statistical}},
        {"direct", {Scheme::DirectLink, CsitMode::Perfect}},
    };
    const auto it = table.find(label);
    if (it == table.end())
        throw ConfigError("unknown scheme '" + label +
                          "' (expected onoff, waterfill-partial, waterfill-statistical, maxpower, "
                          "maxpower-statistical or direct)");
    return it->second;
}

std::string ExperimentSpec::sweep_key() const
{
    return info(kind).sweep_key;
}

NetworkConfig config_for_relays(const NetworkConfig& base, int relays)
{
    if (relays < 1)
        throw ConfigError("relay count must be >= 1");
    NetworkConfig cfg = base;
    cfg.relays = relays;
    cfg.block_length = relays;
    const auto m = static_cast<std::size_t>(relays);
    auto resize = [&](std::vector<double>& v, const char* name) {
        if (v.size() == 1)
            v.assign(m, v.front());
        else if (v.size() >= m)
            v.resize(m);
        else
            throw ConfigError(std::string(name) + " lists " + std::to_string(v.size()) + " variances, M = " +
                              std::to_string(relays) + " needs at least that many");
    };
    resize(cfg.gamma_h, "gamma_h");
    resize(cfg.gamma_g, "gamma_g");
    return cfg;
}

void ExperimentSpec::validate() const
{
    const std::string key = sweep_key();
    if (!key.empty()) {
        if (sweep.empty())
            throw ConfigError("sweep '" + key + "' must not be empty");
        if (!std::is_sorted(sweep.begin(), sweep.end()))
            throw ConfigError("sweep '" + key + "' must be sorted ascending");
    }
    if (sweeps_relays(kind)) {
        if (relay_counts.empty())
            throw ConfigError("'relays' must list at least one relay count");
        if (!std::is_sorted(relay_counts.begin(), relay_counts.end()))
            throw ConfigError("'relays' must be sorted ascending");
        // Codebook enumeration and the vertex oracle bound M; the others do not.
        int limit = 64;
        if (kind == ExperimentKind::BerVsDistance || kind == ExperimentKind::BerVsNetworkPower)
            limit = kMaxExhaustiveBlockLength;
        else if (kind == ExperimentKind::Convergence)
            limit = 20;
        for (int m : relay_counts) {
            if (m < 1 || m > limit)
                throw ConfigError("relay count " + std::to_string(m) + " outside [1, " + std::to_string(limit) + "]");
            config_for_relays(base, m).with_csit(CsitMode::Perfect).validate();
        }
    } else {
        base.validate();
        if (base.block_length != base.relays)
            throw ConfigError("the LD code needs T = M");
    }
    if (uses_schemes(kind)) {
        if (schemes.empty())
            throw ConfigError("'schemes' must list at least one scheme");
        for (const auto& s : schemes) {
            if (s.scheme != Scheme::DirectLink)
                check_compatible(s.scheme, s.csit);
            if (kind == ExperimentKind::PowerRatioVsDistance && s.scheme == Scheme::DirectLink)
                throw ConfigError("the direct link has no relay power ratio");
        }
    }
    if (kind == ExperimentKind::BerVsDistance || kind == ExperimentKind::PowerRatioVsDistance)
        for (double r : sweep)
            if (!(r > 0.0 && r < 1.0))
                throw ConfigError("distance sweep values must lie in (0, 1)");
    if (kind == ExperimentKind::AsymptoticStudy)
        for (double c : sweep)
            if (!(c > 0.0))
                throw ConfigError("scale factors must be positive");
    const bool simulates = kind == ExperimentKind::BlerVsSnr || kind == ExperimentKind::BerVsDistance ||
                           kind == ExperimentKind::BerVsNetworkPower;
    if (simulates && frames < 1000)
        throw ConfigError("'frames' must be at least 1000");
    if (trials < 1)
        throw ConfigError("'trials' must be at least 1");
    if (kind == ExperimentKind::SaddleStudy && g_draws < 10000)
        throw ConfigError("'g_draws' must be at least 10000");
    if (shards < 1)
        throw ConfigError("'shards' must be at least 1");
}

NetworkConfig parse_network_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("<scenario>:" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    return read_network(root, "<scenario>", true);
}

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root.IsMap())
        throw ConfigError(origin + ": experiment spec must be a key/value map");
    static const std::map<std::string, int> known = {
        {"kind", 0},   {"network", 0}, {"relays", 0},  {"sweep", 0},         {"schemes", 0},
        {"frames", 0}, {"trials", 0},  {"g_draws", 0}, {"network_snr_db", 0}, {"eta", 0},
        {"seed", 0},   {"shards", 0},  {"out_dir", 0}};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key))
            throw ConfigError(where(origin, kv.first) + ": unknown field '" + key + "'");
    }
    if (!root["kind"])
        throw ConfigError(origin + ": missing field 'kind'");

    ExperimentSpec spec;
    try {
        spec.kind = parse_experiment_kind(root["kind"].as<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError(where(origin, root["kind"]) + ": " + e.what());
    }
    const bool per_relay = sweeps_relays(spec.kind);
    if (root["network"])
        spec.base = read_network(root["network"], origin, !per_relay);
    if (root["relays"]) {
        for (double v : read_doubles(root["relays"], "relays", origin))
            spec.relay_counts.push_back(static_cast<int>(v));
    }
    if (root["sweep"]) {
        const auto& sw = root["sweep"];
        if (!sw.IsMap() || sw.size() != 1)
            throw ConfigError(where(origin, sw) + ": sweep must hold exactly one key");
        const auto key = sw.begin()->first.as<std::string>();
        if (key != spec.sweep_key())
            throw ConfigError(where(origin, sw) + ": sweep key '" + key + "' does not fit kind " +
                              to_string(spec.kind) + " (expected '" + spec.sweep_key() + "')");
        spec.sweep = read_doubles(sw.begin()->second, key, origin);
    }
    if (root["schemes"]) {
        const auto& node = root["schemes"];
        if (!node.IsSequence())
            throw ConfigError(where(origin, node) + ": schemes must be a list");
        for (const auto& item : node) {
            try {
                spec.schemes.push_back(SchemeSpec::parse(item.as<std::string>()));
            } catch (const ConfigError& e) {
                throw ConfigError(where(origin, item) + ": " + e.what());
            }
        }
    }
    if (root["frames"])
        spec.frames = read_scalar<std::uint64_t>(root["frames"], "frames", origin);
    if (root["trials"])
        spec.trials = read_scalar<std::uint64_t>(root["trials"], "trials", origin);
    if (root["g_draws"])
        spec.g_draws = read_scalar<std::uint64_t>(root["g_draws"], "g_draws", origin);
    if (root["network_snr_db"])
        spec.network_snr_db = read_scalar<double>(root["network_snr_db"], "network_snr_db", origin);
    if (root["eta"])
        spec.eta = read_scalar<double>(root["eta"], "eta", origin);
    if (root["seed"])
        spec.seed = read_scalar<std::uint64_t>(root["seed"], "seed", origin);
    if (root["shards"])
        spec.shards = read_scalar<unsigned>(root["shards"], "shards", origin);
    if (root["out_dir"])
        spec.out_dir = read_scalar<std::string>(root["out_dir"], "out_dir", origin);
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        // Anchor at the first field the message names, else at the kind line.
        const std::string msg = e.what();
        YAML::Node anchor = root["kind"];
        const std::pair<const char*, const char*> fields[] = {
            {"sweep", "sweep"},   {"relay count", "relays"}, {"relays", "relays"}, {"scheme", "schemes"},
            {"frames", "frames"}, {"trials", "trials"},      {"g_draws", "g_draws"}, {"shards", "shards"},
            {"distance", "sweep"}, {"scale", "sweep"}};
        for (const auto& [needle, key] : fields) {
            if (root[key] && msg.find(needle) != std::string::npos) {
                anchor = root[key];
                break;
            }
        }
        if (msg.find("network config") != std::string::npos && root["network"]) {
            anchor = root["network"];
            const auto detail = msg.substr(msg.find("network config"));
            std::size_t first = std::string::npos;
            for (const auto& kv : root["network"]) {
                const auto pos = detail.find(kv.first.as<std::string>());
                if (pos < first) {
                    first = pos;
                    anchor = kv.first;
                }
            }
        }
        throw ConfigError(where(origin, anchor) + ": " + msg);
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError(path + ": cannot open spec file");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_experiment_spec(buf.str(), path);
}

std::string dump_experiment_spec(const ExperimentSpec& spec)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(spec.kind);
    out << YAML::Key << "seed" << YAML::Value << spec.seed;
    out << YAML::Key << "shards" << YAML::Value << spec.shards;
    out << YAML::Key << "frames" << YAML::Value << spec.frames;
    out << YAML::Key << "trials" << YAML::Value << spec.trials;
    out << YAML::Key << "g_draws" << YAML::Value << spec.g_draws;
    out << YAML::Key << "network_snr_db" << YAML::Value << spec.network_snr_db;
    out << YAML::Key << "eta" << YAML::Value << spec.eta;
    out << YAML::Key << "out_dir" << YAML::Value << spec.out_dir;
    out << YAML::Key << "relays" << YAML::Value << YAML::Flow << spec.relay_counts;
    if (!spec.sweep_key().empty()) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << spec.sweep_key() << YAML::Value << YAML::Flow << spec.sweep;
        out << YAML::EndMap;
    }
    std::vector<std::string> labels;
    for (const auto& s : spec.schemes)
        labels.push_back(s.label());
    out << YAML::Key << "schemes" << YAML::Value << YAML::Flow << labels;
    const auto& n = spec.base;
    out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "M" << YAML::Value << n.relays;
    out << YAML::Key << "T" << YAML::Value << n.block_length;
    out << YAML::Key << "p_s" << YAML::Value << n.source_power;
    out << YAML::Key << "p_r" << YAML::Value << n.relay_power;
    out << YAML::Key << "N0" << YAML::Value << n.noise_var;
    out << YAML::Key << "gamma_h" << YAML::Value << YAML::Flow << n.gamma_h;
    out << YAML::Key << "gamma_g" << YAML::Value << YAML::Flow << n.gamma_g;
    out << YAML::Key << "constraint_kind" << YAML::Value << to_string(n.constraint);
    out << YAML::Key << "csit_mode" << YAML::Value << to_string(n.csit);
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string ExperimentOutput::summary(const ExperimentSpec& spec) const
{
    std::ostringstream os;
    os << "kind=" << to_string(spec.kind) << " seed=" << spec.seed << " frames=" << frames << " elapsed_s="
       << std::fixed << std::setprecision(3) << elapsed_s;
    return os.str();
}

ExperimentOutput run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentOutput out;
    const fs::path dir(spec.out_dir);
    std::vector<std::string> written;
    try {
        fs::create_directories(dir);
        const std::string prefix = info(spec.kind).file_prefix;
        std::vector<std::string> csvs;
        auto emit = [&](const std::string& name, const std::string& content) {
            const auto path = dir / name;
            write_file(path, content, written);
            csvs.push_back(path.string());
        };
        switch (spec.kind) {
        case ExperimentKind::Convergence:
            emit(prefix + ".csv", run_convergence(spec));
            out.frames = spec.trials;
            break;
        case ExperimentKind::SaddleStudy:
            emit(prefix + ".csv", run_saddle(spec));
            out.frames = spec.g_draws;
            break;
        case ExperimentKind::AsymptoticStudy:
            emit(prefix + ".csv", run_asymptotic(spec));
            out.frames = spec.trials;
            break;
        default:
            for (const auto& scheme : spec.schemes)
                emit(prefix + "_" + scheme.label() + ".csv", run_scheme(spec, scheme));
            out.frames = spec.kind == ExperimentKind::PowerRatioVsDistance ? spec.trials : spec.frames;
            break;
        }
        write_file(dir / ("plot_" + prefix + ".py"), emit_plot_script(csvs, spec.kind), written);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : written)
            fs::remove(f, ec);
        throw;
    }
    out.files = std::move(written);
    out.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string emit_plot_script(const std::vector<std::string>& csv_paths, ExperimentKind kind)
{
    for (const auto& p : csv_paths)
        if (!fs::exists(p))
            throw ConfigError("plot script: missing CSV " + p);

    struct Layout {
        const char* x;
        const char* y;
        const char* group;
        const char* xlabel;
        const char* ylabel;
        bool logx;
        bool logy;
    };
    Layout layout{};
    switch (kind) {
    case ExperimentKind::Convergence:
        layout = {"iteration", "mean_normalized_objective", "M", "iteration", "normalized objective", false, false};
        break;
    case ExperimentKind::BlerVsSnr:
        layout = {"snr_db", "bler", "scheme", "p_r/N0 [dB]", "block error rate", false, true};
        break;
    case ExperimentKind::BerVsDistance:
        layout = {"r", "ber", "scheme,M", "transmitter-relay distance r", "bit error rate", false, true};
        break;
    case ExperimentKind::PowerRatioVsDistance:
        layout = {"r", "effective_relays", "scheme,M", "transmitter-relay distance r", "sum_i E[p_i/P_i]", false,
                  false};
        break;
    case ExperimentKind::BerVsNetworkPower:
        layout = {"snr_db", "ber", "scheme,M", "P/N0 [dB]", "bit error rate", false, true};
        break;
    case ExperimentKind::AsymptoticStudy:
        layout = {"scale", "onoff_mean_active", "regime,M", "channel scale", "active relays (on-off)", true, false};
        break;
    case ExperimentKind::SaddleStudy:
        layout = {"M", "mean_relative_error", "g_draws", "relays M", "relative error", true, true};
        break;
    }

    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "# Generated by relaynet for experiment kind " << to_string(kind) << ".\n"
       << "import csv\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "CSV_FILES = [\n";
    for (const auto& p : csv_paths)
        py << "    " << std::quoted(p) << ",\n";
    py << "]\n"
       << "X, Y = '" << layout.x << "', '" << layout.y << "'\n"
       << "GROUP = '" << layout.group << "'.split(',')\n\n"
       << "series = {}\n"
       << "for path in CSV_FILES:\n"
       << "    with open(path, newline='') as fh:\n"
       << "        for row in csv.DictReader(fh):\n"
       << "            key = ' '.join(f'{g}={row[g]}' for g in GROUP)\n"
       << "            series.setdefault(key, ([], []))\n"
       << "            series[key][0].append(float(row[X]))\n"
       << "            series[key][1].append(float(row[Y]))\n\n"
       << "fig, ax = plt.subplots()\n"
       << "for key, (xs, ys) in sorted(series.items()):\n"
       << "    ax.plot(xs, ys, marker='o', label=key)\n";
    if (layout.logx)
        py << "ax.set_xscale('log')\n";
    if (layout.logy)
        py << "ax.set_yscale('log')\n";
    if (kind == ExperimentKind::PowerRatioVsDistance)
        py << "ax.set_ylim(0, max(max(ys) for _, ys in series.values()) * 1.05)\n";
    py << "ax.set_xlabel('" << layout.xlabel << "')\n"
       << "ax.set_ylabel('" << layout.ylabel << "')\n"
       << "ax.grid(True, which='both', alpha=0.3)\n"
       << "ax.legend()\n"
       << "fig.savefig('" << to_string(kind) << ".png', dpi=150)\n";
    return py.str();
}

} // namespace relaynet
