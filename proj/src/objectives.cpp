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

#include "relaynet/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relaynet/errors.hpp"
#include "relaynet/parallel.hpp"
#include "relaynet/special_functions.hpp"

namespace relaynet {

namespace {

void require_size(std::size_t expected, std::size_t got, const char* what)
{
    if (expected != got)
        throw ContractError(std::string(what) + ": expected " + std::to_string(expected) + " entries, got " +
                            std::to_string(got));
}

double weighted_noise(std::span<const double> gamma_g, std::span<const double> p)
{
    return 1.0 + std::inner_product(gamma_g.begin(), gamma_g.end(), p.begin(), 0.0);
}

} // namespace

double chernoff_eta(double lambda_min, double source_power, double noise_var)
{
    return lambda_min * source_power / (4.0 * noise_var);
}

PerfectCsitObjective PerfectCsitObjective::from_channels(const ChannelRealization& chan, double eta)
{
    PerfectCsitObjective obj;
    obj.eta = eta;
    obj.signal_gain.resize(chan.size());
    obj.noise_gain.resize(chan.size());
    for (std::size_t i = 0; i < chan.size(); ++i) {
        obj.noise_gain[i] = std::norm(chan.g[i]);
        obj.signal_gain[i] = std::norm(chan.h[i]) * obj.noise_gain[i];
    }
    return obj;
}

PartialCsitObjective PartialCsitObjective::make(std::span<const cd> h, std::span<const double> gamma_g, double eta)
{
    require_size(h.size(), gamma_g.size(), "partial CSIT objective");
    PartialCsitObjective obj;
    obj.gamma_g.assign(gamma_g.begin(), gamma_g.end());
    obj.a.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        obj.a[i] = eta * gamma_g[i] * std::norm(h[i]);
    return obj;
}

StatisticalCsitObjective StatisticalCsitObjective::make(std::span<const double> gamma_h,
                                                        std::span<const double> gamma_g, double eta)
{
    require_size(gamma_h.size(), gamma_g.size(), "statistical CSIT objective");
    StatisticalCsitObjective obj;
    obj.gamma_g.assign(gamma_g.begin(), gamma_g.end());
    obj.a.resize(gamma_h.size());
    for (std::size_t i = 0; i < gamma_h.size(); ++i)
        obj.a[i] = eta * gamma_g[i] * gamma_h[i];
    return obj;
}

double f0_value(const PerfectCsitObjective& obj, std::span<const double> p)
{
    require_size(obj.size(), p.size(), "f0");
    double num = 0.0;
    double den = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        num += obj.signal_gain[i] * p[i];
        den += obj.noise_gain[i] * p[i];
    }
    return num / den;
}

std::vector<double> f0_gradient(const PerfectCsitObjective& obj, std::span<const double> p)
{
    require_size(obj.size(), p.size(), "f0 gradient");
    double a_sum = 0.0;
    double b_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        a_sum += obj.signal_gain[i] * p[i];
        b_sum += obj.noise_gain[i] * p[i];
    }
    const double den = (1.0 + b_sum) * (1.0 + b_sum);
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        // sums over j != i
        const double a_rest = a_sum - obj.signal_gain[i] * p[i];
        const double b_rest = b_sum - obj.noise_gain[i] * p[i];
        grad[i] = (obj.signal_gain[i] + obj.signal_gain[i] * b_rest - obj.noise_gain[i] * a_rest) / den;
    }
    return grad;
}

double pep_bound_perfect(const PerfectCsitObjective& obj, std::span<const double> p)
{
    return std::exp(-obj.eta * f0_value(obj, p));
}

double pep_bound_perfect(const ChannelRealization& chan, const PowerAllocation& alloc, double lambda_min,
                         double source_power, double noise_var)
{
    require_size(chan.size(), alloc.size(), "perfect CSIT bound");
    double qf = 0.0;  // ||Q H g||^2
    for (std::size_t i = 0; i < chan.size(); ++i)
        qf += alloc[i] * std::norm(chan.f[i]);
    const double sigma2 = overall_noise_variance(alloc, chan.g, noise_var);
    return std::exp(-source_power * lambda_min * qf / (4.0 * sigma2));
}

std::vector<double> snr_contributions(const LogObjective& obj, std::span<const double> p)
{
    require_size(obj.size(), p.size(), "snr contributions");
    const double den = weighted_noise(obj.gamma_g, p);
    std::vector<double> rho(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        rho[i] = obj.a[i] * p[i] / den;
    return rho;
}

double pep_bound_partial(const LogObjective& obj, std::span<const double> p)
{
    double prod = 1.0;
    for (double r : snr_contributions(obj, p))
        prod /= 1.0 + r;
    return prod;
}

double pep_bound_statistical_exact(const LogObjective& obj, std::span<const double> p)
{
    double prod = 1.0;
    for (double r : snr_contributions(obj, p)) {
        if (!(r > 0.0))
            throw DomainError("statistical CSIT bound needs rho_j > 0 for every relay");
        const double x = 1.0 / r;
        prod *= x * exp_scaled_e1(x);
    }
    return prod;
}

AsymptoticBound pep_bound_statistical_asymptotic(const LogObjective& obj, std::span<const double> p)
{
    AsymptoticBound out{1.0, true};
    for (double r : snr_contributions(obj, p)) {
        if (!(r > 1.0))
            out.valid = false;
        out.value *= std::log(r) / r;
    }
    return out;
}

double f1_value(const LogObjective& obj, std::span<const double> p)
{
    double sum = 0.0;
    for (double r : snr_contributions(obj, p))
        sum += std::log1p(r);
    return sum;
}

double log_objective_J(const LogObjective& obj, std::span<const double> p)
{
    require_size(obj.size(), p.size(), "log objective");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0))
            throw DomainError("log objective needs p_" + std::to_string(i + 1) + " > 0");
        sum += std::log(obj.a[i] * p[i]);
    }
    return sum - static_cast<double>(p.size()) * std::log(weighted_noise(obj.gamma_g, p));
}

WaterLevelRange water_level_range(std::span<const double> gamma_g, std::span<const double> caps)
{
    require_size(gamma_g.size(), caps.size(), "water level range");
    const auto m = static_cast<double>(gamma_g.size());
    return {1.0 / m, weighted_noise(gamma_g, caps) / m};
}

std::vector<double> allocation_at_level(std::span<const double> gamma_g, std::span<const double> caps, double mu)
{
    require_size(gamma_g.size(), caps.size(), "water level allocation");
    std::vector<double> p(caps.size());
    for (std::size_t i = 0; i < caps.size(); ++i)
        p[i] = caps[i] * gamma_g[i] <= mu ? caps[i] : mu / gamma_g[i];
    return p;
}

LevelEvaluation evaluate_water_level(const LogObjective& obj, double mu, std::span<const double> caps)
{
    const auto range = water_level_range(obj.gamma_g, caps);
    LevelEvaluation out;
    out.mu = std::clamp(mu, range.min, range.max);
    out.clamped = out.mu != mu;
    out.J = log_objective_J(obj, allocation_at_level(obj.gamma_g, caps, out.mu));
    return out;
}

double J_of_mu(const LogObjective& obj, double mu, std::span<const double> caps)
{
    return evaluate_water_level(obj, mu, caps).J;
}

SaddlePointEstimate saddle_point_error(std::span<const cd> h, std::span<const double> gamma_g,
                                       std::span<const double> p, double eta, std::size_t trials,
                                       std::uint64_t seed, unsigned shards)
{
    const std::size_t m = h.size();
    require_size(m, gamma_g.size(), "saddle point study");
    require_size(m, p.size(), "saddle point study");
    if (trials < 10000)
        throw ContractError("saddle point study needs at least 10^4 trials");

    std::vector<double> h_gain(m);
    for (std::size_t i = 0; i < m; ++i)
        h_gain[i] = std::norm(h[i]);

    struct Moments {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    const std::size_t chunks = chunk_count(trials);
    std::vector<Moments> partial(chunks);
    for_each_chunk(chunks, shards, [&](std::size_t c) {
        Engine eng = make_stream(seed, {c});
        ComplexGaussian gauss;
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(trials, begin + kChunkSize);
        Moments acc;
        for (std::size_t t = begin; t < end; ++t) {
            double a = 0.0;
            double b = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double g2 = std::norm(gauss(eng, gamma_g[i]));
                a += p[i] * h_gain[i] * g2;
                b += p[i] * g2;
            }
            const double x = std::exp(-eta * a / b);
            acc.sum += x;
            acc.sum_sq += x * x;
        }
        partial[c] = acc;
    });
    Moments total;
    for (const auto& mo : partial) {
        total.sum += mo.sum;
        total.sum_sq += mo.sum_sq;
    }
    const double n = static_cast<double>(trials);
    SaddlePointEstimate out;
    out.mc_estimate = total.sum / n;
    const double var = std::max(0.0, total.sum_sq / n - out.mc_estimate * out.mc_estimate) * n / (n - 1.0);
    out.mc_stderr = std::sqrt(var / n);

    PartialCsitObjective obj = PartialCsitObjective::make(h, gamma_g, eta);
    out.bound = pep_bound_partial(obj, p);
    out.relative_error = std::fabs(out.mc_estimate - out.bound) / out.mc_estimate;
    out.relative_stderr = out.bound * out.mc_stderr / (out.mc_estimate * out.mc_estimate);
    return out;
}

} // namespace relaynet
