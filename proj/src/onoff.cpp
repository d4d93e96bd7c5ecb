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

#include "relaynet/onoff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "relaynet/errors.hpp"

namespace relaynet {

namespace {

constexpr int kMaxIterations = 100;
constexpr std::size_t kMaxEnumerationRelays = 20;

std::vector<double> vertex_powers(const VertexMask& mask, std::span<const double> caps)
{
    std::vector<double> p(caps.size());
    for (std::size_t i = 0; i < caps.size(); ++i)
        p[i] = mask[i] ? caps[i] : 0.0;
    return p;
}

// Lexicographic order on the sorted list of active relay indices.
bool on_set_less(std::uint32_t lhs, std::uint32_t rhs, std::size_t m)
{
    std::size_t i = 0, j = 0;
    for (;;) {
        while (i < m && !((lhs >> i) & 1u))
            ++i;
        while (j < m && !((rhs >> j) & 1u))
            ++j;
        if (i == m || j == m)
            return i == m && j != m;
        if (i != j)
            return i < j;
        ++i;
        ++j;
    }
}

} // namespace

M2Discriminant M2Discriminant::compute(const PerfectCsitObjective& obj, std::span<const double> caps)
{
    if (obj.size() != 2 || caps.size() != 2)
        throw ContractError("two-relay discriminant needs M = 2");
    M2Discriminant d;
    d.cross = obj.signal_gain[0] * obj.noise_gain[1] - obj.noise_gain[0] * obj.signal_gain[1];
    d.gain1_given_relay2 = obj.signal_gain[0] + d.cross * caps[1];
    d.gain2_given_relay1 = obj.signal_gain[1] - d.cross * caps[0];
    return d;
}

VertexMask vertex_mask(const PowerAllocation& alloc)
{
    VertexMask mask(alloc.size());
    for (std::size_t i = 0; i < alloc.size(); ++i) {
        if (alloc[i] == 0.0)
            mask[i] = false;
        else if (alloc[i] == alloc.caps()[i])
            mask[i] = true;
        else
            throw ContractError("allocation is not a vertex: p_" + std::to_string(i + 1) + " is strictly inside (0, P)");
    }
    return mask;
}

PowerAllocation vertex_allocation(const VertexMask& mask, std::span<const double> caps)
{
    if (mask.size() != caps.size())
        throw ContractError("vertex mask and caps differ in length");
    return PowerAllocation(vertex_powers(mask, caps), std::vector<double>(caps.begin(), caps.end()));
}

std::string mask_bits(const VertexMask& mask)
{
    std::string bits(mask.size(), '0');
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            bits[i] = '1';
    return bits;
}

OnOffResult solve_onoff(const PerfectCsitObjective& obj, std::span<const double> caps, std::optional<VertexMask> start)
{
    const std::size_t m = obj.size();
    if (caps.size() != m)
        throw ContractError("caps and objective differ in length");
    VertexMask mask = start.value_or(VertexMask(m, true));
    if (mask.size() != m)
        throw ContractError("start vertex has wrong length");

    OnOffTrace trace;
    for (int iter = 0;; ++iter) {
        const auto p = vertex_powers(mask, caps);
        trace.iterates.push_back(mask);
        trace.objective_values.push_back(f0_value(obj, p));

        const auto grad = f0_gradient(obj, p);
        VertexMask next(m);
        for (std::size_t i = 0; i < m; ++i)
            next[i] = grad[i] > 0.0;
        if (next == mask) {
            trace.converged = true;
            trace.iterations = iter;
            return {vertex_allocation(mask, caps), std::move(trace)};
        }
        const bool cycle = trace.iterates.size() >= 2 && next == trace.iterates[trace.iterates.size() - 2];
        if (cycle || iter + 1 >= kMaxIterations) {
            trace.iterations = iter;
            trace.used_fallback = true;
            auto best = vertex_enumeration_oracle(obj, caps);
            trace.iterates.push_back(vertex_mask(best));
            trace.objective_values.push_back(f0_value(obj, best.p()));
            return {std::move(best), std::move(trace)};
        }
        mask = std::move(next);
    }
}

PowerAllocation onoff_m2_closed_form(std::span<const cd> h, std::span<const cd> g, double source_power,
                                     double relay_power, double noise_var)
{
    if (h.size() != 2 || g.size() != 2)
        throw ContractError("two-relay closed form needs M = 2");
    const double h1 = std::norm(h[0]), h2 = std::norm(h[1]);
    const double g1 = std::norm(g[0]), g2 = std::norm(g[1]);
    std::vector<double> caps{relay_power / (source_power * h1 + noise_var),
                             relay_power / (source_power * h2 + noise_var)};

    // Relay 2 is switched off when |h_2|^2 falls below the level set by relay 1
    // alone, and symmetrically for relay 1.
    const double thr2 = relay_power * g1 * h1 / (source_power * h1 + relay_power * g1 + noise_var);
    const double thr1 = relay_power * g2 * h2 / (source_power * h2 + relay_power * g2 + noise_var);
    if (h2 < thr2)
        return PowerAllocation({caps[0], 0.0}, caps);
    if (h1 < thr1)
        return PowerAllocation({0.0, caps[1]}, caps);
    return PowerAllocation::full(caps);
}

PowerAllocation vertex_enumeration_oracle(const PerfectCsitObjective& obj, std::span<const double> caps)
{
    const std::size_t m = obj.size();
    if (caps.size() != m)
        throw ContractError("caps and objective differ in length");
    if (m > kMaxEnumerationRelays)
        throw SizeError("vertex enumeration limited to M <= 20, got M = " + std::to_string(m));

    std::vector<double> num_term(m), den_term(m);
    for (std::size_t i = 0; i < m; ++i) {
        num_term[i] = obj.signal_gain[i] * caps[i];
        den_term[i] = obj.noise_gain[i] * caps[i];
    }
    auto exact_value = [&](std::uint32_t v) {
        double num = 0.0;
        double den = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if ((v >> i) & 1u) {
                num += num_term[i];
                den += den_term[i];
            }
        }
        return num / den;
    };

    std::uint32_t best = 0;
    double best_value = 0.0;  // origin
    int best_count = 0;
    // Gray-code walk: one relay flips per step, so the running sums update in
    // O(1). Vertices that come close to the incumbent are re-evaluated exactly
    // before the tie rules are applied.
    double num = 0.0;
    double den = 1.0;
    const std::uint32_t total = std::uint32_t{1} << m;
    for (std::uint32_t k = 1; k < total; ++k) {
        const std::uint32_t v = k ^ (k >> 1);
        const auto bit = static_cast<std::size_t>(std::countr_zero(k));
        if ((v >> bit) & 1u) {
            num += num_term[bit];
            den += den_term[bit];
        } else {
            num -= num_term[bit];
            den -= den_term[bit];
        }
        if (num / den < best_value - 1e-9 * std::fabs(best_value))
            continue;
        const double value = exact_value(v);
        const double tol = 1e-12 * std::max(std::fabs(value), std::fabs(best_value));
        const int count = std::popcount(v);
        bool take = false;
        if (value > best_value + tol)
            take = true;
        else if (value >= best_value - tol)
            take = count < best_count || (count == best_count && on_set_less(v, best, m));
        if (take) {
            best = v;
            best_value = value;
            best_count = count;
        }
    }
    VertexMask mask(m);
    for (std::size_t i = 0; i < m; ++i)
        mask[i] = (best >> i) & 1u;
    return vertex_allocation(mask, caps);
}

bool verify_stationarity(const PerfectCsitObjective& obj, const PowerAllocation& alloc)
{
    const auto mask = vertex_mask(alloc);
    const auto grad = f0_gradient(obj, alloc.p());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] && !(grad[i] > 0.0))
            return false;
        if (!mask[i] && grad[i] > 0.0)
            return false;
    }
    return true;
}

} // namespace relaynet
