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

#include "relaynet/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "relaynet/errors.hpp"

namespace relaynet {

namespace {

void check_inputs(const LogObjective& obj, std::span<const double> caps)
{
    if (obj.gamma_g.size() != caps.size() || obj.a.size() != caps.size())
        throw ContractError("waterfilling: objective and caps differ in length");
    if (caps.empty())
        throw ContractError("waterfilling needs at least one relay");
    for (std::size_t i = 0; i < caps.size(); ++i)
        if (!(obj.gamma_g[i] > 0.0) || !(caps[i] > 0.0))
            throw ContractError("waterfilling needs gamma_g > 0 and P > 0");
}

} // namespace

WaterLevelCandidates water_level_candidates(const LogObjective& obj, std::span<const double> caps)
{
    check_inputs(obj, caps);
    const std::size_t m = caps.size();
    WaterLevelCandidates out;
    const auto range = water_level_range(obj.gamma_g, caps);
    out.mu_min = range.min;
    out.mu_max = range.max;

    out.order.resize(m);
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t l, std::size_t r) {
        return caps[l] * obj.gamma_g[l] < caps[r] * obj.gamma_g[r];
    });

    double prefix = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = out.order[j];
        prefix += caps[i] * obj.gamma_g[i];
        const double mu = prefix / static_cast<double>(j + 1);
        out.levels.push_back(mu);
        out.feasible.push_back(mu >= out.mu_min && mu <= out.mu_max);
        // membership is recomputed from the clamped level itself
        out.objective.push_back(J_of_mu(obj, mu, caps));
    }
    // the top candidate is mu_max by construction; pin it against round-off
    out.levels.back() = out.mu_max;
    out.feasible.back() = true;
    return out;
}

WaterfillResult solve_waterfill(const LogObjective& obj, std::span<const double> caps)
{
    auto cand = water_level_candidates(obj, caps);
    std::size_t best = 0;
    for (std::size_t j = 1; j < cand.objective.size(); ++j)
        if (cand.objective[j] > cand.objective[best])
            best = j;
    const double mu = std::clamp(cand.levels[best], cand.mu_min, cand.mu_max);
    auto p = allocation_at_level(obj.gamma_g, caps, mu);
    WaterfillResult out{PowerAllocation(std::move(p), std::vector<double>(caps.begin(), caps.end())), mu,
                        std::move(cand)};
    return out;
}

PowerAllocation waterfill_m2_closed_form(std::span<const double> gamma_g, std::span<const double> caps)
{
    if (gamma_g.size() != 2 || caps.size() != 2)
        throw ContractError("two-relay waterfilling closed form needs M = 2");
    std::vector<double> cap_vec(caps.begin(), caps.end());
    const double x1 = caps[0] * gamma_g[0];
    const double x2 = caps[1] * gamma_g[1];
    if (x2 > x1 + 1.0)
        return PowerAllocation({caps[0], (1.0 + x1) / gamma_g[1]}, cap_vec);
    if (x1 > x2 + 1.0)
        return PowerAllocation({(1.0 + x2) / gamma_g[0], caps[1]}, cap_vec);
    return PowerAllocation::full(cap_vec);
}

double derivative_J_wrt_mu(const LogObjective& obj, double mu, std::span<const double> caps)
{
    check_inputs(obj, caps);
    const std::size_t m = caps.size();
    std::size_t free_count = 0;
    double capped = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (caps[i] * obj.gamma_g[i] <= mu)
            capped += caps[i] * obj.gamma_g[i];
        else
            ++free_count;
    }
    const double c = static_cast<double>(free_count);
    return c * (1.0 - static_cast<double>(m) * mu / (1.0 + c * mu + capped));
}

GridOptimum grid_search_oracle(const LogObjective& obj, std::span<const double> caps, std::size_t grid_points)
{
    check_inputs(obj, caps);
    if (grid_points < 2)
        throw ContractError("grid search needs at least two grid points");
    const std::size_t m = caps.size();

    // Sort relays by their clamp level x_i = P_i gamma_gi. For a level mu with
    // k relays clamped (the k smallest x_i):
    //   J = sum_{clamped} ln(a_i P_i) + sum_{free} ln(a_i mu / gamma_gi)
    //       - M ln(1 + sum_{clamped} x_i + (M - k) mu)
    struct Relay {
        double x, log_capped, log_free;
    };
    std::vector<Relay> relays(m);
    double sum_x = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        relays[i] = {caps[i] * obj.gamma_g[i], std::log(obj.a[i] * caps[i]), std::log(obj.a[i] / obj.gamma_g[i])};
        sum_x += relays[i].x;
    }
    std::sort(relays.begin(), relays.end(), [](const Relay& l, const Relay& r) { return l.x < r.x; });
    std::vector<double> pre_x(m + 1, 0.0), pre_capped(m + 1, 0.0), suf_free(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        pre_x[k + 1] = pre_x[k] + relays[k].x;
        pre_capped[k + 1] = pre_capped[k] + relays[k].log_capped;
    }
    for (std::size_t k = m; k-- > 0;)
        suf_free[k] = suf_free[k + 1] + relays[k].log_free;

    const double md = static_cast<double>(m);
    const double lo = 1.0 / md;
    const double hi = (1.0 + sum_x) / md;
    auto evaluate = [&](double mu) {
        const std::size_t k = static_cast<std::size_t>(
            std::upper_bound(relays.begin(), relays.end(), mu, [](double v, const Relay& r) { return v < r.x; }) -
            relays.begin());
        const double free = static_cast<double>(m - k);
        return pre_capped[k] + suf_free[k] + free * std::log(mu) - md * std::log(1.0 + pre_x[k] + free * mu);
    };

    GridOptimum best{lo, evaluate(lo)};
    auto consider = [&](double mu) {
        const double J = evaluate(mu);
        if (J > best.J)
            best = {mu, J};
    };
    for (std::size_t n = 1; n < grid_points; ++n)
        consider(lo + (hi - lo) * static_cast<double>(n) / static_cast<double>(grid_points - 1));
    for (std::size_t j = 0; j < m; ++j)
        consider(std::clamp((1.0 + pre_x[j + 1]) / static_cast<double>(j + 1), lo, hi));
    return best;
}

void write_waterfill_csv(std::ostream& os, const WaterfillResult& result, std::span<const double> gamma_g)
{
    const auto& alloc = result.allocation;
    if (gamma_g.size() != alloc.size())
        throw ContractError("waterfill CSV: gamma_g length mismatch");
    const auto old = os.precision(17);
    os << "relay,gamma_g,P,p,at_cap,mu_star\n";
    for (std::size_t i = 0; i < alloc.size(); ++i) {
        os << (i + 1) << ',' << gamma_g[i] << ',' << alloc.caps()[i] << ',' << alloc[i] << ','
           << (alloc[i] == alloc.caps()[i] ? 1 : 0) << ',' << result.mu_star << '\n';
    }
    os.precision(old);
}

} // namespace relaynet
