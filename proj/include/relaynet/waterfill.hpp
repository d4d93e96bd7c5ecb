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
#include <iosfwd>
#include <span>
#include <vector>

#include "relaynet/core_model.hpp"
#include "relaynet/objectives.hpp"

namespace relaynet {

/// Candidate water levels mu_j = (1 + sum of the j smallest P_i gamma_gi) / j.
/// `order` sorts relays by P_i gamma_gi ascending, stable in the relay index.
struct WaterLevelCandidates {
    std::vector<std::size_t> order;
    std::vector<double> levels;     // raw mu_j
    std::vector<bool> feasible;     // mu_j inside [mu_min, mu_max]
    std::vector<double> objective;  // J at the clamped mu_j
    double mu_min = 0.0;
    double mu_max = 0.0;
};

struct WaterfillResult {
    PowerAllocation allocation;
    double mu_star = 0.0;
    WaterLevelCandidates candidates;
};

WaterLevelCandidates water_level_candidates(const LogObjective& obj, std::span<const double> caps);

/// Maximizes J over the box (0, P]. The returned powers are
/// p_i = min(mu* / gamma_gi, P_i) and strictly positive.
WaterfillResult solve_waterfill(const LogObjective& obj, std::span<const double> caps);

/// Two-relay closed form.
PowerAllocation waterfill_m2_closed_form(std::span<const double> gamma_g, std::span<const double> caps);

/// dJ/d(ln mu) at level mu:
/// |C| (1 - M mu / (1 + |C| mu + sum_{capped} gamma_gi P_i)), C = uncapped relays.
double derivative_J_wrt_mu(const LogObjective& obj, double mu, std::span<const double> caps);

struct GridOptimum {
    double mu = 0.0;
    double J = 0.0;
};

/// Best level on a uniform grid over [mu_min, mu_max] together with the
/// candidate levels. Independent evaluation path (sorted prefix sums).
GridOptimum grid_search_oracle(const LogObjective& obj, std::span<const double> caps, std::size_t grid_points);

/// CSV rows relay,gamma_g,P,p,at_cap,mu_star.
void write_waterfill_csv(std::ostream& os, const WaterfillResult& result, std::span<const double> gamma_g);

} // namespace relaynet
