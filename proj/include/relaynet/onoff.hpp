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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaynet/core_model.hpp"
#include "relaynet/objectives.hpp"

namespace relaynet {

/// Sign quantities deciding the two-relay vertex. With a = signal_gain and
/// b = noise_gain: cross = a_1 b_2 - b_1 a_2; gain1_given_relay2 = a_1 + cross P_2
/// is the slope in p_1 at (0, P_2), gain2_given_relay1 = a_2 - cross P_1 the
/// slope in p_2 at (P_1, 0), both up to a positive factor.
struct M2Discriminant {
    double cross = 0.0;
    double gain1_given_relay2 = 0.0;
    double gain2_given_relay1 = 0.0;

    static M2Discriminant compute(const PerfectCsitObjective& obj, std::span<const double> caps);
};

/// On/off pattern of a vertex; `true` means the relay transmits at its cap.
using VertexMask = std::vector<bool>;

struct OnOffTrace {
    std::vector<VertexMask> iterates;
    std::vector<double> objective_values;  // f0 at each iterate
    bool converged = false;
    int iterations = 0;  // number of updates applied
    bool used_fallback = false;
};

struct OnOffResult {
    PowerAllocation allocation;
    OnOffTrace trace;
};

/// On-off gradient ascent over the vertices of the box [0, P].
/// Every relay jumps to its cap if its partial derivative is positive and to
/// zero otherwise (an exactly zero derivative switches the relay off). Stops
/// when the pattern agrees with the gradient signs. After 100 iterations or on
/// a detected 2-cycle it falls back to vertex enumeration (M <= 20).
OnOffResult solve_onoff(const PerfectCsitObjective& obj, std::span<const double> caps,
                        std::optional<VertexMask> start = std::nullopt);

/// Two-relay closed form from the instantaneous channels.
PowerAllocation onoff_m2_closed_form(std::span<const cd> h, std::span<const cd> g, double source_power,
                                     double relay_power, double noise_var);

/// Exact argmax of f0 over all 2^M vertices. Near-ties (1e-12 relative) go to
/// fewer active relays, then to the lexicographically smallest on-set.
PowerAllocation vertex_enumeration_oracle(const PerfectCsitObjective& obj, std::span<const double> caps);

/// True iff the gradient is > 0 on every capped relay and <= 0 on every
/// switched-off relay. Throws ContractError for a non-vertex allocation.
bool verify_stationarity(const PerfectCsitObjective& obj, const PowerAllocation& alloc);

VertexMask vertex_mask(const PowerAllocation& alloc);
PowerAllocation vertex_allocation(const VertexMask& mask, std::span<const double> caps);

/// One-bit-per-relay feedback word, relay 1 first ("101").
std::string mask_bits(const VertexMask& mask);

} // namespace relaynet
