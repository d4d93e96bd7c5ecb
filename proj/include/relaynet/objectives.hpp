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
#include <cstdint>
#include <span>
#include <vector>

#include "relaynet/core_model.hpp"

namespace relaynet {

/// eta = lambda_min p_s / (4 N0).
double chernoff_eta(double lambda_min, double source_power, double noise_var);

/// Approximate receive SNR under perfect CSIT: eta * f0(p) with
/// f0 = sum a_i p_i / (1 + sum b_i p_i), a_i = |h_i g_i|^2 (signal_gain) and
/// b_i = |g_i|^2 (noise_gain).
struct PerfectCsitObjective {
    std::vector<double> signal_gain;
    std::vector<double> noise_gain;
    double eta = 1.0;

    static PerfectCsitObjective from_channels(const ChannelRealization& chan, double eta);
    std::size_t size() const { return signal_gain.size(); }
};

/// Log-domain objective shared by partial and statistical CSIT:
/// J(p) = sum ln(a_i p_i / (1 + sum gamma_gj p_j)).
struct LogObjective {
    std::vector<double> a;
    std::vector<double> gamma_g;

    std::size_t size() const { return a.size(); }
};

/// a_i = eta gamma_gi |h_i|^2.
struct PartialCsitObjective : LogObjective {
    static PartialCsitObjective make(std::span<const cd> h, std::span<const double> gamma_g, double eta);
};

/// a_i = eta gamma_gi gamma_hi.
struct StatisticalCsitObjective : LogObjective {
    static StatisticalCsitObjective make(std::span<const double> gamma_h, std::span<const double> gamma_g,
                                         double eta);
};

double f0_value(const PerfectCsitObjective& obj, std::span<const double> p);
std::vector<double> f0_gradient(const PerfectCsitObjective& obj, std::span<const double> p);

/// Chernoff bound exp(-eta f0(p)).
double pep_bound_perfect(const PerfectCsitObjective& obj, std::span<const double> p);

/// Same bound evaluated from the received-signal model: the exponent is
/// p_s lambda_min ||Q f||^2 / (4 sigma_v^2).
double pep_bound_perfect(const ChannelRealization& chan, const PowerAllocation& alloc, double lambda_min,
                         double source_power, double noise_var);

/// Per-relay SNR contributions rho_i = a_i p_i / (1 + sum gamma_gj p_j).
std::vector<double> snr_contributions(const LogObjective& obj, std::span<const double> p);

/// prod (1 + rho_i)^-1.
double pep_bound_partial(const LogObjective& obj, std::span<const double> p);

/// Exact statistical-CSIT bound prod (1/rho_j) e^{1/rho_j} E1(1/rho_j).
/// Throws DomainError if some rho_j is zero.
double pep_bound_statistical_exact(const LogObjective& obj, std::span<const double> p);

struct AsymptoticBound {
    double value = 0.0;
    bool valid = false;  // false when some rho_j <= 1
};

/// High-SNR form prod rho_j^-1 ln rho_j.
AsymptoticBound pep_bound_statistical_asymptotic(const LogObjective& obj, std::span<const double> p);

/// Exact partial-CSIT objective f1 = sum ln(1 + rho_i). Evaluation only.
double f1_value(const LogObjective& obj, std::span<const double> p);

/// J(p); every p_i must be positive.
double log_objective_J(const LogObjective& obj, std::span<const double> p);

// Water level machinery. p_i(mu) = min(mu / gamma_gi, P_i); relay i is
// capped (in the clamped set) iff P_i gamma_gi <= mu.

struct WaterLevelRange {
    double min = 0.0;  // 1 / M
    double max = 0.0;  // (1 + sum gamma_gi P_i) / M
};

WaterLevelRange water_level_range(std::span<const double> gamma_g, std::span<const double> caps);

std::vector<double> allocation_at_level(std::span<const double> gamma_g, std::span<const double> caps,
                                        double mu);

struct LevelEvaluation {
    double mu = 0.0;  // level actually used
    double J = 0.0;
    bool clamped = false;  // requested level was outside the range
};

LevelEvaluation evaluate_water_level(const LogObjective& obj, double mu, std::span<const double> caps);

/// J as a function of the water level; levels outside the range are clamped.
double J_of_mu(const LogObjective& obj, double mu, std::span<const double> caps);

/// Monte Carlo check of the saddle-point approximation behind the partial
/// CSIT bound: E_g[exp(-eta a/b)] with a = g^H H^H P H g, b = 1 + g^H P g,
/// against pep_bound_partial.
struct SaddlePointEstimate {
    double mc_estimate = 1.0;
    double mc_stderr = 0.0;
    double bound = 1.0;
    double relative_error = 0.0;
    double relative_stderr = 0.0;  // mc_stderr scaled like relative_error
};

SaddlePointEstimate saddle_point_error(std::span<const cd> h, std::span<const double> gamma_g,
                                       std::span<const double> p, double eta, std::size_t trials,
                                       std::uint64_t seed, unsigned shards = 1);

} // namespace relaynet
