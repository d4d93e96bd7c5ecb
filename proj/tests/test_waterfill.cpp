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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaynet/errors.hpp"
#include "relaynet/waterfill.hpp"
#include "test_support.hpp"

using namespace relaynet;
using namespace relaynet::testing;

TEST_CASE("two-relay worked instance")
{
    LogObjective obj{{1.0, 1.0}, {1.0, 1.0}};
    const std::vector<double> caps{1.0, 3.0};
    const auto res = solve_waterfill(obj, caps);
    CHECK(res.mu_star == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.allocation[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.allocation[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(grid_search_oracle(obj, caps, 100000).mu == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(waterfill_m2_closed_form(obj.gamma_g, caps) == res.allocation);
}

TEST_CASE("three-relay worked instance")
{
    LogObjective obj{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    const std::vector<double> caps{0.5, 1.0, 5.0};
    const auto res = solve_waterfill(obj, caps);
    CHECK(std::abs(res.mu_star - 1.25) < 1e-12);
    CHECK(std::abs(res.allocation[0] - 0.5) < 1e-12);
    CHECK(std::abs(res.allocation[1] - 1.0) < 1e-12);
    CHECK(std::abs(res.allocation[2] - 1.25) < 1e-12);
    CHECK(J_of_mu(obj, 1.25, caps) == doctest::Approx(-4.43528).epsilon(1e-5));
    CHECK(J_of_mu(obj, 1.5, caps) == doctest::Approx(-4.44657).epsilon(1e-5));
    CHECK(J_of_mu(obj, 2.5, caps) == doctest::Approx(-4.60517).epsilon(1e-5));
    CHECK(grid_search_oracle(obj, caps, 100000).mu == doctest::Approx(1.25).epsilon(1e-3));

    CHECK(std::abs(derivative_J_wrt_mu(obj, 1.25, caps)) < 1e-9);
    CHECK(derivative_J_wrt_mu(obj, 1.3, caps) < 0.0);
    CHECK(derivative_J_wrt_mu(obj, 1.2, caps) > 0.0);
}

TEST_CASE("two-relay closed form follows the feasible branches")
{
    const std::vector<double> unit{1.0, 1.0};
    CHECK(waterfill_m2_closed_form(unit, std::vector<double>{1.0, 3.0}).p() == std::vector<double>{1.0, 2.0});
    CHECK(waterfill_m2_closed_form(unit, std::vector<double>{3.0, 1.0}).p() == std::vector<double>{2.0, 1.0});
    CHECK(waterfill_m2_closed_form(unit, std::vector<double>{1.0, 1.0}).p() == std::vector<double>{1.0, 1.0});
    const std::vector<double> gg{2.0, 1.0};
    const std::vector<double> caps{1.0, 2.5};
    CHECK(waterfill_m2_closed_form(gg, caps).p() == caps);
    LogObjective obj{{1.0, 1.0}, gg};
    CHECK(solve_waterfill(obj, caps).allocation == PowerAllocation::full(caps));
}

TEST_CASE("single relay sits at its cap")
{
    LogObjective obj{{0.7}, {2.0}};
    const std::vector<double> caps{1.5};
    const auto res = solve_waterfill(obj, caps);
    CHECK(res.mu_star == doctest::Approx(1.0 + 2.0 * 1.5));
    CHECK(res.allocation.p() == caps);
}

TEST_CASE("derivative matches finite differences of J in log mu")
{
    Engine eng = make_stream(31);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        const auto inst = random_log_instance(2 + done % 8, eng);
        const auto range = water_level_range(inst.obj.gamma_g, inst.caps);
        const double mu = std::exp(std::log(range.min) + u(eng) * (std::log(range.max) - std::log(range.min)));
        const double h = 1e-6;
        const double lo = mu * std::exp(-h);
        const double hi = mu * std::exp(h);
        // Skip points where a relay changes state inside the stencil.
        bool kink = false;
        for (std::size_t i = 0; i < inst.caps.size(); ++i) {
            const double x = inst.caps[i] * inst.obj.gamma_g[i];
            kink = kink || (x > lo && x < hi);
        }
        if (kink || hi > range.max || lo < range.min)
            continue;
        const double fd = (J_of_mu(inst.obj, hi, inst.caps) - J_of_mu(inst.obj, lo, inst.caps)) / (2.0 * h);
        const double an = derivative_J_wrt_mu(inst.obj, mu, inst.caps);
        worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1.0));
        ++done;
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("solver dominates the grid oracle")
{
    Engine eng = make_stream(17);
    for (int k = 0; k < 300; ++k) {
        const auto inst = random_log_instance(1 + k % 10, eng);
        const auto res = solve_waterfill(inst.obj, inst.caps);
        const auto grid = grid_search_oracle(inst.obj, inst.caps, 20000);
        CHECK(log_objective_J(inst.obj, res.allocation.p()) >= grid.J - 1e-9);
        // Water level is the common p_i gamma_gi of the uncapped relays.
        for (std::size_t i = 0; i < inst.caps.size(); ++i) {
            if (res.allocation[i] < inst.caps[i])
                CHECK(res.allocation[i] * inst.obj.gamma_g[i] == doctest::Approx(res.mu_star).epsilon(1e-12));
            else
                CHECK(inst.caps[i] * inst.obj.gamma_g[i] <= res.mu_star * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("closed form matches the solver on random two-relay instances")
{
    Engine eng = make_stream(19);
    for (int k = 0; k < 2000; ++k) {
        const auto inst = random_log_instance(2, eng);
        CHECK(waterfill_m2_closed_form(inst.obj.gamma_g, inst.caps) == solve_waterfill(inst.obj, inst.caps).allocation);
    }
}

TEST_CASE("rescaling a_i leaves the allocation unchanged")
{
    Engine eng = make_stream(23);
    for (int k = 0; k < 100; ++k) {
        auto inst = random_log_instance(5, eng);
        const auto base = solve_waterfill(inst.obj, inst.caps).allocation;
        inst.obj.a[static_cast<std::size_t>(k % 5)] *= 37.0;
        CHECK(solve_waterfill(inst.obj, inst.caps).allocation == base);
    }
}

TEST_CASE("asymptotic structure")
{
    Engine eng = make_stream(29);
    // Caps far below the water: every relay at full power.
    for (int k = 0; k < 50; ++k) {
        auto inst = random_log_instance(6, eng);
        for (auto& c : inst.caps)
            c *= 1e-6;
        CHECK(solve_waterfill(inst.obj, inst.caps).allocation == PowerAllocation::full(inst.caps));
    }
    // Strong second hop: only the relay with the smallest P_i gamma_gi stays at its cap.
    for (int k = 0; k < 50; ++k) {
        auto inst = random_log_instance(6, eng);
        for (auto& g : inst.obj.gamma_g)
            g *= 1e6;
        const auto res = solve_waterfill(inst.obj, inst.caps);
        std::size_t weakest = 0;
        for (std::size_t i = 1; i < inst.caps.size(); ++i)
            if (inst.caps[i] * inst.obj.gamma_g[i] < inst.caps[weakest] * inst.obj.gamma_g[weakest])
                weakest = i;
        CHECK(res.mu_star == doctest::Approx(res.candidates.levels.front()));
        for (std::size_t i = 0; i < inst.caps.size(); ++i)
            CHECK((res.allocation[i] == inst.caps[i]) == (i == weakest));
    }
}

TEST_CASE("candidate levels")
{
    LogObjective obj{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    const std::vector<double> caps{5.0, 0.5, 1.0};
    const auto cand = water_level_candidates(obj, caps);
    CHECK(cand.order == std::vector<std::size_t>{1, 2, 0});
    CHECK(cand.levels[0] == doctest::Approx(1.5));
    CHECK(cand.levels[1] == doctest::Approx(1.25));
    CHECK(cand.levels[2] == doctest::Approx(2.5));
    CHECK(cand.mu_min == doctest::Approx(1.0 / 3.0));
    CHECK(cand.mu_max == doctest::Approx(2.5));
}

TEST_CASE("waterfill CSV")
{
    LogObjective obj{{1.0, 1.0}, {1.0, 1.0}};
    const std::vector<double> caps{1.0, 3.0};
    std::ostringstream os;
    write_waterfill_csv(os, solve_waterfill(obj, caps), obj.gamma_g);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "relay,gamma_g,P,p,at_cap,mu_star");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 2);
}
