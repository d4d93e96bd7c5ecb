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

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace relaynet {

using Engine = std::mt19937_64;

/// Engine for the stream identified by (seed, path...). Streams with different
/// paths are statistically independent; the same path always yields the same
/// sequence, regardless of which worker thread consumes it.
inline Engine make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * path.size());
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto v : path)
        push(v);
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

/// Circularly symmetric complex Gaussian sampler, CN(0, variance).
class ComplexGaussian {
public:
    std::complex<double> operator()(Engine& eng, double variance = 1.0)
    {
        const double sd = std::sqrt(0.5 * variance);
        const double re = normal_(eng);
        const double im = normal_(eng);
        return {sd * re, sd * im};
    }

private:
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace relaynet
