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

#include "relaynet/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relaynet/errors.hpp"

namespace relaynet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTerms = 500;

// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
double e1_series(double x)
{
    double sum = 0.0;
    double term = 1.0;  // (-1)^{k+1} x^k / k!
    for (int k = 1; k <= kMaxTerms; ++k) {
        term *= (k == 1 ? x : -x / k);
        const double add = term / k;
        sum += add;
        if (std::fabs(add) < kEps * std::fabs(sum))
            break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
double e1_scaled_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxTerms; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    return h;
}

void check_domain(double x)
{
    if (!(x > 0.0) || std::isnan(x))
        throw DomainError("exponential integral E1 needs x > 0, got " + std::to_string(x));
}

} // namespace

double exp_integral_e1(double x)
{
    check_domain(x);
    if (x <= 1.0)
        return e1_series(x);
    return std::exp(-x) * e1_scaled_fraction(x);
}

double exp_scaled_e1(double x)
{
    check_domain(x);
    if (x <= 1.0)
        return std::exp(x) * e1_series(x);
    return e1_scaled_fraction(x);
}

} // namespace relaynet
