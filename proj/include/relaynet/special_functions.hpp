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

namespace relaynet {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
/// Power series below x = 1, modified Lentz continued fraction above.
double exp_integral_e1(double x);

/// e^x E1(x), evaluated without forming e^x for large x.
double exp_scaled_e1(double x);

} // namespace relaynet
