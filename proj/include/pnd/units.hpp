// Copyright 2026 The pnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <numbers>

// Internally every frequency and rate is an angular frequency in rad/us.
// Configs and reports quote ordinary frequencies (value = omega / 2 pi) in
// MHz or kHz. These helpers are the only place the 2 pi enters.
namespace pnd::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_mhz(double f) { return kTwoPi * f; }
constexpr double from_khz(double f) { return kTwoPi * f * 1e-3; }
constexpr double to_mhz(double w) { return w / kTwoPi; }
constexpr double to_khz(double w) { return w / kTwoPi * 1e3; }

}  // namespace pnd::units
