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

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pnd/core.hpp"
#include "pnd/dynamics.hpp"
#include "pnd/models.hpp"

namespace pnd {

struct Kitten {};
// |0_L> on n = 0 mod 2 d_n, |1_L> on n = d_n mod 2 d_n, weights f[k] for the
// k-th occupied level of each word.
struct RotationSymmetric {
    int d_n = 2;
    std::vector<double> f0;
    std::vector<double> f1;
};

struct LogicalCode {
    std::variant<Kitten, RotationSymmetric> kind = Kitten{};
    int n_cut = 6;

    QuantumState zero(const std::string& label = "cavity") const;
    QuantumState one(const std::string& label = "cavity") const;
    // (a |0_L> + b |1_L>) normalised.
    QuantumState logical(cplx a, cplx b, const std::string& label = "cavity") const;
};

// Resonant-comb selective phase gate. Every addressed level n gets one tone
// at its qubit line with |Omega| = pi / T_G (a full 2 pi Rabi cycle), a
// static detuning that undoes the ac Stark shift from the other tones, and a
// drive phase jump at T_G / 2 that sets the geometric phase.
struct SnapGate {
    SystemParams params;
    double t_g = 0.0;
    double omega = 0.0;
    std::vector<int> levels;
    std::vector<double> target_phase;
    std::vector<double> detuning;    // rad/us, added to the bare line
    std::vector<double> phase_jump;  // rad
    // Single-level diagnostics from the last calibration pass.
    std::vector<double> ground_population;
    std::vector<double> phase_error;

    BlockModel model(const NoiseParams& noise = {}) const;
    // Cavity phases the gate is meant to apply (zero on unaddressed levels).
    std::vector<double> cavity_phases() const;
};

// Builds and calibrates the comb. Throws InvalidArgument when pi / T_G is not
// small against chi or a level exceeds n_cut.
SnapGate snap_gate(const std::map<int, double>& phases, double t_g, const SystemParams& params, int calibration_passes = 3);

}  // namespace pnd
