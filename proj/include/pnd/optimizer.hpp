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

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pnd/effective.hpp"
#include "pnd/models.hpp"

namespace pnd {

// Target kinds. Energies are angular frequencies in rad/us.
struct ThreePhoton {
    double k3 = 0.0;
};
struct ParityTarget {
    double p = 0.0;
};
struct ZRotation {
    double g_r = 0.0;
    int d_n = 2;
};
struct KerrCancel {
    double k = 0.0;
};
struct CPhase {
    double g_cr = 0.0;
    int d_na = 2;
    int d_nb = 2;
};
struct Custom {
    std::vector<double> energies;
};

struct TargetSpec {
    std::variant<ThreePhoton, ParityTarget, ZRotation, KerrCancel, CPhase, Custom> kind;
    int n_max = 6;
    // Extra (K/2) n (n - 1) added on top of the pattern, e.g. a Z rotation
    // that also cancels self-Kerr.
    double kerr_compensation = 0.0;
};

// Single-cavity targets come back under "cavity"; CPhase returns the three
// marginal patterns under "a", "b" and "c" (c indexed by n_a + n_b).
std::map<std::string, std::vector<double>> make_target(const TargetSpec& spec);

struct OptimizerConfig {
    std::vector<Rational> detuning_menu = {Rational(1, 2), Rational(-1, 2), Rational(1, 4), Rational(-1, 4)};
    int n_assignments = 200;
    std::uint64_t seed = 1;
    double amp_bound = 0.2;             // max |Omega| / chi
    double solver_tol = 0.0;            // rad/us; <= 0 means 0.25 kHz
    bool include_order4 = true;
    double guard = kDefaultGuard;
    int max_iterations = 60;
    // Drop assignments whose detuning sign opposes a target entry larger
    // than this fraction of max |E_T|.
    double prune_fraction = 0.25;
    // After sampling, greedily try single-index detuning swaps on the best
    // candidate while the objective improves.
    bool local_search = true;
    int threads = 1;

    double tolerance() const;
    void validate() const;
};

struct OptimizedDrive {
    DriveSpec drive;
    EngineeredSpectrum achieved;
    std::vector<double> target;
    std::vector<Rational> assignment;
    double objective = 0.0;
    double residual = 0.0;
};

// One tone per n with delta_n = assignment[n]; returns real Omega_n in rad/us.
// Throws InfeasibleError (with the reason) or ResonanceError.
std::vector<double> solve_amplitudes(const std::vector<Rational>& assignment, const std::vector<double>& target,
                                     const SystemParams& params, const OptimizerConfig& config);

OptimizedDrive optimize_drives(const std::vector<double>& target, const SystemParams& params, const OptimizerConfig& config);

// Tones for an assignment and amplitude vector.
std::vector<DriveTone> make_tones(const std::vector<Rational>& assignment, const std::vector<double>& omega);

}  // namespace pnd
