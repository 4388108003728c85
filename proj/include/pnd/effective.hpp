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

#include <vector>

#include "pnd/core.hpp"
#include "pnd/models.hpp"

namespace pnd {

// Resonance guard as a fraction of chi.
inline constexpr double kDefaultGuard = 0.01;

// Per-Fock energies E_n (rad/us) of the photon-number-dependent Hamiltonian
// sum_n E_n |n><n| seen with the ancilla in |g>.
struct EngineeredSpectrum {
    std::vector<double> energies;
    int order = 2;  // 2, 4, or 0 for exact Floquet values
    SystemParams params;
};

struct TwoCavitySpectrum {
    Eigen::MatrixXd energies;  // (n_a, n_b)
    std::vector<double> e_a, e_b, e_c;
    int order = 4;
};

// Energies for n = 0..n_max (n_max < 0 means params.n_cut).
EngineeredSpectrum spectrum_order2(const SystemParams& params, const std::vector<DriveTone>& tones,
                                   double guard = kDefaultGuard, int n_max = -1);
// Order 2 plus the fourth-order correction. See docs/theory.md for the form
// of the phase-matched quadruple sum.
EngineeredSpectrum spectrum_order4(const SystemParams& params, const std::vector<DriveTone>& tones,
                                   double guard = kDefaultGuard, int n_max = -1);
// Numerically exact quasi-energies: propagate each (g, e) block over one
// micromotion period and take the ground-dressed Floquet phase.
EngineeredSpectrum floquet_spectrum(const SystemParams& params, const std::vector<DriveTone>& tones, int n_max = -1,
                                    int steps_per_period = 4000);

// Fourth-order term alone for one channel and photon number. Exposed for the
// two-cavity evaluator and for scaling checks.
double order4_correction(double chi, double chi_prime, const std::vector<DriveTone>& tones, int n, double guard);
double order2_energy(double chi, double chi_prime, const std::vector<DriveTone>& tones, int n, double guard);

// GCD of all detunings and chi in units of chi, and T_M = 2 pi / (gcd chi).
Rational micromotion_gcd(const std::vector<DriveTone>& tones);
double micromotion_period(const std::vector<DriveTone>& tones, double chi);

// Time-averaged ancilla excitation for Fock state n. The second (kick) term
// is present for abrupt switch-on only.
double qubit_excitation_prob(const std::vector<DriveTone>& tones, const SystemParams& params, int n, bool include_initial_kick,
                             double guard = kDefaultGuard);
// Sum over n = 0..n_max of p_{n,e} with the kick term.
double excitation_objective(const std::vector<DriveTone>& tones, const SystemParams& params, int n_max,
                            double guard = kDefaultGuard);

struct KickOperators {
    CompositeOperator g1;
    CompositeOperator g2;
};

KickOperators kick_operators(const std::vector<DriveTone>& tones, const SystemParams& params, double t,
                             double guard = kDefaultGuard);

struct CavityJump {
    CompositeOperator op;  // rate already folded into op
    std::string origin;
};

struct DephasingRates {
    Eigen::MatrixXcd gamma;  // (n1, n2), rad/us
    std::vector<double> p_excited;
    std::vector<CavityJump> jumps;
};

DephasingRates dephasing_rates(const std::vector<DriveTone>& tones, const SystemParams& params, const NoiseParams& noise,
                               int n_max, bool include_initial_kick = true, double guard = kDefaultGuard);

// order is 2 or 4, applied per channel.
TwoCavitySpectrum two_cavity_spectrum(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, int order = 4,
                                      double guard = kDefaultGuard);

}  // namespace pnd
