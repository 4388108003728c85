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

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pnd/codes.hpp"
#include "pnd/core.hpp"
#include "pnd/dynamics.hpp"
#include "pnd/models.hpp"

namespace pnd {

struct SeriesTable {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct WignerSnapshot {
    double t = 0.0;
    WignerResult grid;
};

// Fidelities reported here are root fidelities sqrt(<psi_T|rho_c|psi_T>).
struct ExperimentReport {
    std::string name;
    nlohmann::json inputs;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<SeriesTable> series;  // series[0] is the primary time trace
    std::vector<WignerSnapshot> wigner;

    void add(const std::string& key, double value) { scalars.emplace_back(key, value); }
    double scalar(const std::string& key) const;
};

enum class Pi8Scheme { Pnd, Snap, QuarticKerr };

struct Pi8Config {
    Pi8Scheme scheme = Pi8Scheme::Pnd;
    bool smooth = false;                // PND only: sine envelope instead of abrupt
    SystemParams params;                // defaults to the Table V system
    std::vector<DriveTone> tones;       // defaults to Table V
    double g_r = 0.0;                   // rad/us; defaults to 20 kHz
    double t_g = 0.0;                   // us; defaults to 16 pi / chi
    NoiseParams qubit_noise;            // kappa_a ignored; defaults to gamma_q = 3 kHz
    std::vector<double> kappa_scan;     // rad/us
    bool recovery = true;
    int samples = 200;
    int steps_per_period = 2000;
    int threads = 1;

    static Pi8Config defaults(Pi8Scheme scheme, bool smooth = false);
};
ExperimentReport pi8_gate_experiment(const Pi8Config& config);

struct ThetaScanConfig {
    SystemParams params;
    std::vector<DriveTone> tones;
    double g_r = 0.0;
    double gamma_q = 0.0, gamma_phi = 0.0;
    std::vector<double> theta;     // rad; T_G = (4 theta / pi) T_G*
    std::vector<double> tg_scale;  // T_G = s T_G*, Omega / sqrt(s)
    int steps_per_period = 2000;
    int threads = 1;

    static ThetaScanConfig defaults();
};
// Sine-envelope gates from the Table V drive; relaxation, dephasing and both.
ExperimentReport theta_scaling_experiment(const ThetaScanConfig& config);

struct KerrCancelConfig {
    SystemParams params;  // defaults to the Table VII system
    std::vector<DriveTone> tones;
    double alpha = 1.4142135623730951;
    double duration = 100.0;
    bool smooth = false;
    double ramp = 2.5;
    NoiseParams noise;  // qubit noise for the comparison run
    std::vector<double> check_times;
    std::vector<double> wigner_times;
    WignerGrid grid;
    double sample = 0.0;  // us; defaults to T_M / 20
    int steps_per_period = 2000;
    int threads = 1;

    static KerrCancelConfig defaults();
};
ExperimentReport kerr_cancel_experiment(const KerrCancelConfig& config);

struct CphaseConfig {
    TwoCavityParams params;
    std::vector<DriveSpec> drives;  // defaults to Tables IX, X, XI
    double g_cr = 0.0;              // defaults to 20 kHz
    bool smooth = false;
    double gamma_q = 0.0;           // each qubit
    std::vector<double> kappa_scan; // both cavities
    bool recovery = true;
    int samples = 50;
    int steps_per_period = 2000;
    int threads = 1;

    static CphaseConfig defaults();
};
ExperimentReport cphase_experiment(const CphaseConfig& config);

struct CustomConfig {
    SystemParams params;
    DriveSpec drive;
    std::vector<double> target;  // total bare-frame cavity energies; empty: order 4 minus bare Kerr
    QuantumState psi0;           // cavity state
    NoiseParams noise;
    double duration = 0.0;
    int samples = 200;
    int steps_per_period = 2000;
};
ExperimentReport custom_experiment(const CustomConfig& config);

// Kitten (|0_k> + |1_k>) / sqrt(2).
QuantumState kitten_plus(int n_cut, const std::string& label = "cavity");

// Phase of |n, g> accumulated between t = T_M and (1 + periods) T_M, turned
// into an energy and with the bare Kerr removed. Comparable to E_n.
double stroboscopic_energy(const SystemParams& params, const std::vector<DriveTone>& tones, int n, int periods = 20);

struct MicromotionResult {
    double t_m = 0.0;
    double detected_period = 0.0;
    std::vector<double> scales;
    std::vector<double> amplitudes;
    double slope = 0.0;
};
// Abrupt drive with tones scaled by each factor, target the order-4 spectrum.
MicromotionResult micromotion_analysis(const SystemParams& params, const std::vector<DriveTone>& tones, const QuantumState& psi0,
                                       const std::vector<double>& scales, int periods = 4, int samples_per_period = 400);

// Decay rate of |rho_{n1 n2}| fitted at multiples of T_M from a Lindblad
// run, and Re gamma_{n1 n2} from the analytic rates. `smooth` ramps the drive
// on over 4 T_M (no kick) and fits after the ramp.
struct CoherenceDecay {
    double simulated = 0.0;
    double analytic = 0.0;
};
CoherenceDecay coherence_decay(const SystemParams& params, const std::vector<DriveTone>& tones, const NoiseParams& noise, int n1,
                               int n2, int periods = 100, bool smooth = false);

// Gate with one photon removed at time t_loss, then recovery; root fidelity
// against the ideal logical gate.
double loss_injection_fidelity(const SystemParams& params, const DriveSpec& drive, const std::vector<double>& target,
                               double t_g, double t_loss);

}  // namespace pnd
