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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnd/core.hpp"
#include "pnd/models.hpp"

namespace pnd {

struct PropagationConfig {
    double t_i = 0.0;
    double t_f = 0.0;
    double step = 0.0;                  // us, fixed
    std::vector<double> record_times;   // empty: record t_f only
    // When positive, step must not exceed 2 pi / (40 max_phase_rate).
    double max_phase_rate = 0.0;
    // Times where the drive may jump. Steps land on them; the last RK4 stage
    // of every step sees the left limit.
    std::vector<double> breakpoints;
};

// Default step T_M / 2000 and the matching phase-rate bound (n_cut + 1) chi.
PropagationConfig default_propagation(const std::vector<DriveTone>& tones, double chi, int n_cut, double t_i, double t_f);

using HamiltonianFn = std::function<DenseMatrix(double)>;

struct Jump {
    CompositeOperator op;
    double rate = 0.0;  // rad/us; the jump is sqrt(rate) * op
};
using JumpSet = std::vector<Jump>;

// Fixed-step classical RK4 on a dense state. Returns states at the record
// times. Throws ToleranceError when the norm drifts by more than 1e-8.
std::vector<QuantumState> propagate_state(const HamiltonianFn& h, const QuantumState& psi0, const PropagationConfig& config);

// Fixed-step RK4 on the dense master equation, Hermitian-symmetrised each
// step. Trace drift above 1e-6 or an eigenvalue below -1e-6 at a record time
// raises ToleranceError.
std::vector<DensityMatrix> propagate_lindblad(const HamiltonianFn& h, const DensityMatrix& rho0, const JumpSet& jumps,
                                              const PropagationConfig& config);

// A Hamiltonian that is block diagonal in the cavity Fock configuration:
// H = sum_c |c><c| (static_h[c] + sum_d a_d(t) op_d + h.c.) with qubit-local
// drives and jumps. Cavity loss couples block (c + e_j) to c.
struct BlockModel {
    struct Drive {
        DenseMatrix op;  // on the qubit register
        std::function<cplx(double)> amplitude;
    };
    struct QubitJump {
        DenseMatrix op;
        double rate = 0.0;
    };
    struct CavityJump {
        int mode = 0;
        double rate = 0.0;
    };

    HilbertDims cavity_dims;
    HilbertDims qubit_dims;  // may be empty (register of dimension 1)
    std::vector<DenseMatrix> static_h;
    std::vector<Drive> drives;
    std::vector<QubitJump> qubit_jumps;
    std::vector<CavityJump> cavity_jumps;
    std::function<double(double)> envelope;  // reported alongside traces only

    HilbertDims full_dims() const { return cavity_dims.concat(qubit_dims); }
    int n_configs() const { return cavity_dims.total_dim(); }
    int register_dim() const { return qubit_dims.total_dim(); }
};

// Bare-frame single-cavity model (cavity x qubit) with jumps sqrt(gamma_q)
// sigma_-, sqrt(gamma_phi) |e><e| and sqrt(kappa_a) a.
BlockModel single_cavity_model(const SystemParams& params, const DriveSpec& spec, const NoiseParams& noise);
// Bare-frame two-cavity, three-qubit model.
BlockModel two_cavity_model(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, const TwoCavityNoise& noise);
// Cavity alone with diagonal energies and loss.
BlockModel cavity_only_model(int n_cut, const std::vector<double>& energies, double kappa);

using StateObserver = std::function<void(double, const QuantumState&)>;
using DensityObserver = std::function<void(double, const DensityMatrix&)>;

QuantumState propagate_block_state(const BlockModel& model, const QuantumState& psi0, const PropagationConfig& config,
                                   const StateObserver& observe = {});
DensityMatrix propagate_block_lindblad(const BlockModel& model, const DensityMatrix& rho0, const PropagationConfig& config,
                                       const DensityObserver& observe = {});

// Discrete photon-loss jump on one cavity: a rho a^dag / tr(...).
DensityMatrix apply_cavity_loss(const DensityMatrix& rho, const std::string& cavity_label);

// Target-frame state sum_n c_n e^{-i E_n t} |n> for a cavity state.
QuantumState evolve_diagonal(const QuantumState& psi, const std::vector<double>& energies, double t);

struct FidelityTrace {
    std::vector<double> times;
    std::vector<double> fidelity;       // <psi_T|rho_c|psi_T>
    std::vector<double> root_fidelity;  // sqrt of the above
    std::vector<double> lambda;
};

// psi0 is a cavity state; the ancilla starts in |g>.
FidelityTrace fidelity_trace(const DriveSpec& drive, const SystemParams& params, const std::vector<double>& target_energies,
                             const QuantumState& psi0, const std::optional<NoiseParams>& noise, const PropagationConfig& config);

// Kitten-code recovery: parity projection, |3> -> |0_k>, |1> -> |1_k>, and
// anything else to the failure state (|0> - |4>)/sqrt(2).
std::vector<DenseMatrix> kitten_recovery_kraus(int cavity_dim);
DensityMatrix kitten_recovery(const DensityMatrix& rho, const std::string& cavity_label);

}  // namespace pnd
