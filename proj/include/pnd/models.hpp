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
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "pnd/core.hpp"

namespace pnd {

// Exact rational p/q with q > 0 and gcd(p, q) = 1.
class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const { return num_ == 0; }
    std::string str() const;
    // Accepts "p/q", "p" or "-p/q".
    static Rational parse(const std::string& text);

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend auto operator<=>(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Largest r such that every input is an integer multiple of r. Zeros ignored.
Rational rational_gcd(const std::vector<Rational>& values);

// Dispersive model constants, angular frequencies in rad/us.
struct SystemParams {
    double chi = 0.0;
    double kerr = 0.0;
    double chi_prime = 0.0;
    int n_cut = 6;

    static SystemParams from_mhz(double chi_mhz, double kerr_mhz = 0.0, double chi_prime_mhz = 0.0, int n_cut = 6);
    // Throws on chi <= 0 or n_cut < 1, warns when |K| or |chi'| exceed chi/10.
    void validate() const;
};

struct TwoCavityParams {
    double chi_a = 0.0, chi_b = 0.0, chi_c = 0.0;
    int n_cut_a = 4, n_cut_b = 4;
    void validate() const;
};

// One drive component. omega in rad/us; delta in units of the addressed
// qubit's chi, so the tone sits at (delta - m) chi from the bare qubit line.
struct DriveTone {
    int m = 0;
    cplx omega = 0.0;
    Rational delta;
};

struct Abrupt {
    double t_i = 0.0;
    double t_f = std::numeric_limits<double>::infinity();
};

struct SineGate {
    double t_g = 0.0;
};

struct RampUpDown {
    double t_s = 0.0;
    double t_i = 0.0;
    double t_f = 0.0;
};

using Envelope = std::variant<Abrupt, SineGate, RampUpDown>;

struct DriveSpec {
    std::vector<DriveTone> tones;
    Envelope envelope = Abrupt{};
    std::string target_qubit = "q";

    // Duplicate (m, delta) pairs are rejected; amplitudes above
    // ratio_limit * min(|delta|, |chi - delta|) are flagged.
    void validate(double chi, double ratio_limit = 0.35) const;
};

struct JCParams {
    double g = 0.0;
    double delta_qa = 0.0;  // omega_a - omega_q
    double alpha = 0.0;     // anharmonicity, positive for a transmon
};

struct DispersiveConstants {
    double chi = 0.0;
    double kerr = 0.0;
    double chi_prime = 0.0;
};

// Rates in rad/us: a jump sqrt(gamma) L with gamma = 2 pi (gamma / 2 pi).
struct NoiseParams {
    double gamma_q = 0.0;
    double gamma_phi = 0.0;
    double kappa_a = 0.0;
    void validate() const;
};

struct TwoCavityNoise {
    double gamma_q[3] = {0.0, 0.0, 0.0};    // qubits a, b, c
    double gamma_phi[3] = {0.0, 0.0, 0.0};
    double kappa_a = 0.0;
    double kappa_b = 0.0;
};

// (sqrt(46) - 1) / 5: keeps the ramped phase equal to an abrupt drive.
double ramp_lambda_s();
double envelope_value(const Envelope& env, double t);
// Support [start, end] of the envelope (end may be infinite).
std::pair<double, double> envelope_support(const Envelope& env);

// Output is in the same unit as the input (ratios make this safe).
DispersiveConstants jc_to_dispersive(const JCParams& jc);

// Angular frequency of a tone relative to the bare qubit line: (delta - m) chi.
double tone_frequency(const DriveTone& tone, double chi);
// lambda(t) * sum_m Omega_m e^{i (delta_m - m chi) t}: the |g><e| coefficient
// in the frame rotating at the bare cavity and qubit frequencies.
cplx drive_amplitude(const std::vector<DriveTone>& tones, const Envelope& env, double chi, double t);

// Interaction-picture drive on cavity (n_cut + 1) x qubit. Phases
// (n - m) chi + delta_m - chi' n (n - 1) / 2, times the envelope.
CompositeOperator interaction_drive_hamiltonian(const SystemParams& params, const DriveSpec& spec, double t);

// Static dispersive terms plus drive in the frame rotating at the bare
// cavity and qubit frequencies. Coincides with the interaction picture at
// multiples of the micromotion period; used by all simulations.
CompositeOperator bare_frame_hamiltonian(const SystemParams& params, const DriveSpec& spec, double t);

// Subsystem order: cavity_a, cavity_b, qubit_a, qubit_b, qubit_c. `specs`
// address qubits by target_qubit in {"a", "b", "c"}.
HilbertDims two_cavity_dims(const TwoCavityParams& params);
CompositeOperator two_cavity_drive_hamiltonian(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, double t);
CompositeOperator two_cavity_bare_hamiltonian(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, double t);
double two_cavity_chi(const TwoCavityParams& params, const std::string& qubit);

}  // namespace pnd
