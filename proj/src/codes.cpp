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

#include "pnd/codes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pnd/error.hpp"

namespace pnd {

namespace {

QuantumState word(const std::vector<std::pair<int, double>>& weights, int n_cut, const std::string& label) {
    DenseVector v = DenseVector::Zero(n_cut + 1);
    for (const auto& [n, w] : weights) {
        if (n > n_cut) throw InvalidArgument("logical word exceeds n_cut");
        v(n) = w;
    }
    if (v.norm() == 0.0) throw InvalidArgument("logical word is empty");
    return {HilbertDims(label, n_cut + 1), v / v.norm()};
}

std::vector<std::pair<int, double>> rotation_word(const RotationSymmetric& r, bool one) {
    if (r.d_n < 1) throw InvalidArgument("unsupported d_n pattern: d_n must be >= 1");
    const auto& f = one ? r.f1 : r.f0;
    std::vector<std::pair<int, double>> w;
    for (size_t k = 0; k < f.size(); ++k) w.push_back({static_cast<int>((2 * k + (one ? 1 : 0)) * r.d_n), f[k]});
    return w;
}

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

QuantumState LogicalCode::zero(const std::string& label) const {
    if (std::holds_alternative<Kitten>(kind)) return word({{0, 1.0}, {4, 1.0}}, n_cut, label);
    return word(rotation_word(std::get<RotationSymmetric>(kind), false), n_cut, label);
}

QuantumState LogicalCode::one(const std::string& label) const {
    if (std::holds_alternative<Kitten>(kind)) return word({{2, 1.0}}, n_cut, label);
    return word(rotation_word(std::get<RotationSymmetric>(kind), true), n_cut, label);
}

QuantumState LogicalCode::logical(cplx a, cplx b, const std::string& label) const {
    QuantumState s = zero(label);
    s.amplitudes = a * s.amplitudes + b * one(label).amplitudes;
    return normalized(s);
}

BlockModel SnapGate::model(const NoiseParams& noise) const {
    BlockModel m = single_cavity_model(params, DriveSpec{}, noise);
    std::vector<double> nu(levels.size());
    for (size_t k = 0; k < levels.size(); ++k) {
        const int n = levels[k];
        nu[k] = -n * params.chi + 0.5 * params.chi_prime * n * (n - 1) + detuning[k];
    }
    const double om = omega, tg = t_g;
    const auto jumps = phase_jump;
    m.drives.clear();
    m.drives.push_back({sigma_minus().matrix, [nu, jumps, om, tg](double t) {
                            if (t < 0.0 || t > tg) return cplx(0.0);
                            const bool late = t >= 0.5 * tg;
                            cplx w = 0.0;
                            for (size_t k = 0; k < nu.size(); ++k) w += std::polar(om, nu[k] * t + (late ? jumps[k] : 0.0));
                            return w;
                        }});
    m.envelope = [tg](double t) { return (t >= 0.0 && t <= tg) ? 1.0 : 0.0; };
    return m;
}

std::vector<double> SnapGate::cavity_phases() const {
    std::vector<double> out(params.n_cut + 1, 0.0);
    for (size_t k = 0; k < levels.size(); ++k) out[levels[k]] = target_phase[k];
    return out;
}

namespace {

// Final |n, g> amplitude after the gate, relative to the undriven evolution.
cplx level_amplitude(const SnapGate& g, int n) {
    const BlockModel m = g.model();
    const int D = 2 * (g.params.n_cut + 1);
    DenseVector psi = DenseVector::Zero(D);
    psi(2 * n) = 1.0;
    PropagationConfig cfg;
    cfg.t_f = g.t_g;
    cfg.step = g.t_g / 4000.0;
    cfg.breakpoints = {0.5 * g.t_g};
    const QuantumState out = propagate_block_state(m, {m.full_dims(), psi}, cfg);
    return out.amplitudes(2 * n) * std::polar(1.0, -0.5 * g.params.kerr * n * (n - 1) * g.t_g);
}

}  // namespace

SnapGate snap_gate(const std::map<int, double>& phases, double t_g, const SystemParams& params, int calibration_passes) {
    params.validate();
    if (!(t_g > 0.0)) throw InvalidArgument("snap_gate: T_G must be positive");
    if (phases.empty()) throw InvalidArgument("snap_gate: no levels addressed");
    SnapGate g;
    g.params = params;
    g.t_g = t_g;
    g.omega = std::numbers::pi / t_g;
    if (g.omega > 0.1 * params.chi) {
        std::ostringstream os;
        os << "snap_gate: Rabi rate pi/T_G = " << g.omega << " rad/us is not small against chi";
        throw InvalidArgument(os.str());
    }
    for (const auto& [n, phi] : phases) {
        if (n < 0 || n > params.n_cut) throw InvalidArgument("snap_gate: addressed level outside 0..n_cut");
        g.levels.push_back(n);
        g.target_phase.push_back(phi);
    }
    const size_t L = g.levels.size();
    // Stark shift of level n's line from every other tone.
    g.detuning.assign(L, 0.0);
    for (size_t k = 0; k < L; ++k)
        for (size_t j = 0; j < L; ++j)
            if (j != k) g.detuning[k] += 2.0 * g.omega * g.omega / ((g.levels[k] - g.levels[j]) * params.chi);
    // An ideal resonant 2 pi cycle returns |g> with phase pi minus the jump.
    g.phase_jump.assign(L, 0.0);
    for (size_t k = 0; k < L; ++k) g.phase_jump[k] = wrap(std::numbers::pi - g.target_phase[k]);
    g.ground_population.assign(L, 0.0);
    g.phase_error.assign(L, 0.0);

    const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int pass = 0; pass < calibration_passes; ++pass) {
        for (size_t k = 0; k < L; ++k) {
            const int n = g.levels[k];
            auto excitation = [&](double d) {
                SnapGate trial = g;
                trial.detuning[k] = d;
                return 1.0 - std::norm(level_amplitude(trial, n));
            };
            double a = g.detuning[k] - 0.25 * g.omega, b = g.detuning[k] + 0.25 * g.omega;
            double c = b - gold * (b - a), d = a + gold * (b - a);
            double fc = excitation(c), fd = excitation(d);
            for (int it = 0; it < 24; ++it) {
                if (fc < fd) {
                    b = d, d = c, fd = fc;
                    c = b - gold * (b - a);
                    fc = excitation(c);
                } else {
                    a = c, c = d, fc = fd;
                    d = a + gold * (b - a);
                    fd = excitation(d);
                }
            }
            g.detuning[k] = 0.5 * (a + b);
        }
        for (size_t k = 0; k < L; ++k) {
            const int n = g.levels[k];
            const double ph0 = std::arg(level_amplitude(g, n));
            SnapGate probe = g;
            probe.phase_jump[k] += 0.2;
            const double slope = wrap(std::arg(level_amplitude(probe, n)) - ph0) / 0.2;
            if (std::abs(slope) < 0.1) throw ToleranceError("snap_gate: phase calibration lost sensitivity");
            g.phase_jump[k] = wrap(g.phase_jump[k] - wrap(ph0 - g.target_phase[k]) / slope);
        }
    }
    for (size_t k = 0; k < L; ++k) {
        const cplx a = level_amplitude(g, g.levels[k]);
        g.ground_population[k] = std::norm(a);
        g.phase_error[k] = wrap(std::arg(a) - g.target_phase[k]);
    }
    return g;
}

}  // namespace pnd
