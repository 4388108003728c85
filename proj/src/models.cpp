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

#include "pnd/models.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pnd/error.hpp"
#include "pnd/units.hpp"

namespace pnd {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidArgument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        size_t used = 0;
        if (slash == std::string::npos) {
            long long p = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing");
            return Rational(p, 1);
        }
        std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        long long p = std::stoll(a, &used);
        if (used != a.size()) throw std::invalid_argument("trailing");
        long long q = std::stoll(b, &used);
        if (used != b.size()) throw std::invalid_argument("trailing");
        return Rational(p, q);
    } catch (const std::logic_error&) {
        throw InvalidArgument("cannot parse rational '" + text + "'");
    }
}

Rational operator+(Rational a, Rational b) { return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_); }
Rational operator-(Rational a, Rational b) { return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_); }
Rational operator*(Rational a, Rational b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }

Rational rational_gcd(const std::vector<Rational>& values) {
    // gcd(p_i/q_i) = gcd(p_i * L/q_i) / L with L = lcm(q_i).
    std::int64_t L = 1;
    bool any = false;
    for (const auto& v : values) {
        if (v.is_zero()) continue;
        L = std::lcm(L, v.den());
        any = true;
    }
    if (!any) throw InvalidArgument("rational_gcd: all values are zero");
    std::int64_t g = 0;
    for (const auto& v : values) {
        if (v.is_zero()) continue;
        g = std::gcd(g, std::abs(v.num() * (L / v.den())));
    }
    return Rational(g, L);
}

SystemParams SystemParams::from_mhz(double chi_mhz, double kerr_mhz, double chi_prime_mhz, int n_cut) {
    SystemParams p;
    p.chi = units::from_mhz(chi_mhz);
    p.kerr = units::from_mhz(kerr_mhz);
    p.chi_prime = units::from_mhz(chi_prime_mhz);
    p.n_cut = n_cut;
    return p;
}

void SystemParams::validate() const {
    if (!(chi > 0.0)) throw InvalidArgument("chi must be positive");
    if (n_cut < 1) throw InvalidArgument("n_cut must be >= 1");
    if (std::abs(kerr) > chi / 10.0) warn("|K| exceeds chi/10; dispersive model may be inaccurate");
    if (std::abs(chi_prime) > chi / 10.0) warn("|chi'| exceeds chi/10; dispersive model may be inaccurate");
}

void TwoCavityParams::validate() const {
    if (!(chi_a > 0.0 && chi_b > 0.0 && chi_c > 0.0)) throw InvalidArgument("two-cavity chi values must be positive");
    if (n_cut_a < 1 || n_cut_b < 1) throw InvalidArgument("two-cavity n_cut must be >= 1");
}

void DriveSpec::validate(double chi, double ratio_limit) const {
    for (size_t i = 0; i < tones.size(); ++i) {
        for (size_t j = 0; j < i; ++j) {
            if (tones[i].m == tones[j].m && tones[i].delta == tones[j].delta) {
                throw InvalidArgument("drive has two tones with m=" + std::to_string(tones[i].m) + " and delta=" +
                                      tones[i].delta.str());
            }
        }
        const double d = tones[i].delta.value() * chi;
        const double room = std::min(std::abs(d), std::abs(chi - d));
        if (room > 0.0 && std::abs(tones[i].omega) > ratio_limit * room) {
            std::ostringstream os;
            os << "tone m=" << tones[i].m << " has |Omega|/min(|delta|,|chi-delta|) = " << std::abs(tones[i].omega) / room
               << " above " << ratio_limit;
            warn(os.str());
        }
    }
}

void NoiseParams::validate() const {
    if (gamma_q < 0.0 || gamma_phi < 0.0 || kappa_a < 0.0) throw InvalidArgument("noise rates must be non-negative");
}

double ramp_lambda_s() { return (std::sqrt(46.0) - 1.0) / 5.0; }

namespace {

struct EnvelopeVisitor {
    double t;
    double operator()(const Abrupt& e) const { return (t >= e.t_i && t <= e.t_f) ? 1.0 : 0.0; }
    double operator()(const SineGate& e) const {
        if (t < 0.0 || t > e.t_g) return 0.0;
        return std::sqrt(2.0) * std::sin(std::numbers::pi * t / e.t_g);
    }
    double operator()(const RampUpDown& e) const {
        if (t < e.t_i || t > e.t_f) return 0.0;
        const double ls = ramp_lambda_s();
        const double w = std::numbers::pi / (2.0 * e.t_s);
        const double up = t - e.t_i;
        const double down = e.t_f - t;
        // Ramp down mirrors ramp up about the end of the window.
        const double s = std::min(up, down);
        if (s <= e.t_s) return ls * std::sin(w * s);
        if (s <= 3.0 * e.t_s) return 0.5 * (ls - 1.0) * std::sin(w * s) + 0.5 * (ls + 1.0);
        return 1.0;
    }
};

}  // namespace

double envelope_value(const Envelope& env, double t) { return std::visit(EnvelopeVisitor{t}, env); }

std::pair<double, double> envelope_support(const Envelope& env) {
    return std::visit(
        [](const auto& e) -> std::pair<double, double> {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Abrupt>) return {e.t_i, e.t_f};
            if constexpr (std::is_same_v<T, SineGate>) return {0.0, e.t_g};
            if constexpr (std::is_same_v<T, RampUpDown>) return {e.t_i, e.t_f};
        },
        env);
}

DispersiveConstants jc_to_dispersive(const JCParams& jc) {
    const double g = jc.g, D = jc.delta_qa, a = jc.alpha;
    const double scale = std::abs(D) + std::abs(a);
    if (scale == 0.0) throw ResonanceError("jc_to_dispersive: Delta and alpha both zero");
    const double poles[] = {D, D + a, a + 2.0 * D, 3.0 * a + 2.0 * D};
    const char* names[] = {"Delta", "Delta + alpha", "alpha + 2 Delta", "3 alpha + 2 Delta"};
    for (int k = 0; k < 4; ++k) {
        if (std::abs(poles[k]) < 1e-6 * scale) throw ResonanceError(std::string("jc_to_dispersive: pole at ") + names[k] + " = 0");
    }
    if (std::abs(g) > std::abs(D) / 5.0) warn("jc_to_dispersive: |g| exceeds |Delta|/5; expansion may be poor");
    const double g2 = g * g, g4 = g2 * g2;
    const double D3 = D * D * D, Da = D + a, Da3 = Da * Da * Da;
    DispersiveConstants out;
    out.chi = 2.0 * g2 * a / (D * Da) - 4.0 * g4 * a * (a * a + 2.0 * a * D + 2.0 * D * D) / (D3 * Da3);
    out.kerr = 2.0 * g4 * a / (D3 * (a + 2.0 * D));
    out.chi_prime = 4.0 * g4 * a * a * (3.0 * a * a * a + 11.0 * a * a * D + 15.0 * a * D * D + 9.0 * D3) /
                    (D3 * Da3 * (a + 2.0 * D) * (3.0 * a + 2.0 * D));
    return out;
}

double tone_frequency(const DriveTone& tone, double chi) { return (tone.delta.value() - tone.m) * chi; }

cplx drive_amplitude(const std::vector<DriveTone>& tones, const Envelope& env, double chi, double t) {
    const double lam = envelope_value(env, t);
    if (lam == 0.0) return 0.0;
    cplx w = 0.0;
    for (const auto& tone : tones) w += tone.omega * std::polar(1.0, tone_frequency(tone, chi) * t);
    return lam * w;
}

CompositeOperator interaction_drive_hamiltonian(const SystemParams& params, const DriveSpec& spec, double t) {
    const int N = params.n_cut;
    HilbertDims dims({{"cavity", N + 1}, {"qubit", 2}});
    DenseMatrix h = DenseMatrix::Zero(dims.total_dim(), dims.total_dim());
    const double lam = envelope_value(spec.envelope, t);
    if (lam != 0.0) {
        for (int n = 0; n <= N; ++n) {
            cplx w = 0.0;
            for (const auto& tone : spec.tones) {
                const double phase = ((n - tone.m) * params.chi + tone.delta.value() * params.chi -
                                      0.5 * params.chi_prime * n * (n - 1)) * t;
                w += tone.omega * std::polar(1.0, phase);
            }
            h(2 * n, 2 * n + 1) = lam * w;
            h(2 * n + 1, 2 * n) = std::conj(lam * w);
        }
    }
    return {dims, h};
}

CompositeOperator bare_frame_hamiltonian(const SystemParams& params, const DriveSpec& spec, double t) {
    const int N = params.n_cut;
    HilbertDims dims({{"cavity", N + 1}, {"qubit", 2}});
    DenseMatrix h = DenseMatrix::Zero(dims.total_dim(), dims.total_dim());
    const cplx w = drive_amplitude(spec.tones, spec.envelope, params.chi, t);
    for (int n = 0; n <= N; ++n) {
        const double kerr = -0.5 * params.kerr * n * (n - 1);
        h(2 * n, 2 * n) = kerr;
        h(2 * n + 1, 2 * n + 1) = kerr - n * params.chi + 0.5 * params.chi_prime * n * (n - 1);
        h(2 * n, 2 * n + 1) = w;
        h(2 * n + 1, 2 * n) = std::conj(w);
    }
    return {dims, h};
}

HilbertDims two_cavity_dims(const TwoCavityParams& params) {
    return HilbertDims({{"cavity_a", params.n_cut_a + 1},
                        {"cavity_b", params.n_cut_b + 1},
                        {"qubit_a", 2},
                        {"qubit_b", 2},
                        {"qubit_c", 2}});
}

double two_cavity_chi(const TwoCavityParams& params, const std::string& qubit) {
    if (qubit == "a") return params.chi_a;
    if (qubit == "b") return params.chi_b;
    if (qubit == "c") return params.chi_c;
    throw InvalidArgument("two-cavity drive must target qubit a, b or c (got '" + qubit + "')");
}

namespace {

int qubit_bit(const std::string& q) { return q == "a" ? 2 : (q == "b" ? 1 : 0); }

// Photon number seen by a qubit channel.
int channel_n(const std::string& q, int na, int nb) { return q == "a" ? na : (q == "b" ? nb : na + nb); }

void check_distinct_targets(const std::vector<DriveSpec>& specs) {
    for (size_t i = 0; i < specs.size(); ++i) {
        for (size_t j = 0; j < i; ++j) {
            if (specs[i].target_qubit == specs[j].target_qubit) {
                throw InvalidArgument("two drives target the same qubit '" + specs[i].target_qubit + "'");
            }
        }
    }
}

DenseMatrix two_cavity_matrix(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, double t, bool interaction) {
    check_distinct_targets(specs);
    const int Na = params.n_cut_a + 1, Nb = params.n_cut_b + 1;
    const int D = Na * Nb * 8;
    DenseMatrix h = DenseMatrix::Zero(D, D);
    for (int na = 0; na < Na; ++na) {
        for (int nb = 0; nb < Nb; ++nb) {
            const int base = (na * Nb + nb) * 8;
            if (!interaction) {
                for (int r = 0; r < 8; ++r) {
                    double e = 0.0;
                    if (r & 4) e -= params.chi_a * na;
                    if (r & 2) e -= params.chi_b * nb;
                    if (r & 1) e -= params.chi_c * (na + nb);
                    h(base + r, base + r) = e;
                }
            }
            for (const auto& spec : specs) {
                const double chi = two_cavity_chi(params, spec.target_qubit);
                const int bit = 1 << qubit_bit(spec.target_qubit);
                cplx w;
                if (interaction) {
                    const int n = channel_n(spec.target_qubit, na, nb);
                    const double lam = envelope_value(spec.envelope, t);
                    w = 0.0;
                    for (const auto& tone : spec.tones) {
                        w += tone.omega * std::polar(1.0, ((n - tone.m) * chi + tone.delta.value() * chi) * t);
                    }
                    w *= lam;
                } else {
                    w = drive_amplitude(spec.tones, spec.envelope, chi, t);
                }
                // |g><e| on the addressed qubit, identity on the others.
                for (int r = 0; r < 8; ++r) {
                    if (r & bit) continue;
                    h(base + r, base + (r | bit)) += w;
                    h(base + (r | bit), base + r) += std::conj(w);
                }
            }
        }
    }
    return h;
}

}  // namespace

CompositeOperator two_cavity_drive_hamiltonian(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, double t) {
    return {two_cavity_dims(params), two_cavity_matrix(params, specs, t, true)};
}

CompositeOperator two_cavity_bare_hamiltonian(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, double t) {
    return {two_cavity_dims(params), two_cavity_matrix(params, specs, t, false)};
}

}  // namespace pnd
