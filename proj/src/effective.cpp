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

#include "pnd/effective.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pnd/error.hpp"
#include "pnd/units.hpp"

namespace pnd {

namespace {

// (n - m) chi + delta_m chi - chi' n (n - 1) / 2
double denominator(double chi, double chi_prime, const DriveTone& tone, int n) {
    return (n - tone.m) * chi + tone.delta.value() * chi - 0.5 * chi_prime * n * (n - 1);
}

double checked_denominator(double chi, double chi_prime, const DriveTone& tone, int n, double guard) {
    const double d = denominator(chi, chi_prime, tone, n);
    if (std::abs(d) < guard * chi) {
        std::ostringstream os;
        os << "near resonance at (n=" << n << ", m=" << tone.m << "): denominator " << d / chi << " chi is below the guard "
           << guard << " chi";
        throw ResonanceError(os.str());
    }
    return d;
}

int resolve_n_max(const SystemParams& params, int n_max) { return n_max < 0 ? params.n_cut : n_max; }

// Tone frequencies relative to the bare qubit line, as exact integers over a
// common denominator so the phase-matching test is exact.
std::vector<std::int64_t> scaled_frequencies(const std::vector<DriveTone>& tones) {
    std::int64_t L = 1;
    for (const auto& t : tones) L = std::lcm(L, t.delta.den());
    std::vector<std::int64_t> f;
    for (const auto& t : tones) f.push_back(t.delta.num() * (L / t.delta.den()) - static_cast<std::int64_t>(t.m) * L);
    return f;
}

struct Quad {
    int a, b, c, d;
};

// Phase-matched quadruples nu_a + nu_c = nu_b + nu_d with a != b, excluding
// the trivially matched a == d, b == c pattern (already in the second sum).
std::vector<Quad> matched_quadruples(const std::vector<DriveTone>& tones) {
    const auto f = scaled_frequencies(tones);
    const int M = static_cast<int>(tones.size());
    std::vector<Quad> out;
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            if (a == b) continue;
            for (int c = 0; c < M; ++c)
                for (int d = 0; d < M; ++d) {
                    if (a == d && b == c) continue;
                    if (f[a] + f[c] == f[b] + f[d]) out.push_back({a, b, c, d});
                }
        }
    return out;
}

void check_pair_guard(const std::vector<DriveTone>& tones, double chi, double guard) {
    for (size_t a = 0; a < tones.size(); ++a)
        for (size_t b = 0; b < a; ++b) {
            const double d = tone_frequency(tones[a], chi) - tone_frequency(tones[b], chi);
            if (std::abs(d) < guard * chi) {
                std::ostringstream os;
                os << "tones m=" << tones[a].m << " and m=" << tones[b].m << " are " << d / chi
                   << " chi apart, below the guard " << guard << " chi";
                throw ResonanceError(os.str());
            }
        }
}

double order4_with_quads(double chi, double chi_prime, const std::vector<DriveTone>& tones, const std::vector<Quad>& quads,
                         int n, double guard) {
    const int M = static_cast<int>(tones.size());
    std::vector<double> phi(M), nu(M), w(M);
    for (int k = 0; k < M; ++k) {
        phi[k] = checked_denominator(chi, chi_prime, tones[k], n, guard);
        nu[k] = tone_frequency(tones[k], chi);
        w[k] = std::norm(tones[k].omega);
    }
    double e = 0.0;
    for (int a = 0; a < M; ++a) {
        for (int b = 0; b < M; ++b) {
            e -= w[a] * w[b] / (phi[a] * phi[a] * phi[b]);
            if (a != b) e += w[a] * w[b] / (phi[a] * phi[a] * (nu[a] - nu[b]));
        }
    }
    cplx q = 0.0;
    for (const auto& k : quads) {
        q += std::conj(tones[k.a].omega) * tones[k.b].omega * std::conj(tones[k.c].omega) * tones[k.d].omega /
             (phi[k.a] * (nu[k.a] - nu[k.b]) * phi[k.d]);
    }
    return e + q.real();
}

}  // namespace

double order2_energy(double chi, double chi_prime, const std::vector<DriveTone>& tones, int n, double guard) {
    double e = 0.0;
    for (const auto& tone : tones) e += std::norm(tone.omega) / checked_denominator(chi, chi_prime, tone, n, guard);
    return e;
}

double order4_correction(double chi, double chi_prime, const std::vector<DriveTone>& tones, int n, double guard) {
    check_pair_guard(tones, chi, guard);
    return order4_with_quads(chi, chi_prime, tones, matched_quadruples(tones), n, guard);
}

EngineeredSpectrum spectrum_order2(const SystemParams& params, const std::vector<DriveTone>& tones, double guard, int n_max) {
    EngineeredSpectrum s{{}, 2, params};
    const int nm = resolve_n_max(params, n_max);
    for (int n = 0; n <= nm; ++n) s.energies.push_back(order2_energy(params.chi, params.chi_prime, tones, n, guard));
    return s;
}

EngineeredSpectrum spectrum_order4(const SystemParams& params, const std::vector<DriveTone>& tones, double guard, int n_max) {
    EngineeredSpectrum s{{}, 4, params};
    const int nm = resolve_n_max(params, n_max);
    check_pair_guard(tones, params.chi, guard);
    const auto quads = matched_quadruples(tones);
    for (int n = 0; n <= nm; ++n) {
        s.energies.push_back(order2_energy(params.chi, params.chi_prime, tones, n, guard) +
                             order4_with_quads(params.chi, params.chi_prime, tones, quads, n, guard));
    }
    return s;
}

Rational micromotion_gcd(const std::vector<DriveTone>& tones) {
    std::vector<Rational> v{Rational(1)};
    for (const auto& t : tones) v.push_back(t.delta);
    return rational_gcd(v);
}

double micromotion_period(const std::vector<DriveTone>& tones, double chi) {
    if (!(chi > 0.0)) throw InvalidArgument("micromotion_period: chi must be positive");
    return 2.0 * std::numbers::pi / (micromotion_gcd(tones).value() * chi);
}

EngineeredSpectrum floquet_spectrum(const SystemParams& params, const std::vector<DriveTone>& tones, int n_max,
                                    int steps_per_period) {
    EngineeredSpectrum s{{}, 0, params};
    const int nm = resolve_n_max(params, n_max);
    const double T = micromotion_period(tones, params.chi);
    const double h = T / steps_per_period;
    const Envelope env = Abrupt{};
    for (int n = 0; n <= nm; ++n) {
        // Kerr is common to g and e and is left out, so the quasi-energy is E_n.
        const double ee = -n * params.chi + 0.5 * params.chi_prime * n * (n - 1);
        auto rhs = [&](double t, const Eigen::Matrix2cd& U) {
            const cplx w = drive_amplitude(tones, env, params.chi, t);
            Eigen::Matrix2cd H;
            H << 0.0, w, std::conj(w), ee;
            return Eigen::Matrix2cd(cplx(0, -1) * H * U);
        };
        Eigen::Matrix2cd U = Eigen::Matrix2cd::Identity();
        for (int k = 0; k < steps_per_period; ++k) {
            const double t = k * h;
            Eigen::Matrix2cd k1 = rhs(t, U);
            Eigen::Matrix2cd k2 = rhs(t + h / 2, U + h / 2 * k1);
            Eigen::Matrix2cd k3 = rhs(t + h / 2, U + h / 2 * k2);
            Eigen::Matrix2cd k4 = rhs(t + h, U + h * k3);
            U += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(U);
        int pick = std::abs(es.eigenvectors()(0, 0)) >= std::abs(es.eigenvectors()(0, 1)) ? 0 : 1;
        s.energies.push_back(-std::arg(es.eigenvalues()(pick)) / T);
    }
    return s;
}

double qubit_excitation_prob(const std::vector<DriveTone>& tones, const SystemParams& params, int n, bool include_initial_kick,
                             double guard) {
    double p = 0.0;
    cplx sum = 0.0;
    for (const auto& tone : tones) {
        const cplx r = tone.omega / checked_denominator(params.chi, params.chi_prime, tone, n, guard);
        p += std::norm(r);
        sum += r;
    }
    return include_initial_kick ? p + std::norm(sum) : p;
}

double excitation_objective(const std::vector<DriveTone>& tones, const SystemParams& params, int n_max, double guard) {
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) total += qubit_excitation_prob(tones, params, n, true, guard);
    return total;
}

KickOperators kick_operators(const std::vector<DriveTone>& tones, const SystemParams& params, double t, double guard) {
    const int N = params.n_cut;
    HilbertDims dims({{"cavity", N + 1}, {"qubit", 2}});
    DenseMatrix g1 = DenseMatrix::Zero(dims.total_dim(), dims.total_dim());
    DenseMatrix g2 = DenseMatrix::Zero(dims.total_dim(), dims.total_dim());
    const double chi = params.chi;
    check_pair_guard(tones, chi, guard);
    for (int n = 0; n <= N; ++n) {
        cplx x = 0.0;
        double z = 0.0;
        for (size_t a = 0; a < tones.size(); ++a) {
            const double phi = checked_denominator(chi, params.chi_prime, tones[a], n, guard);
            x += tones[a].omega * std::polar(1.0, phi * t) / cplx(0.0, phi);
            for (size_t b = 0; b < tones.size(); ++b) {
                if (a == b) continue;
                const double dab = tone_frequency(tones[a], chi) - tone_frequency(tones[b], chi);
                const cplx num = tones[a].omega * std::conj(tones[b].omega) * std::polar(1.0, dab * t);
                // (X - X^*) / (2i) = Im X
                z -= num.imag() / (phi * dab);
            }
        }
        // |n,g><n,e| coefficient x plus its adjoint
        g1(2 * n, 2 * n + 1) = x;
        g1(2 * n + 1, 2 * n) = std::conj(x);
        g2(2 * n, 2 * n) = -z;
        g2(2 * n + 1, 2 * n + 1) = z;
    }
    return {{dims, g1}, {dims, g2}};
}

DephasingRates dephasing_rates(const std::vector<DriveTone>& tones, const SystemParams& params, const NoiseParams& noise,
                               int n_max, bool include_initial_kick, double guard) {
    noise.validate();
    if (n_max < 0 || n_max > params.n_cut) throw InvalidArgument("dephasing_rates: n_max must lie in [0, n_cut]");
    const int N = params.n_cut;
    DephasingRates out;
    std::vector<cplx> S(n_max + 1, 0.0);
    std::vector<double> q(n_max + 1, 0.0);
    std::vector<std::vector<cplx>> r(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        for (const auto& tone : tones) {
            const cplx x = tone.omega / checked_denominator(params.chi, params.chi_prime, tone, n, guard);
            r[n].push_back(x);
            S[n] += x;
            q[n] += std::norm(x);
        }
        out.p_excited.push_back(q[n] + (include_initial_kick ? std::norm(S[n]) : 0.0));
    }
    const double gp = noise.gamma_phi, gq = noise.gamma_q;
    out.gamma = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    for (int a = 0; a <= n_max; ++a)
        for (int b = 0; b <= n_max; ++b) {
            cplx g = 0.5 * (gp + gq) * (out.p_excited[a] + out.p_excited[b]);
            if (include_initial_kick) g -= gp * std::conj(S[a]) * S[b];
            out.gamma(a, b) = g;
        }
    // Effective cavity jump operators; each diagonal in Fock space.
    HilbertDims dims("cavity", N + 1);
    auto diag_jump = [&](const std::vector<cplx>& l, const std::string& origin) {
        DenseMatrix m = DenseMatrix::Zero(N + 1, N + 1);
        for (int n = 0; n <= n_max; ++n) m(n, n) = l[n];
        out.jumps.push_back({{dims, m}, origin});
    };
    for (size_t k = 0; k < tones.size(); ++k) {
        for (int n = 0; n <= n_max; ++n) {
            std::vector<cplx> l(n_max + 1, 0.0);
            if (gp > 0.0) {
                l[n] = std::sqrt(gp) * std::conj(r[n][k]);
                diag_jump(l, "dephasing, tone " + std::to_string(k) + ", n=" + std::to_string(n));
            }
            if (gq > 0.0) {
                l[n] = std::sqrt(gq) * std::conj(r[n][k]);
                diag_jump(l, "relaxation, tone " + std::to_string(k) + ", n=" + std::to_string(n));
            }
        }
    }
    if (include_initial_kick) {
        if (gp > 0.0) {
            std::vector<cplx> l(n_max + 1);
            for (int n = 0; n <= n_max; ++n) l[n] = std::sqrt(gp) * std::conj(S[n]);
            diag_jump(l, "dephasing, kick");
        }
        if (gq > 0.0) {
            for (int n = 0; n <= n_max; ++n) {
                std::vector<cplx> l(n_max + 1, 0.0);
                l[n] = std::sqrt(gq) * std::conj(S[n]);
                diag_jump(l, "relaxation, kick, n=" + std::to_string(n));
            }
        }
    }
    return out;
}

TwoCavitySpectrum two_cavity_spectrum(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, int order,
                                      double guard) {
    params.validate();
    if (order != 2 && order != 4) throw InvalidArgument("two_cavity_spectrum: order must be 2 or 4");
    TwoCavitySpectrum out;
    out.order = order;
    out.e_a.assign(params.n_cut_a + 1, 0.0);
    out.e_b.assign(params.n_cut_b + 1, 0.0);
    out.e_c.assign(params.n_cut_a + params.n_cut_b + 1, 0.0);
    for (size_t i = 0; i < specs.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (specs[i].target_qubit == specs[j].target_qubit) throw InvalidArgument("two drives target the same qubit");
    for (const auto& spec : specs) {
        const double chi = two_cavity_chi(params, spec.target_qubit);
        std::vector<double>& e = spec.target_qubit == "a" ? out.e_a : (spec.target_qubit == "b" ? out.e_b : out.e_c);
        try {
            for (size_t n = 0; n < e.size(); ++n) {
                e[n] = order2_energy(chi, 0.0, spec.tones, static_cast<int>(n), guard);
                if (order == 4) e[n] += order4_correction(chi, 0.0, spec.tones, static_cast<int>(n), guard);
            }
        } catch (const ResonanceError& err) {
            throw ResonanceError("qubit " + spec.target_qubit + ": " + err.what());
        }
    }
    out.energies.resize(params.n_cut_a + 1, params.n_cut_b + 1);
    for (int a = 0; a <= params.n_cut_a; ++a)
        for (int b = 0; b <= params.n_cut_b; ++b) out.energies(a, b) = out.e_a[a] + out.e_b[b] + out.e_c[a + b];
    return out;
}

}  // namespace pnd
