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

#include "pnd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pnd/error.hpp"
#include "pnd/parallel.hpp"
#include "pnd/units.hpp"

namespace pnd {

namespace {

std::vector<double> zrotation_pattern(double g, int d, int n_max) {
    if (d < 1) throw InvalidArgument("unsupported d_n pattern: d_n must be >= 1");
    std::vector<double> e(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const int r = n % (2 * d);
        // + on {0, d+1, ..., 2d-1}, - on {1, ..., d}
        e[n] = (r == 0 || r > d) ? g : -g;
    }
    return e;
}

}  // namespace

std::map<std::string, std::vector<double>> make_target(const TargetSpec& spec) {
    if (spec.n_max < 0) throw InvalidArgument("target n_max must be >= 0");
    const int N = spec.n_max;
    std::map<std::string, std::vector<double>> out;
    auto add_kerr = [&](std::vector<double>& e) {
        for (size_t n = 0; n < e.size(); ++n) e[n] += 0.5 * spec.kerr_compensation * n * (static_cast<double>(n) - 1.0);
    };
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            std::vector<double> e(N + 1, 0.0);
            if constexpr (std::is_same_v<T, ThreePhoton>) {
                for (int n = 0; n <= N; ++n) e[n] = k.k3 * n * (n - 1.0) * (n - 2.0);
            } else if constexpr (std::is_same_v<T, ParityTarget>) {
                for (int n = 0; n <= N; ++n) e[n] = (n % 2 == 0) ? -k.p : k.p;
            } else if constexpr (std::is_same_v<T, ZRotation>) {
                e = zrotation_pattern(k.g_r, k.d_n, N);
            } else if constexpr (std::is_same_v<T, KerrCancel>) {
                for (int n = 0; n <= N; ++n) e[n] = 0.5 * k.k * n * (n - 1.0);
            } else if constexpr (std::is_same_v<T, CPhase>) {
                if (k.d_na < 1 || k.d_nb < 1) throw InvalidArgument("unsupported d_n pattern: d_n must be >= 1");
                auto a = zrotation_pattern(k.g_cr / 4.0, k.d_na, N);
                auto b = zrotation_pattern(k.g_cr / 4.0, k.d_nb, N);
                const int D = k.d_na + k.d_nb;
                const int dn = std::min(k.d_na, k.d_nb);
                std::vector<double> c(2 * N + 1, 0.0);
                for (int n = 0; n <= 2 * N; ++n) {
                    const int r = n % D;
                    // -g/2 on {0, D-dn+1, ..., D-1}
                    if (r == 0 || r > D - dn) c[n] = -k.g_cr / 2.0;
                }
                add_kerr(a);
                add_kerr(b);
                out["a"] = a;
                out["b"] = b;
                out["c"] = c;
                return;
            } else if constexpr (std::is_same_v<T, Custom>) {
                if (k.energies.empty()) throw InvalidArgument("custom target has no energies");
                e = k.energies;
            }
            add_kerr(e);
            out["cavity"] = e;
        },
        spec.kind);
    return out;
}

double OptimizerConfig::tolerance() const { return solver_tol > 0.0 ? solver_tol : units::from_khz(0.25); }

void OptimizerConfig::validate() const {
    if (detuning_menu.empty()) throw InvalidArgument("detuning menu is empty");
    for (const auto& d : detuning_menu) {
        if (d.is_zero()) throw InvalidArgument("detuning menu entries must be non-zero");
        if (std::abs(d.value()) > 0.5) throw InvalidArgument("detuning menu entries must satisfy |delta| <= chi/2");
    }
    if (n_assignments < 1) throw InvalidArgument("n_assignments must be >= 1");
    if (!(amp_bound > 0.0) || amp_bound > 0.2) throw InvalidArgument("amp_bound must lie in (0, 0.2]");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
}

std::vector<DriveTone> make_tones(const std::vector<Rational>& assignment, const std::vector<double>& omega) {
    std::vector<DriveTone> tones;
    for (size_t n = 0; n < assignment.size(); ++n) tones.push_back({static_cast<int>(n), omega[n], assignment[n]});
    return tones;
}

namespace {

std::string assignment_str(const std::vector<Rational>& a) {
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + a[i].str();
    return s + "]";
}

Eigen::VectorXd model_energies(const std::vector<Rational>& assignment, const Eigen::VectorXd& u, const SystemParams& params,
                               const OptimizerConfig& config) {
    std::vector<double> omega(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) omega[k] = std::sqrt(std::max(u(k), 0.0));
    const auto tones = make_tones(assignment, omega);
    const int n_max = static_cast<int>(u.size()) - 1;
    const auto s = config.include_order4 ? spectrum_order4(params, tones, config.guard, n_max)
                                         : spectrum_order2(params, tones, config.guard, n_max);
    return Eigen::Map<const Eigen::VectorXd>(s.energies.data(), n_max + 1);
}

}  // namespace

std::vector<double> solve_amplitudes(const std::vector<Rational>& assignment, const std::vector<double>& target,
                                     const SystemParams& params, const OptimizerConfig& config) {
    const int N = static_cast<int>(target.size());
    if (static_cast<int>(assignment.size()) != N) throw InvalidArgument("assignment must cover n = 0..n_max");
    if (N - 1 > params.n_cut) throw InvalidArgument("target extends beyond n_cut");
    const double chi = params.chi;
    Eigen::VectorXd et = Eigen::Map<const Eigen::VectorXd>(target.data(), N);
    if (et.cwiseAbs().maxCoeff() == 0.0) return std::vector<double>(N, 0.0);

    // Order 2 is linear in u_m = Omega_m^2: E_n = sum_m u_m / phi_{nm}.
    const auto zero_tones = make_tones(assignment, std::vector<double>(N, 0.0));
    Eigen::MatrixXd A(N, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < N; ++m) {
            DriveTone t = zero_tones[m];
            t.omega = 1.0;
            A(n, m) = order2_energy(chi, params.chi_prime, {t}, n, config.guard);
        }
    }
    Eigen::VectorXd u = A.fullPivLu().solve(et);
    const double floor = -1e-12 * chi * chi;
    for (int m = 0; m < N; ++m) {
        if (u(m) < floor) {
            std::ostringstream os;
            os << "order-2 solution needs Omega^2 < 0 at n=" << m;
            throw InfeasibleError(os.str());
        }
        u(m) = std::max(u(m), 0.0);
    }
    const double tol = config.tolerance();
    if (config.include_order4) {
        // Damped Newton in u on the full residual, finite-difference Jacobian.
        const double inner_tol = std::min(tol * 1e-4, 1e-9 * chi);
        Eigen::VectorXd r = model_energies(assignment, u, params, config) - et;
        int it = 0;
        for (; it < config.max_iterations && r.cwiseAbs().maxCoeff() > inner_tol; ++it) {
            Eigen::MatrixXd J(N, N);
            for (int m = 0; m < N; ++m) {
                const double h = std::max(1e-6 * std::abs(u(m)), 1e-10 * chi * chi);
                Eigen::VectorXd up = u, dn = u;
                up(m) += h;
                double back = std::min(h, u(m));
                dn(m) -= back;
                J.col(m) = (model_energies(assignment, up, params, config) - model_energies(assignment, dn, params, config)) /
                           (h + back);
            }
            Eigen::VectorXd step = J.fullPivLu().solve(r);
            double lam = 1.0;
            bool accepted = false;
            for (int bt = 0; bt < 30; ++bt, lam *= 0.5) {
                Eigen::VectorXd trial = u - lam * step;
                if (trial.minCoeff() < 0.0) {
                    // Allow landing exactly on zero but not below.
                    if ((trial.array() < floor).any()) continue;
                    trial = trial.cwiseMax(0.0);
                }
                Eigen::VectorXd rt = model_energies(assignment, trial, params, config) - et;
                if (rt.norm() < r.norm()) {
                    u = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        if (r.cwiseAbs().maxCoeff() > tol) {
            std::ostringstream os;
            os << "Newton iteration stalled after " << it << " steps with residual " << units::to_khz(r.cwiseAbs().maxCoeff())
               << " kHz";
            throw InfeasibleError(os.str());
        }
    }
    std::vector<double> omega(N);
    for (int m = 0; m < N; ++m) {
        omega[m] = std::sqrt(u(m));
        if (omega[m] > config.amp_bound * chi) {
            std::ostringstream os;
            os << "|Omega/chi| = " << omega[m] / chi << " at n=" << m << " exceeds the bound " << config.amp_bound;
            throw InfeasibleError(os.str());
        }
    }
    return omega;
}

namespace {

struct Candidate {
    bool ok = false;
    std::vector<Rational> assignment;
    std::vector<double> omega;
    double objective = 0.0;
    double residual = 0.0;
    std::string reason;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a.residual != b.residual) return a.residual < b.residual;
    return std::lexicographical_compare(a.assignment.begin(), a.assignment.end(), b.assignment.begin(), b.assignment.end());
}

Candidate evaluate(const std::vector<Rational>& assignment, const std::vector<double>& target, const SystemParams& params,
                   const OptimizerConfig& config) {
    Candidate c;
    c.assignment = assignment;
    const int n_max = static_cast<int>(target.size()) - 1;
    try {
        c.omega = solve_amplitudes(assignment, target, params, config);
        const auto tones = make_tones(assignment, c.omega);
        const auto s = config.include_order4 ? spectrum_order4(params, tones, config.guard, n_max)
                                             : spectrum_order2(params, tones, config.guard, n_max);
        for (int n = 0; n <= n_max; ++n) c.residual = std::max(c.residual, std::abs(s.energies[n] - target[n]));
        c.objective = excitation_objective(tones, params, n_max, config.guard);
        c.ok = true;
    } catch (const Error& e) {
        c.reason = e.what();
    }
    return c;
}

// Sign heuristic: the self term Omega_n^2 / delta_n dominates E_n.
std::string prune_reason(const std::vector<Rational>& assignment, const std::vector<double>& target, double fraction) {
    double emax = 0.0;
    for (double e : target) emax = std::max(emax, std::abs(e));
    for (size_t n = 0; n < target.size(); ++n) {
        if (std::abs(target[n]) >= fraction * emax && emax > 0.0 && (target[n] > 0.0) != (assignment[n].value() > 0.0)) {
            return "pruned: detuning sign opposes target at n=" + std::to_string(n);
        }
    }
    return {};
}

}  // namespace

OptimizedDrive optimize_drives(const std::vector<double>& target, const SystemParams& params, const OptimizerConfig& config) {
    params.validate();
    config.validate();
    if (target.empty()) throw InvalidArgument("empty target");
    if (static_cast<int>(target.size()) - 1 > params.n_cut) throw InvalidArgument("target extends beyond n_cut");
    const double bound = params.chi / 8.0;
    for (size_t n = 0; n < target.size(); ++n) {
        if (std::abs(target[n]) > bound) {
            std::ostringstream os;
            os << "target |E_T," << n << "|/2pi = " << units::to_khz(std::abs(target[n])) << " kHz exceeds the bound chi/8 = "
               << units::to_khz(bound) << " kHz";
            throw InfeasibleError(os.str());
        }
    }
    const int N = static_cast<int>(target.size());

    // Draw assignments up front so the sequence is independent of threading.
    // Pruned draws do not count towards n_assignments; the draw cap keeps a
    // menu that can never satisfy the sign rule from looping forever.
    std::mt19937_64 rng(config.seed);
    std::vector<std::vector<Rational>> assignments;
    std::vector<Candidate> pruned;
    long long n_pruned = 0;
    const long long max_draws = 10000LL * config.n_assignments;
    for (long long draw = 0; draw < max_draws && static_cast<int>(assignments.size()) < config.n_assignments; ++draw) {
        std::vector<Rational> a(N);
        for (auto& d : a) d = config.detuning_menu[rng() % config.detuning_menu.size()];
        const std::string pr = prune_reason(a, target, config.prune_fraction);
        if (pr.empty()) {
            assignments.push_back(std::move(a));
        } else if (++n_pruned, pruned.size() < 20 &&
                   std::none_of(pruned.begin(), pruned.end(), [&](const Candidate& c) { return c.assignment == a; })) {
            Candidate c;
            c.assignment = std::move(a);
            c.reason = pr;
            pruned.push_back(std::move(c));
        }
    }

    std::vector<Candidate> results(assignments.size());
    parallel_for(static_cast<int>(assignments.size()), config.threads,
                 [&](int i) { results[i] = evaluate(assignments[i], target, params, config); });

    const Candidate* best = nullptr;
    for (const auto& c : results)
        if (c.ok && (!best || better(c, *best))) best = &c;
    if (!best) {
        std::vector<std::string> details;
        for (size_t i = 0; i < results.size(); ++i) {
            details.push_back("assignment " + std::to_string(i) + " " + assignment_str(results[i].assignment) + ": " +
                              results[i].reason);
        }
        for (const auto& c : pruned) details.push_back("drawn " + assignment_str(c.assignment) + ": " + c.reason);
        throw InfeasibleError("no feasible detuning assignment among " + std::to_string(results.size()) + " solved (" +
                                  std::to_string(n_pruned) + " pruned by the sign rule)",
                              std::move(details));
    }
    Candidate winner = *best;

    if (config.local_search) {
        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::vector<Rational>> moves;
            for (int n = 0; n < N; ++n)
                for (const auto& d : config.detuning_menu)
                    if (!(d == winner.assignment[n])) {
                        auto a = winner.assignment;
                        a[n] = d;
                        moves.push_back(a);
                    }
            std::vector<Candidate> trial(moves.size());
            parallel_for(static_cast<int>(moves.size()), config.threads,
                         [&](int i) { trial[i] = evaluate(moves[i], target, params, config); });
            for (const auto& c : trial) {
                if (c.ok && better(c, winner)) {
                    winner = c;
                    improved = true;
                }
            }
        }
    }

    OptimizedDrive out;
    out.assignment = winner.assignment;
    out.target = target;
    out.drive.tones = make_tones(winner.assignment, winner.omega);
    out.drive.envelope = Abrupt{};
    out.achieved = config.include_order4 ? spectrum_order4(params, out.drive.tones, config.guard, N - 1)
                                         : spectrum_order2(params, out.drive.tones, config.guard, N - 1);
    out.objective = winner.objective;
    out.residual = winner.residual;
    return out;
}

}  // namespace pnd
