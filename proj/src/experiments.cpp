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

#include "pnd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pnd/effective.hpp"
#include "pnd/error.hpp"
#include "pnd/optimizer.hpp"
#include "pnd/parallel.hpp"
#include "pnd/presets.hpp"
#include "pnd/units.hpp"

namespace pnd {

double ExperimentReport::scalar(const std::string& key) const {
    for (const auto& [k, v] : scalars)
        if (k == key) return v;
    throw InvalidArgument("report '" + name + "' has no scalar '" + key + "'");
}

QuantumState kitten_plus(int n_cut, const std::string& label) {
    LogicalCode code;
    code.n_cut = n_cut;
    return code.logical(1.0, 1.0, label);
}

namespace {

constexpr double kPi = std::numbers::pi;

DenseMatrix reduce_cavity(const DenseMatrix& rho, int C, int Q) {
    if (Q == 1) return rho;
    DenseMatrix rc = DenseMatrix::Zero(C, C);
    for (int q = 0; q < Q; ++q)
        for (int c = 0; c < C; ++c)
            for (int d = 0; d < C; ++d) rc(c, d) += rho(c * Q + q, d * Q + q);
    return rc;
}

DenseVector evolve_target(const DenseVector& psi, const std::vector<double>& e, double t) {
    DenseVector out = psi;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, -e[i] * t);
    return out;
}

double overlap_root(const DenseMatrix& rc, const DenseVector& target) {
    const double f = (target.adjoint() * rc * target)(0, 0).real();
    return std::sqrt(std::clamp(f, 0.0, 1.0));
}

struct RunResult {
    std::vector<double> times, fidelity, lambda, excited;
    DenseMatrix final_full;
};

bool has_noise(const BlockModel& m) { return !m.qubit_jumps.empty() || !m.cavity_jumps.empty(); }

// Starts the cavity in psi_cav with every ancilla in |g>.
RunResult run_model(const BlockModel& m, const DenseVector& psi_cav, const std::vector<double>& energies, const PropagationConfig& cfg,
                    const std::function<void(double, const DenseMatrix&)>& extra = {}) {
    const int C = m.n_configs(), Q = m.register_dim();
    if (psi_cav.size() != C || static_cast<int>(energies.size()) < C) throw InvalidArgument("run: cavity state or target size mismatch");
    DenseVector full = DenseVector::Zero(C * Q);
    for (int c = 0; c < C; ++c) full(c * Q) = psi_cav(c);
    const HilbertDims dims = m.full_dims();
    RunResult r;
    auto record = [&](double t, const DenseMatrix& rc, double ground) {
        r.times.push_back(t);
        r.fidelity.push_back(overlap_root(rc, evolve_target(psi_cav, energies, t)));
        r.lambda.push_back(m.envelope ? m.envelope(t) : 1.0);
        r.excited.push_back(1.0 - ground);
        if (extra) extra(t, rc);
    };
    if (!has_noise(m)) {
        const QuantumState fin = propagate_block_state(m, {dims, full}, cfg, [&](double t, const QuantumState& s) {
            Eigen::Map<const DenseMatrix> psi(s.amplitudes.data(), Q, C);
            double ground = 0.0;
            for (int c = 0; c < C; ++c) ground += std::norm(psi(0, c));
            record(t, psi.transpose() * psi.conjugate(), ground);
        });
        r.final_full = fin.amplitudes * fin.amplitudes.adjoint();
    } else {
        const DensityMatrix fin =
            propagate_block_lindblad(m, {dims, full * full.adjoint()}, cfg, [&](double t, const DensityMatrix& d) {
                double ground = 0.0;
                for (int c = 0; c < C; ++c) ground += d.matrix(c * Q, c * Q).real();
                record(t, reduce_cavity(d.matrix, C, Q), ground);
            });
        r.final_full = fin.matrix;
    }
    return r;
}

double recovered_fidelity(const BlockModel& m, const DenseMatrix& rho_full, const DenseVector& target, bool recovery) {
    DensityMatrix d{m.full_dims(), rho_full};
    if (recovery) {
        for (const auto& s : m.cavity_dims.subsystems()) d = kitten_recovery(d, s.label);
    }
    return overlap_root(reduce_cavity(d.matrix, m.n_configs(), m.register_dim()), target);
}

std::vector<double> linspace_times(double t0, double t1, int samples) {
    if (samples < 1) throw InvalidArgument("samples must be >= 1");
    std::vector<double> t;
    for (int k = 0; k <= samples; ++k) t.push_back(t0 + (t1 - t0) * k / samples);
    t.back() = t1;
    return t;
}

PropagationConfig make_config(double t_f, double step, double max_rate, std::vector<double> records) {
    PropagationConfig cfg;
    cfg.t_f = t_f;
    cfg.step = step;
    cfg.max_phase_rate = max_rate;
    cfg.record_times = std::move(records);
    return cfg;
}

SeriesTable trace_table(const RunResult& r, bool with_lambda) {
    SeriesTable s{"series", {"time_us", "fidelity"}, {}};
    if (with_lambda) s.columns.push_back("lambda_t");
    for (size_t k = 0; k < r.times.size(); ++k) {
        std::vector<double> row = {r.times[k], r.fidelity[k]};
        if (with_lambda) row.push_back(r.lambda[k]);
        s.rows.push_back(row);
    }
    return s;
}

std::vector<double> khz(const std::vector<double>& v) {
    std::vector<double> o;
    for (double x : v) o.push_back(units::to_khz(x));
    return o;
}

nlohmann::json tones_json(const std::vector<DriveTone>& tones, double chi) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : tones)
        a.push_back({{"m", t.m}, {"omega_re_over_chi", t.omega.real() / chi}, {"omega_im_over_chi", t.omega.imag() / chi},
                     {"delta", t.delta.str()}});
    return a;
}

nlohmann::json params_json(const SystemParams& p) {
    return {{"chi_MHz", units::to_mhz(p.chi)}, {"kerr_kHz", units::to_khz(p.kerr)}, {"chi_prime_kHz", units::to_khz(p.chi_prime)},
            {"n_cut", p.n_cut}};
}

std::vector<double> pi8_pattern(double g_r, int n_cut) {
    TargetSpec spec;
    spec.kind = ZRotation{g_r, 2};
    spec.n_max = n_cut;
    return make_target(spec).at("cavity");
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
    std::vector<double> o = v;
    for (auto& x : o) x *= s;
    return o;
}

}  // namespace

Pi8Config Pi8Config::defaults(Pi8Scheme scheme, bool smooth) {
    Pi8Config c;
    const auto& t = published_table("V");
    c.scheme = scheme;
    c.smooth = smooth;
    c.params = table_params(t);
    c.tones = table_drive(t).tones;
    c.g_r = units::from_khz(20.0);
    c.t_g = 16.0 * kPi / c.params.chi;
    c.qubit_noise.gamma_q = units::from_khz(3.0);
    for (double k : {0.0, 0.005, 0.01, 0.02, 0.05, 0.1}) c.kappa_scan.push_back(units::from_khz(k));
    return c;
}

ExperimentReport pi8_gate_experiment(const Pi8Config& cfg) {
    cfg.params.validate();
    cfg.qubit_noise.validate();
    if (!(cfg.t_g > 0.0)) throw InvalidArgument("pi8: T_G must be positive");
    if (cfg.steps_per_period < 1) throw InvalidArgument("steps_per_period must be >= 1");
    const int N = cfg.params.n_cut;
    const double tg = cfg.t_g;
    const DenseVector psi = kitten_plus(N).amplitudes;
    ExperimentReport rep;
    rep.name = "pi8";

    std::vector<double> energies;
    std::function<BlockModel(const NoiseParams&)> build;
    double step = 0.0, rate = (N + 1) * cfg.params.chi, t_m = 0.0;
    std::optional<SnapGate> snap;
    std::string scheme;
    switch (cfg.scheme) {
        case Pi8Scheme::Pnd: {
            scheme = cfg.smooth ? "pnd_smooth" : "pnd_abrupt";
            energies = pi8_pattern(cfg.g_r, N);
            DriveSpec spec{cfg.tones, cfg.smooth ? Envelope{SineGate{tg}} : Envelope{Abrupt{0.0, tg}}, "q"};
            spec.validate(cfg.params.chi);
            t_m = micromotion_period(cfg.tones, cfg.params.chi);
            step = t_m / cfg.steps_per_period;
            build = [spec, &cfg](const NoiseParams& nz) { return single_cavity_model(cfg.params, spec, nz); };
            break;
        }
        case Pi8Scheme::Snap: {
            scheme = "snap";
            const auto pattern = pi8_pattern(cfg.g_r, N);
            std::map<int, double> phases;
            for (int n = 0; n <= std::min(4, N); ++n) phases[n] = -pattern[n] * tg;
            snap = snap_gate(phases, tg, cfg.params);
            energies.assign(N + 1, 0.0);
            for (const auto& [n, phi] : phases) energies[n] = -phi / tg;
            step = tg / (2.0 * cfg.steps_per_period);
            build = [g = *snap](const NoiseParams& nz) { return g.model(nz); };
            break;
        }
        case Pi8Scheme::QuarticKerr: {
            scheme = "quartic_kerr";
            // K4 n^4 over T_G gives a relative phase of pi/4 between the
            // kitten words; the sign matches the PND rotation.
            const double k4 = -kPi / (64.0 * tg);
            for (int n = 0; n <= N; ++n) energies.push_back(k4 * std::pow(n, 4));
            step = tg / (2.0 * cfg.steps_per_period);
            rate = std::abs(energies.back()) + 1.0;
            build = [N, energies](const NoiseParams& nz) { return cavity_only_model(N, energies, nz.kappa_a); };
            rep.add("k4_kHz", units::to_khz(k4));
            break;
        }
    }
    const DenseVector target = evolve_target(psi, energies, tg);

    rep.inputs = {{"scheme", scheme},
                  {"system", params_json(cfg.params)},
                  {"g_kHz", units::to_khz(cfg.g_r)},
                  {"t_g_us", tg},
                  {"gamma_q_kHz", units::to_khz(cfg.qubit_noise.gamma_q)},
                  {"gamma_phi_kHz", units::to_khz(cfg.qubit_noise.gamma_phi)},
                  {"kappa_scan_kHz", khz(cfg.kappa_scan)},
                  {"recovery", cfg.recovery},
                  {"steps_per_period", cfg.steps_per_period}};
    if (cfg.scheme == Pi8Scheme::Pnd) rep.inputs["tones"] = tones_json(cfg.tones, cfg.params.chi);

    NoiseParams qn = cfg.qubit_noise;
    qn.kappa_a = 0.0;
    struct Job {
        NoiseParams noise;
        bool trace;
    };
    std::vector<Job> jobs = {{NoiseParams{}, true}, {qn, false}};
    for (double k : cfg.kappa_scan) {
        jobs.push_back({NoiseParams{0.0, 0.0, k}, false});
        jobs.push_back({NoiseParams{qn.gamma_q, qn.gamma_phi, k}, false});
    }
    std::vector<RunResult> out(jobs.size());
    std::vector<double> recovered(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
        const BlockModel m = build(jobs[i].noise);
        const auto rec = jobs[i].trace ? linspace_times(0.0, tg, cfg.samples) : std::vector<double>{tg};
        PropagationConfig pc = make_config(tg, step, rate, rec);
        if (snap) pc.breakpoints = {0.5 * tg};
        out[i] = run_model(m, psi, energies, pc);
        recovered[i] = recovered_fidelity(m, out[i].final_full, target, cfg.recovery);
    });

    const double f0 = out[0].fidelity.back(), f1 = out[1].fidelity.back();
    rep.add("t_g_us", tg);
    if (t_m > 0.0) rep.add("t_m_us", t_m);
    rep.add("final_fidelity", f0);
    rep.add("final_fidelity_qubit_noise", f1);
    rep.add("added_infidelity", f0 - f1);
    if (snap) {
        double avg = 0.0;
        const auto& ex = out[0].excited;
        for (size_t k = 1; k < ex.size(); ++k) avg += 0.5 * (ex[k] + ex[k - 1]);
        rep.add("mean_excitation", avg / (ex.size() - 1));
        rep.add("snap_min_ground_population", *std::min_element(snap->ground_population.begin(), snap->ground_population.end()));
        double perr = 0.0;
        for (double e : snap->phase_error) perr = std::max(perr, std::abs(e));
        rep.add("snap_max_phase_error_rad", perr);
    }
    rep.series.push_back(trace_table(out[0], cfg.scheme == Pi8Scheme::Pnd));
    if (snap) {
        rep.series[0].columns.push_back("p_excited");
        for (size_t k = 0; k < out[0].excited.size(); ++k) rep.series[0].rows[k].push_back(out[0].excited[k]);
    }
    SeriesTable ks{"kappa_scan", {"kappa_kHz", "fidelity", "fidelity_qubit_noise"}, {}};
    for (size_t k = 0; k < cfg.kappa_scan.size(); ++k) {
        ks.rows.push_back({units::to_khz(cfg.kappa_scan[k]), recovered[2 + 2 * k], recovered[3 + 2 * k]});
    }
    rep.series.push_back(ks);
    return rep;
}

ThetaScanConfig ThetaScanConfig::defaults() {
    ThetaScanConfig c;
    const auto& t = published_table("V");
    c.params = table_params(t);
    c.tones = table_drive(t).tones;
    c.g_r = units::from_khz(20.0);
    c.gamma_q = c.gamma_phi = units::from_khz(3.0);
    c.theta = {kPi / 4, kPi / 2, kPi, 2 * kPi};
    c.tg_scale = {1.0, 2.0, 4.0};
    return c;
}

ExperimentReport theta_scaling_experiment(const ThetaScanConfig& cfg) {
    cfg.params.validate();
    const int N = cfg.params.n_cut;
    const double chi = cfg.params.chi;
    const double tg_star = 16.0 * kPi / chi;
    const double t_m = micromotion_period(cfg.tones, chi);
    const double step = t_m / cfg.steps_per_period;
    const DenseVector psi = kitten_plus(N).amplitudes;
    const auto pattern = pi8_pattern(cfg.g_r, N);

    struct Point {
        double tg, amp_scale, e_scale;
    };
    std::vector<Point> points;
    for (double th : cfg.theta) points.push_back({4.0 * th / kPi * tg_star, 1.0, 1.0});
    for (double s : cfg.tg_scale) {
        if (!(s > 0.0)) throw InvalidArgument("tg_scale entries must be positive");
        points.push_back({s * tg_star, 1.0 / std::sqrt(s), 1.0 / s});
    }
    const NoiseParams channels[4] = {{}, {cfg.gamma_q, 0.0, 0.0}, {0.0, cfg.gamma_phi, 0.0}, {cfg.gamma_q, cfg.gamma_phi, 0.0}};
    std::vector<double> fid(points.size() * 4);
    RunResult trace;
    // Noiseless trace of the last theta point, else of the last T_G point.
    const int trace_job = points.empty() ? -1 : static_cast<int>(cfg.theta.empty() ? points.size() - 1 : cfg.theta.size() - 1) * 4;
    parallel_for(static_cast<int>(fid.size()), cfg.threads, [&](int i) {
        const Point& p = points[i / 4];
        auto tones = cfg.tones;
        for (auto& t : tones) t.omega *= p.amp_scale;
        const DriveSpec spec{tones, SineGate{p.tg}, "q"};
        const auto e = scaled(pattern, p.e_scale);
        const BlockModel m = single_cavity_model(cfg.params, spec, channels[i % 4]);
        const auto rec = i == trace_job ? linspace_times(0.0, p.tg, 200) : std::vector<double>{p.tg};
        RunResult r = run_model(m, psi, e, make_config(p.tg, step, (N + 1) * chi, rec));
        fid[i] = r.fidelity.back();
        if (i == trace_job) trace = std::move(r);
    });

    ExperimentReport rep;
    rep.name = "theta_scan";
    rep.inputs = {{"system", params_json(cfg.params)},
                  {"tones", tones_json(cfg.tones, chi)},
                  {"g_kHz", units::to_khz(cfg.g_r)},
                  {"gamma_q_kHz", units::to_khz(cfg.gamma_q)},
                  {"gamma_phi_kHz", units::to_khz(cfg.gamma_phi)},
                  {"theta_over_pi", scaled(cfg.theta, 1.0 / kPi)},
                  {"tg_scale", cfg.tg_scale},
                  {"steps_per_period", cfg.steps_per_period}};
    if (trace_job >= 0) rep.series.push_back(trace_table(trace, true));
    const char* names[3] = {"relaxation", "dephasing", "both"};
    SeriesTable th{"theta_scan", {"theta_over_pi", "t_g_us", "fidelity", "infidelity_relaxation", "infidelity_dephasing", "infidelity_both"}, {}};
    SeriesTable ts{"tg_scan", {"tg_scale", "t_g_us", "fidelity", "infidelity_relaxation", "infidelity_dephasing", "infidelity_both"}, {}};
    for (size_t k = 0; k < points.size(); ++k) {
        const double* f = &fid[4 * k];
        const bool is_theta = k < cfg.theta.size();
        std::vector<double> row = {is_theta ? cfg.theta[k] / kPi : cfg.tg_scale[k - cfg.theta.size()], points[k].tg, f[0],
                                   f[0] - f[1], f[0] - f[2], f[0] - f[3]};
        (is_theta ? th : ts).rows.push_back(row);
    }
    for (int ch = 0; ch < 3; ++ch) {
        const std::string nm = names[ch];
        if (th.rows.size() >= 1) {
            // Proportional fit y = a theta.
            double sxy = 0.0, sxx = 0.0, ymax = 0.0;
            for (const auto& r : th.rows) sxy += r[0] * r[3 + ch], sxx += r[0] * r[0], ymax = std::max(ymax, std::abs(r[3 + ch]));
            const double a = sxy / sxx;
            double res = 0.0;
            for (const auto& r : th.rows) res = std::max(res, std::abs(r[3 + ch] - a * r[0]));
            rep.add("theta_max_infidelity_" + nm, th.rows.back()[3 + ch]);
            rep.add("theta_fit_residual_" + nm, ymax > 0.0 ? res / ymax : 0.0);
        }
        if (!ts.rows.empty()) {
            double mean = 0.0, dev = 0.0;
            for (const auto& r : ts.rows) mean += r[3 + ch];
            mean /= ts.rows.size();
            for (const auto& r : ts.rows) dev = std::max(dev, std::abs(r[3 + ch] - mean));
            rep.add("tg_mean_infidelity_" + nm, mean);
            rep.add("tg_flatness_" + nm, mean != 0.0 ? dev / std::abs(mean) : 0.0);
        }
    }
    if (!th.rows.empty()) rep.series.push_back(th);
    if (!ts.rows.empty()) rep.series.push_back(ts);
    return rep;
}

KerrCancelConfig KerrCancelConfig::defaults() {
    KerrCancelConfig c;
    const auto& t = published_table("VII");
    c.params = table_params(t);
    c.tones = table_drive(t).tones;
    c.noise.gamma_q = units::from_khz(3.0);
    c.check_times = {20.0};
    c.wigner_times = {0.0, 25.0, 50.0, 75.0, 100.0};
    return c;
}

ExperimentReport kerr_cancel_experiment(const KerrCancelConfig& cfg) {
    cfg.params.validate();
    cfg.noise.validate();
    if (!(cfg.duration > 0.0)) throw InvalidArgument("kerr_cancel: duration must be positive");
    const int N = cfg.params.n_cut;
    const double chi = cfg.params.chi;
    const double t_m = micromotion_period(cfg.tones, chi);
    const double step = t_m / cfg.steps_per_period;
    const double sample = cfg.sample > 0.0 ? cfg.sample : t_m / 20.0;
    const QuantumState cat = cat_state(cfg.alpha, Parity::Even, N);
    const DenseVector psi = cat.amplitudes;
    const std::vector<double> zero(N + 1, 0.0);
    DriveSpec spec{cfg.tones, Abrupt{0.0, cfg.duration}, "q"};
    if (cfg.smooth) spec.envelope = RampUpDown{cfg.ramp, 0.0, cfg.duration};
    spec.validate(chi);

    std::vector<double> rec;
    const int n_samples = static_cast<int>(std::llround(cfg.duration / sample));
    for (int k = 0; k <= n_samples; ++k) rec.push_back(std::min(cfg.duration, k * sample));
    for (double t : cfg.check_times) rec.push_back(t);
    for (double t : cfg.wigner_times) rec.push_back(t);
    std::sort(rec.begin(), rec.end());
    rec.erase(std::unique(rec.begin(), rec.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), rec.end());
    for (double t : rec)
        if (t < 0.0 || t > cfg.duration + 1e-9) throw InvalidArgument("kerr_cancel: requested time outside [0, duration]");

    const bool noisy = cfg.noise.gamma_q > 0.0 || cfg.noise.gamma_phi > 0.0 || cfg.noise.kappa_a > 0.0;
    std::vector<WignerSnapshot> snaps;
    RunResult clean, dirty;
    parallel_for(noisy ? 2 : 1, cfg.threads, [&](int i) {
        if (i == 0) {
            const BlockModel m = single_cavity_model(cfg.params, spec, NoiseParams{});
            clean = run_model(m, psi, zero, make_config(cfg.duration, step, (N + 1) * chi, rec), [&](double t, const DenseMatrix& rc) {
                for (double w : cfg.wigner_times)
                    if (std::abs(w - t) < 1e-9) snaps.push_back({t, wigner({cat.dims, rc}, cfg.grid)});
            });
        } else {
            const BlockModel m = single_cavity_model(cfg.params, spec, cfg.noise);
            dirty = run_model(m, psi, zero, make_config(cfg.duration, step, (N + 1) * chi, {cfg.duration}));
        }
    });

    ExperimentReport rep;
    rep.name = "kerr_cancel";
    rep.inputs = {{"system", params_json(cfg.params)},
                  {"tones", tones_json(cfg.tones, chi)},
                  {"alpha", cfg.alpha},
                  {"duration_us", cfg.duration},
                  {"envelope", cfg.smooth ? "smooth" : "abrupt"},
                  {"ramp_us", cfg.ramp},
                  {"gamma_q_kHz", units::to_khz(cfg.noise.gamma_q)},
                  {"gamma_phi_kHz", units::to_khz(cfg.noise.gamma_phi)},
                  {"kappa_kHz", units::to_khz(cfg.noise.kappa_a)},
                  {"wigner_times_us", cfg.wigner_times},
                  {"steps_per_period", cfg.steps_per_period}};
    // Drive off: bare Kerr phases only.
    std::vector<double> bare(N + 1);
    for (int n = 0; n <= N; ++n) bare[n] = -0.5 * cfg.params.kerr * n * (n - 1);
    SeriesTable s = trace_table(clean, true);
    s.columns.push_back("fidelity_drive_off");
    double off_min = 1.0, off_final = 1.0;
    for (size_t k = 0; k < clean.times.size(); ++k) {
        const DenseVector phi = evolve_target(psi, bare, clean.times[k]);
        off_final = std::abs(psi.dot(phi));
        off_min = std::min(off_min, off_final);
        s.rows[k].push_back(off_final);
    }
    rep.add("t_m_us", t_m);
    for (double t : cfg.check_times) {
        for (size_t k = 0; k < clean.times.size(); ++k) {
            if (std::abs(clean.times[k] - t) < 1e-9) {
                std::ostringstream key;
                key << "fidelity_t" << t << "us";
                rep.add(key.str(), clean.fidelity[k]);
            }
        }
    }
    rep.add("final_fidelity", clean.fidelity.back());
    if (noisy) {
        rep.add("final_fidelity_qubit_noise", dirty.fidelity.back());
        rep.add("added_infidelity", clean.fidelity.back() - dirty.fidelity.back());
    }
    rep.add("drive_off_final_fidelity", off_final);
    rep.add("drive_off_min_fidelity", off_min);
    if (cfg.params.kerr != 0.0) rep.add("kerr_revival_time_us", 2.0 * kPi / std::abs(cfg.params.kerr));
    rep.series.push_back(s);
    std::sort(snaps.begin(), snaps.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    rep.wigner = std::move(snaps);
    return rep;
}

CphaseConfig CphaseConfig::defaults() {
    CphaseConfig c;
    c.params = cphase_params();
    for (const char* t : {"IX", "X", "XI"}) c.drives.push_back(table_drive(published_table(t)));
    c.g_cr = units::from_khz(20.0);
    c.gamma_q = units::from_khz(3.0);
    c.kappa_scan = {0.0};
    return c;
}

ExperimentReport cphase_experiment(const CphaseConfig& cfg) {
    cfg.params.validate();
    if (cfg.params.n_cut_a != cfg.params.n_cut_b) throw InvalidArgument("cphase: both cavities need the same n_cut");
    const int Na = cfg.params.n_cut_a, Nb = cfg.params.n_cut_b;
    const double chi = cfg.params.chi_a;
    const double tg = 16.0 * kPi / chi;
    std::vector<DriveTone> all;
    for (const auto& d : cfg.drives) all.insert(all.end(), d.tones.begin(), d.tones.end());
    const double t_m = micromotion_period(all, chi);
    const double step = t_m / cfg.steps_per_period;
    const double rate = (Na + Nb + 1) * std::max({cfg.params.chi_a, cfg.params.chi_b, cfg.params.chi_c});
    std::vector<DriveSpec> specs = cfg.drives;
    for (auto& s : specs) {
        s.envelope = cfg.smooth ? Envelope{SineGate{tg}} : Envelope{Abrupt{0.0, tg}};
        s.validate(two_cavity_chi(cfg.params, s.target_qubit));
    }
    TargetSpec ts;
    ts.kind = CPhase{cfg.g_cr, 2, 2};
    ts.n_max = Na;
    const auto tgt = make_target(ts);
    std::vector<double> energies;
    const DenseVector ka = kitten_plus(Na).amplitudes, kb = kitten_plus(Nb).amplitudes;
    DenseVector psi((Na + 1) * (Nb + 1));
    for (int a = 0; a <= Na; ++a)
        for (int b = 0; b <= Nb; ++b) {
            energies.push_back(tgt.at("a")[a] + tgt.at("b")[b] + tgt.at("c")[a + b]);
            psi(a * (Nb + 1) + b) = ka(a) * kb(b);
        }
    const DenseVector target = evolve_target(psi, energies, tg);

    struct Job {
        TwoCavityNoise noise;
        bool trace;
    };
    auto noise_of = [&](double kappa, bool qubits) {
        TwoCavityNoise n;
        for (int k = 0; k < 3; ++k) n.gamma_q[k] = qubits ? cfg.gamma_q : 0.0;
        n.kappa_a = n.kappa_b = kappa;
        return n;
    };
    std::vector<Job> jobs = {{noise_of(0.0, false), true}};
    for (double k : cfg.kappa_scan) {
        jobs.push_back({noise_of(k, false), false});
        jobs.push_back({noise_of(k, true), false});
    }
    std::vector<RunResult> out(jobs.size());
    std::vector<double> recovered(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
        const BlockModel m = two_cavity_model(cfg.params, specs, jobs[i].noise);
        const auto rec = jobs[i].trace ? linspace_times(0.0, tg, cfg.samples) : std::vector<double>{tg};
        out[i] = run_model(m, psi, energies, make_config(tg, step, rate, rec));
        recovered[i] = recovered_fidelity(m, out[i].final_full, target, cfg.recovery);
    });

    ExperimentReport rep;
    rep.name = "cphase";
    nlohmann::json drives = nlohmann::json::array();
    for (const auto& s : specs) drives.push_back({{"qubit", s.target_qubit}, {"tones", tones_json(s.tones, chi)}});
    rep.inputs = {{"chi_MHz", units::to_mhz(chi)},
                  {"n_cut", Na},
                  {"g_kHz", units::to_khz(cfg.g_cr)},
                  {"drives", drives},
                  {"envelope", cfg.smooth ? "smooth" : "abrupt"},
                  {"gamma_q_kHz", units::to_khz(cfg.gamma_q)},
                  {"kappa_scan_kHz", khz(cfg.kappa_scan)},
                  {"recovery", cfg.recovery},
                  {"steps_per_period", cfg.steps_per_period}};
    rep.add("t_g_us", tg);
    rep.add("t_m_us", t_m);
    rep.add("gate_fidelity_closed", out[0].fidelity.back());
    if (!cfg.kappa_scan.empty()) {
        rep.add("final_fidelity", recovered[2]);
        rep.add("final_fidelity_no_qubit_noise", recovered[1]);
    }
    rep.series.push_back(trace_table(out[0], true));
    SeriesTable ks{"kappa_scan", {"kappa_kHz", "fidelity", "fidelity_qubit_noise"}, {}};
    for (size_t k = 0; k < cfg.kappa_scan.size(); ++k)
        ks.rows.push_back({units::to_khz(cfg.kappa_scan[k]), recovered[1 + 2 * k], recovered[2 + 2 * k]});
    rep.series.push_back(ks);
    return rep;
}

ExperimentReport custom_experiment(const CustomConfig& cfg) {
    cfg.params.validate();
    cfg.noise.validate();
    cfg.drive.validate(cfg.params.chi);
    const int N = cfg.params.n_cut;
    if (cfg.psi0.amplitudes.size() != N + 1) throw InvalidArgument("custom: initial state must have dimension n_cut + 1");
    if (!(cfg.duration > 0.0)) throw InvalidArgument("custom: duration must be positive");
    std::vector<double> energies = cfg.target;
    if (energies.empty()) {
        energies = spectrum_order4(cfg.params, cfg.drive.tones).energies;
        for (int n = 0; n <= N; ++n) energies[n] -= 0.5 * cfg.params.kerr * n * (n - 1);
    }
    if (static_cast<int>(energies.size()) != N + 1) throw InvalidArgument("custom: target must have n_cut + 1 entries");
    const double t_m = micromotion_period(cfg.drive.tones, cfg.params.chi);
    const BlockModel m = single_cavity_model(cfg.params, cfg.drive, cfg.noise);
    const RunResult r = run_model(m, cfg.psi0.amplitudes, energies,
                                  make_config(cfg.duration, t_m / cfg.steps_per_period, (N + 1) * cfg.params.chi,
                                              linspace_times(0.0, cfg.duration, cfg.samples)));
    ExperimentReport rep;
    rep.name = "custom";
    rep.inputs = {{"system", params_json(cfg.params)},
                  {"tones", tones_json(cfg.drive.tones, cfg.params.chi)},
                  {"target_kHz", khz(energies)},
                  {"duration_us", cfg.duration},
                  {"gamma_q_kHz", units::to_khz(cfg.noise.gamma_q)},
                  {"gamma_phi_kHz", units::to_khz(cfg.noise.gamma_phi)},
                  {"kappa_kHz", units::to_khz(cfg.noise.kappa_a)},
                  {"steps_per_period", cfg.steps_per_period}};
    rep.add("t_m_us", t_m);
    rep.add("final_fidelity", r.fidelity.back());
    rep.add("min_fidelity", *std::min_element(r.fidelity.begin(), r.fidelity.end()));
    rep.series.push_back(trace_table(r, true));
    return rep;
}

double stroboscopic_energy(const SystemParams& params, const std::vector<DriveTone>& tones, int n, int periods) {
    if (n < 0 || n > params.n_cut) throw InvalidArgument("stroboscopic_energy: n outside 0..n_cut");
    if (periods < 1) throw InvalidArgument("stroboscopic_energy: periods must be >= 1");
    const double t_m = micromotion_period(tones, params.chi);
    const BlockModel m = single_cavity_model(params, DriveSpec{tones, Abrupt{}, "q"}, NoiseParams{});
    DenseVector psi = DenseVector::Zero(2 * (params.n_cut + 1));
    psi(2 * n) = 1.0;
    std::vector<double> rec;
    for (int k = 1; k <= periods + 1; ++k) rec.push_back(k * t_m);
    std::vector<double> phase;
    propagate_block_state(m, {m.full_dims(), psi}, make_config(rec.back(), t_m / 2000.0, (params.n_cut + 1) * params.chi, rec),
                          [&](double, const QuantumState& s) { phase.push_back(std::arg(s.amplitudes(2 * n))); });
    double total = 0.0;
    for (size_t k = 1; k < phase.size(); ++k) total += std::remainder(phase[k] - phase[k - 1], 2.0 * kPi);
    return -total / (periods * t_m) + 0.5 * params.kerr * n * (n - 1);
}

MicromotionResult micromotion_analysis(const SystemParams& params, const std::vector<DriveTone>& tones, const QuantumState& psi0,
                                       const std::vector<double>& scales, int periods, int samples_per_period) {
    if (periods < 3) throw InvalidArgument("micromotion_analysis: needs at least 3 periods");
    MicromotionResult res;
    res.t_m = micromotion_period(tones, params.chi);
    res.scales = scales;
    const int N = params.n_cut;
    std::vector<double> first_trace;
    for (double s : scales) {
        auto scaled_tones = tones;
        for (auto& t : scaled_tones) t.omega *= s;
        auto e = floquet_spectrum(params, scaled_tones).energies;
        for (int n = 0; n <= N; ++n) e[n] -= 0.5 * params.kerr * n * (n - 1);
        const BlockModel m = single_cavity_model(params, DriveSpec{scaled_tones, Abrupt{}, "q"}, NoiseParams{});
        const auto rec = linspace_times(0.0, periods * res.t_m, periods * samples_per_period);
        const RunResult r =
            run_model(m, psi0.amplitudes, e, make_config(rec.back(), res.t_m / 2000.0, (N + 1) * params.chi, rec));
        double lo = 1.0, hi = 0.0;
        for (size_t k = samples_per_period; k < r.fidelity.size(); ++k) lo = std::min(lo, r.fidelity[k]), hi = std::max(hi, r.fidelity[k]);
        res.amplitudes.push_back(hi - lo);
        if (first_trace.empty()) first_trace.assign(r.fidelity.begin() + samples_per_period, r.fidelity.end());
    }
    // Smallest lag at which the trace repeats itself.
    const int L = static_cast<int>(first_trace.size());
    double mean = 0.0, var = 0.0;
    for (double f : first_trace) mean += f;
    mean /= L;
    for (double f : first_trace) var += (f - mean) * (f - mean);
    var /= L;
    std::vector<double> msd;
    const int max_lag = std::min(L / 2, 3 * samples_per_period / 2);
    for (int lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (int k = 0; k + lag < L; ++k) acc += std::pow(first_trace[k + lag] - first_trace[k], 2);
        msd.push_back(var > 0.0 ? acc / (L - lag) / var : 0.0);
    }
    int best = -1;
    for (int lag = samples_per_period / 20; lag < max_lag; ++lag) {
        if (msd[lag] < 0.05 && msd[lag] <= msd[lag - 1] && msd[lag] <= msd[lag + 1]) {
            best = lag;
            break;
        }
    }
    if (best < 0) best = static_cast<int>(std::min_element(msd.begin() + samples_per_period / 20, msd.end() - 1) - msd.begin());
    // Parabolic refinement of the minimum.
    double frac = 0.0;
    const double den = msd[best - 1] - 2.0 * msd[best] + msd[best + 1];
    if (den > 0.0) frac = 0.5 * (msd[best - 1] - msd[best + 1]) / den;
    res.detected_period = (best + frac) * res.t_m / samples_per_period;
    if (scales.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (size_t k = 0; k < scales.size(); ++k) mx += std::log(scales[k]), my += std::log(res.amplitudes[k]);
        mx /= scales.size(), my /= scales.size();
        double sxy = 0.0, sxx = 0.0;
        for (size_t k = 0; k < scales.size(); ++k) {
            const double dx = std::log(scales[k]) - mx;
            sxy += dx * (std::log(res.amplitudes[k]) - my);
            sxx += dx * dx;
        }
        res.slope = sxy / sxx;
    }
    return res;
}

CoherenceDecay coherence_decay(const SystemParams& params, const std::vector<DriveTone>& tones, const NoiseParams& noise, int n1,
                               int n2, int periods, bool smooth) {
    const int N = params.n_cut;
    if (n1 < 0 || n2 < 0 || n1 > N || n2 > N || n1 == n2) throw InvalidArgument("coherence_decay: bad level pair");
    if (periods < 4) throw InvalidArgument("coherence_decay: needs at least 4 periods");
    const double t_m = micromotion_period(tones, params.chi);
    DriveSpec spec{tones, Abrupt{}, "q"};
    if (smooth) spec.envelope = RampUpDown{4.0 * t_m, 0.0, std::numeric_limits<double>::max()};
    const BlockModel m = single_cavity_model(params, spec, noise);
    DenseVector psi = DenseVector::Zero(N + 1);
    psi(n1) = psi(n2) = 1.0 / std::sqrt(2.0);
    std::vector<double> rec;
    const int first = smooth ? 12 : 1;
    for (int k = first; k < first + periods; ++k) rec.push_back(k * t_m);
    std::vector<double> ts, ys;
    run_model(m, psi, std::vector<double>(N + 1, 0.0), make_config(rec.back(), t_m / 2000.0, (N + 1) * params.chi, rec),
              [&](double t, const DenseMatrix& rc) {
                  ts.push_back(t);
                  ys.push_back(std::log(std::abs(rc(n1, n2))));
              });
    // Least-squares slope of log |rho_12| from the second period on.
    double mx = 0.0, my = 0.0;
    const size_t k0 = 1, K = ts.size() - k0;
    for (size_t k = k0; k < ts.size(); ++k) mx += ts[k], my += ys[k];
    mx /= K, my /= K;
    double sxy = 0.0, sxx = 0.0;
    for (size_t k = k0; k < ts.size(); ++k) sxy += (ts[k] - mx) * (ys[k] - my), sxx += (ts[k] - mx) * (ts[k] - mx);
    CoherenceDecay out;
    out.simulated = -sxy / sxx;
    out.analytic = dephasing_rates(tones, params, noise, N, !smooth).gamma(n1, n2).real();
    return out;
}

double loss_injection_fidelity(const SystemParams& params, const DriveSpec& drive, const std::vector<double>& target, double t_g,
                               double t_loss) {
    const int N = params.n_cut;
    const double t_m = micromotion_period(drive.tones, params.chi);
    const double step = t_m / 2000.0, rate = (N + 1) * params.chi;
    const BlockModel m = single_cavity_model(params, drive, NoiseParams{});
    const HilbertDims dims = m.full_dims();
    const DenseVector psi_c = kitten_plus(N).amplitudes;
    DenseVector psi = DenseVector::Zero(2 * (N + 1));
    for (int n = 0; n <= N; ++n) psi(2 * n) = psi_c(n);
    QuantumState s{dims, psi};
    if (t_loss >= 0.0 && t_loss <= t_g) {
        s = propagate_block_state(m, s, make_config(t_loss, step, rate, {t_loss}));
        DensityMatrix d = apply_cavity_loss(DensityMatrix::pure(s), "cavity");
        // Pure in, pure out: recover the vector from the rank-one matrix.
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d.matrix);
        s.amplitudes = es.eigenvectors().col(es.eigenvalues().size() - 1);
        PropagationConfig cfg = make_config(t_g, step, rate, {t_g});
        cfg.t_i = t_loss;
        s = propagate_block_state(m, s, cfg);
    } else {
        s = propagate_block_state(m, s, make_config(t_g, step, rate, {t_g}));
    }
    return recovered_fidelity(m, s.amplitudes * s.amplitudes.adjoint(), evolve_target(psi_c, target, t_g), true);
}

}  // namespace pnd
