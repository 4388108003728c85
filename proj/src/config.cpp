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


#include "pnd/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "pnd/codes.hpp"
#include "pnd/effective.hpp"
#include "pnd/error.hpp"
#include "pnd/optimizer.hpp"
#include "pnd/presets.hpp"
#include "pnd/units.hpp"

#ifndef PND_VERSION_STRING
#define PND_VERSION_STRING "0.0.0"
#endif

namespace pnd {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string version() { return PND_VERSION_STRING; }

namespace {

constexpr double kPi = std::numbers::pi;

// Object reader that remembers which keys were looked at, so anything left
// over can be rejected.
class Reader {
  public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw InvalidArgument(where_ + ": expected a JSON object");
    }

    bool has(const std::string& k) {
        used_.insert(k);
        auto it = j_.find(k);
        return it != j_.end() && !it->is_null();
    }

    template <class T>
    T get(const std::string& k, T def) {
        if (!has(k)) return def;
        return as<T>(j_.at(k), k);
    }

    template <class T>
    T req(const std::string& k) {
        if (!has(k)) throw InvalidArgument(where_ + ": missing key '" + k + "'");
        return as<T>(j_.at(k), k);
    }

    const json& node(const std::string& k) {
        if (!has(k)) throw InvalidArgument(where_ + ": missing key '" + k + "'");
        return j_.at(k);
    }

    Reader sub(const std::string& k) { return Reader(node(k), where_ + "." + k); }
    std::string path(const std::string& k) const { return where_ + "." + k; }

    void ignore(std::initializer_list<const char*> keys) {
        for (const char* k : keys) used_.insert(k);
    }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw InvalidArgument(where_ + ": unknown key '" + it.key() + "'");
    }

  private:
    template <class T>
    T as(const json& v, const std::string& k) const {
        const auto bad = [&](const char* what) { return InvalidArgument(where_ + "." + k + ": expected " + what); };
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw bad("a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw bad("a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) throw bad("a non-negative integer");
            return v.get<std::uint64_t>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw bad("an integer");
            const auto x = v.get<std::int64_t>();
            if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) throw bad("an integer in range");
            return static_cast<T>(x);
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw bad("a number");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) throw bad("an array of numbers");
            std::vector<double> out;
            for (const auto& e : v) {
                if (!e.is_number()) throw bad("an array of numbers");
                out.push_back(e.get<double>());
            }
            return out;
        } else {
            static_assert(sizeof(T) == 0, "unsupported type");
        }
    }

    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

std::vector<double> khz(const std::vector<double>& w) {
    std::vector<double> out;
    for (double x : w) out.push_back(units::to_khz(x));
    return out;
}

std::vector<double> from_khz(const std::vector<double>& f) {
    std::vector<double> out;
    for (double x : f) out.push_back(units::from_khz(x));
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(what + ": " + e.what());
    }
}

std::string resolve(const std::string& path, const RunOptions& opt) {
    std::filesystem::path p(path);
    if (p.is_relative() && !opt.base_dir.empty()) p = std::filesystem::path(opt.base_dir) / p;
    return p.string();
}

// "drive": {...} inline, or "drive_file": "path"; fallback table otherwise.
DriveDocument load_drive(Reader& r, const RunOptions& opt, const char* fallback_table) {
    const bool inline_drive = r.has("drive");
    const bool file = r.has("drive_file");
    if (inline_drive && file) throw InvalidArgument("give either 'drive' or 'drive_file', not both");
    if (inline_drive) return drive_from_json(r.node("drive"));
    if (file) {
        const std::string path = resolve(r.req<std::string>("drive_file"), opt);
        return drive_from_json(parse_json(read_file(path), path));
    }
    if (!fallback_table) throw InvalidArgument("missing 'drive' or 'drive_file'");
    return drive_from_json(json{{"table", fallback_table}});
}

NoiseParams read_noise(Reader r, NoiseParams def) {
    NoiseParams n;
    n.gamma_q = units::from_khz(r.get("gamma_q_kHz", units::to_khz(def.gamma_q)));
    n.gamma_phi = units::from_khz(r.get("gamma_phi_kHz", units::to_khz(def.gamma_phi)));
    n.kappa_a = units::from_khz(r.get("kappa_kHz", units::to_khz(def.kappa_a)));
    r.done();
    n.validate();
    return n;
}

ojson params_json(const SystemParams& p) {
    ojson j;
    j["chi_MHz"] = units::to_mhz(p.chi);
    j["kerr_kHz"] = units::to_khz(p.kerr);
    j["chi_prime_kHz"] = units::to_khz(p.chi_prime);
    j["n_cut"] = p.n_cut;
    return j;
}

std::string csv(const std::string& stamp, const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    std::string out = stamp;
    for (size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
        out += '\n';
    }
    return out;
}

struct Stamp {
    std::string hash;
    std::string line() const { return "# pnd " + version() + " config_hash=" + hash + "\n"; }
};

// ---------------------------------------------------------------- optimize

TargetSpec read_target(Reader r, int default_n_max, double system_kerr) {
    TargetSpec spec;
    const std::string kind = r.req<std::string>("kind");
    spec.n_max = r.get("n_max", default_n_max);
    spec.kerr_compensation = units::from_khz(r.get("kerr_compensation_kHz", 0.0));
    if (kind == "three_photon") {
        spec.kind = ThreePhoton{units::from_khz(r.req<double>("k3_kHz"))};
    } else if (kind == "parity") {
        spec.kind = ParityTarget{units::from_khz(r.req<double>("p_kHz"))};
    } else if (kind == "z_rotation") {
        spec.kind = ZRotation{units::from_khz(r.req<double>("g_r_kHz")), r.get("d_n", 2)};
    } else if (kind == "kerr_cancel") {
        spec.kind = KerrCancel{units::from_khz(r.get("k_kHz", units::to_khz(system_kerr)))};
    } else if (kind == "cphase") {
        spec.kind = CPhase{units::from_khz(r.req<double>("g_cr_kHz")), r.get("d_na", 2), r.get("d_nb", 2)};
    } else if (kind == "custom") {
        spec.kind = Custom{from_khz(r.req<std::vector<double>>("energies_kHz"))};
        spec.n_max = static_cast<int>(std::get<Custom>(spec.kind).energies.size()) - 1;
    } else {
        throw InvalidArgument("target.kind: unknown kind '" + kind + "'");
    }
    r.done();
    return spec;
}

OptimizerConfig read_optimizer(const json* j, std::uint64_t seed, int threads) {
    OptimizerConfig c;
    c.seed = seed;
    c.threads = threads;
    if (j) {
        Reader r(*j, "optimizer");
        if (r.has("detuning_menu")) {
            const json& menu = r.node("detuning_menu");
            if (!menu.is_array()) throw InvalidArgument("optimizer.detuning_menu: expected an array of \"p/q\" strings");
            c.detuning_menu.clear();
            for (const auto& e : menu) {
                if (!e.is_string()) throw InvalidArgument("optimizer.detuning_menu: expected an array of \"p/q\" strings");
                c.detuning_menu.push_back(Rational::parse(e.get<std::string>()));
            }
        }
        c.n_assignments = r.get("n_assignments", c.n_assignments);
        c.amp_bound = r.get("amp_bound", c.amp_bound);
        c.solver_tol = units::from_khz(r.get("solver_tol_kHz", units::to_khz(c.tolerance())));
        c.include_order4 = r.get("include_order4", c.include_order4);
        c.guard = r.get("guard", c.guard);
        c.max_iterations = r.get("max_iterations", c.max_iterations);
        c.prune_fraction = r.get("prune_fraction", c.prune_fraction);
        c.local_search = r.get("local_search", c.local_search);
        r.done();
    }
    c.validate();
    return c;
}

std::vector<std::vector<double>> spectrum_rows(const OptimizedDrive& d, double chi) {
    std::vector<std::vector<double>> rows;
    for (size_t n = 0; n < d.target.size(); ++n) {
        const auto& t = d.drive.tones[n];
        rows.push_back({static_cast<double>(n), units::to_khz(d.target[n]), units::to_khz(d.achieved.energies[n]), t.delta.value(),
                        std::abs(t.omega) / chi});
    }
    return rows;
}

ojson optimized_json(const OptimizedDrive& d, const SystemParams& p) {
    ojson j = drive_to_json({p, d.drive, d.target});
    j["achieved_kHz"] = khz(d.achieved.energies);
    j["objective"] = d.objective;
    j["residual_kHz"] = units::to_khz(d.residual);
    return j;
}

RunOutput cmd_optimize(const json& config, const RunOptions& opt, const Stamp& stamp) {
    Reader r(config, "config");
    const std::uint64_t config_seed = r.get<std::uint64_t>("seed", 1);
    const std::uint64_t seed = opt.seed ? *opt.seed : config_seed;
    const OptimizerConfig oc = read_optimizer(r.has("optimizer") ? &r.node("optimizer") : nullptr, seed, opt.threads);
    Envelope env = Abrupt{};
    if (r.has("envelope")) env = envelope_from_json(r.node("envelope"));
    const std::vector<std::string> columns = {"n", "E_target_kHz", "E_engineered_kHz", "delta_over_chi", "omega_over_chi"};

    RunOutput out;
    const bool cphase = r.has("target") && r.node("target").is_object() && r.node("target").value("kind", "") == "cphase";
    if (cphase) {
        TwoCavityParams tp = cphase_params();
        if (r.has("system")) {
            Reader s = r.sub("system");
            tp.chi_a = units::from_mhz(s.get("chi_a_MHz", units::to_mhz(tp.chi_a)));
            tp.chi_b = units::from_mhz(s.get("chi_b_MHz", units::to_mhz(tp.chi_b)));
            tp.chi_c = units::from_mhz(s.get("chi_c_MHz", units::to_mhz(tp.chi_c)));
            tp.n_cut_a = s.get("n_cut_a", tp.n_cut_a);
            tp.n_cut_b = s.get("n_cut_b", tp.n_cut_b);
            s.done();
        }
        tp.validate();
        const TargetSpec spec = read_target(r.sub("target"), std::max(tp.n_cut_a, tp.n_cut_b), 0.0);
        r.done();
        auto targets = make_target(spec);
        ojson doc;
        doc["pnd_version"] = version();
        doc["config_hash"] = stamp.hash;
        doc["drives"] = ojson::array();
        for (const char* q : {"a", "b", "c"}) {
            std::vector<double> t = targets.at(q);
            if (q[0] == 'a') t.resize(tp.n_cut_a + 1);
            if (q[0] == 'b') t.resize(tp.n_cut_b + 1);
            if (q[0] == 'c') t.resize(tp.n_cut_a + tp.n_cut_b + 1);
            SystemParams sp;
            sp.chi = two_cavity_chi(tp, q);
            sp.n_cut = static_cast<int>(t.size()) - 1;
            OptimizedDrive d = optimize_drives(t, sp, oc);
            d.drive.envelope = env;
            d.drive.target_qubit = q;
            doc["drives"].push_back(optimized_json(d, sp));
            out.files.push_back({std::string("spectrum_") + q + ".csv", csv(stamp.line(), columns, spectrum_rows(d, sp.chi))});
        }
        out.files.insert(out.files.begin(), {"drive.json", doc.dump(2) + "\n"});
        return out;
    }

    SystemParams p;
    {
        Reader s = r.sub("system");
        p.chi = units::from_mhz(s.req<double>("chi_MHz"));
        p.kerr = units::from_khz(s.get("kerr_kHz", 0.0));
        p.chi_prime = units::from_khz(s.get("chi_prime_kHz", 0.0));
        p.n_cut = s.get("n_cut", 6);
        s.done();
    }
    p.validate();
    const TargetSpec spec = read_target(r.sub("target"), p.n_cut, p.kerr);
    r.done();
    const std::vector<double> target = make_target(spec).at("cavity");
    SystemParams sp = p;
    sp.n_cut = std::max(p.n_cut, static_cast<int>(target.size()) - 1);
    OptimizedDrive d = optimize_drives(target, sp, oc);
    d.drive.envelope = env;
    ojson doc = optimized_json(d, sp);
    doc["pnd_version"] = version();
    doc["config_hash"] = stamp.hash;
    out.files.push_back({"drive.json", doc.dump(2) + "\n"});
    out.files.push_back({"spectrum.csv", csv(stamp.line(), columns, spectrum_rows(d, sp.chi))});
    return out;
}

// ---------------------------------------------------------------- verify

RunOutput cmd_verify(const json& config, const RunOptions& opt, const Stamp& stamp) {
    Reader r(config, "config");
    r.ignore({"seed"});
    DriveDocument doc = load_drive(r, opt, nullptr);
    if (r.has("target_kHz")) doc.target = from_khz(r.req<std::vector<double>>("target_kHz"));
    const double tol = r.get("tolerance_kHz", 0.5);
    const double guard = r.get("guard", kDefaultGuard);
    const bool kick = r.get("include_kick", true);
    NoiseParams nd;
    nd.gamma_q = nd.gamma_phi = units::from_khz(3.0);
    const NoiseParams noise = r.has("noise") ? read_noise(r.sub("noise"), nd) : nd;
    r.done();

    const SystemParams& p = doc.params;
    const int N = p.n_cut;
    const auto& tones = doc.drive.tones;
    doc.drive.validate(p.chi);
    const auto s2 = spectrum_order2(p, tones, guard);
    const auto s4 = spectrum_order4(p, tones, guard);
    const auto rates = dephasing_rates(tones, p, noise, N, kick, guard);
    const double t_m = micromotion_period(tones, p.chi);

    RunOutput out;
    const bool declared = !doc.target.empty();
    if (declared && static_cast<int>(doc.target.size()) != N + 1)
        throw InvalidArgument("verify: target has " + std::to_string(doc.target.size()) + " entries, expected n_cut + 1 = " +
                              std::to_string(N + 1));
    double max_res = 0.0, objective = 0.0;
    std::vector<std::vector<double>> rows;
    for (int n = 0; n <= N; ++n) {
        const double tgt = declared ? units::to_khz(doc.target[n]) : std::numeric_limits<double>::quiet_NaN();
        const double e4 = units::to_khz(s4.energies[n]);
        const double res = declared ? std::abs(e4 - tgt) : std::numeric_limits<double>::quiet_NaN();
        if (declared) max_res = std::max(max_res, res);
        const double pk = qubit_excitation_prob(tones, p, n, true, guard);
        objective += pk;
        rows.push_back({static_cast<double>(n), units::to_khz(s2.energies[n]), e4, tgt, res, pk,
                        qubit_excitation_prob(tones, p, n, false, guard)});
    }
    out.files.push_back({"verify.csv", csv(stamp.line(),
                                           {"n", "E_order2_kHz", "E_order4_kHz", "E_target_kHz", "residual_kHz", "p_excited",
                                            "p_excited_smooth"},
                                           rows)});
    std::vector<std::vector<double>> drows;
    for (int a = 0; a <= N; ++a)
        for (int b = a + 1; b <= N; ++b)
            drows.push_back({static_cast<double>(a), static_cast<double>(b), rates.gamma(a, b).real(), rates.gamma(a, b).imag()});
    out.files.push_back({"dephasing.csv", csv(stamp.line(), {"n1", "n2", "gamma_re_per_us", "gamma_im_per_us"}, drows)});

    const bool pass = !declared || max_res <= tol;
    ojson v;
    v["pnd_version"] = version();
    v["config_hash"] = stamp.hash;
    v["system"] = params_json(p);
    v["t_m_us"] = t_m;
    v["micromotion_gcd_over_chi"] = micromotion_gcd(tones).str();
    v["target_declared"] = declared;
    if (declared) v["max_residual_kHz"] = max_res;
    v["tolerance_kHz"] = tol;
    v["pass"] = pass;
    v["objective"] = objective;
    v["noise"] = {{"gamma_q_kHz", units::to_khz(noise.gamma_q)}, {"gamma_phi_kHz", units::to_khz(noise.gamma_phi)},
                  {"kappa_kHz", units::to_khz(noise.kappa_a)}};
    out.files.push_back({"verify.json", v.dump(2) + "\n"});
    if (!declared) out.diagnostics.push_back("no target declared; residual check skipped");
    if (!pass) {
        std::ostringstream os;
        os << "max residual " << format_number(max_res) << " kHz exceeds " << format_number(tol) << " kHz";
        out.diagnostics.push_back(os.str());
        out.status = 1;
    }
    return out;
}

// ---------------------------------------------------------------- simulate

QuantumState read_state(Reader r, int n_cut) {
    const std::string kind = r.req<std::string>("kind");
    QuantumState s;
    if (kind == "fock") {
        const int n = r.req<int>("n");
        if (n < 0 || n > n_cut) throw InvalidArgument("initial_state.n outside 0..n_cut");
        s = fock_state(n, n_cut);
    } else if (kind == "cat") {
        const cplx alpha(r.req<double>("alpha"), r.get("alpha_im", 0.0));
        const std::string par = r.get<std::string>("parity", "even");
        if (par != "even" && par != "odd") throw InvalidArgument("initial_state.parity: expected \"even\" or \"odd\"");
        s = cat_state(alpha, par == "even" ? Parity::Even : Parity::Odd, n_cut);
    } else if (kind == "kitten_plus") {
        s = kitten_plus(n_cut);
    } else if (kind == "amplitudes") {
        const auto re = r.req<std::vector<double>>("re");
        const auto im = r.get("im", std::vector<double>(re.size(), 0.0));
        if (static_cast<int>(re.size()) != n_cut + 1 || im.size() != re.size())
            throw InvalidArgument("initial_state amplitudes must have n_cut + 1 entries");
        DenseVector v(n_cut + 1);
        for (int n = 0; n <= n_cut; ++n) v(n) = cplx(re[n], im[n]);
        if (v.norm() == 0.0) throw InvalidArgument("initial_state amplitudes are all zero");
        s = normalized({HilbertDims("cavity", n_cut + 1), v});
    } else {
        throw InvalidArgument("initial_state.kind: unknown kind '" + kind + "'");
    }
    r.done();
    return s;
}

std::vector<double> kappas(Reader& r, const std::vector<double>& def) {
    return from_khz(r.get("kappa_scan_kHz", khz(def)));
}

ExperimentReport simulate(const std::string& experiment, Reader& r, const RunOptions& opt) {
    const int threads = opt.threads;
    if (experiment == "pi8") {
        const std::string scheme = r.get<std::string>("scheme", "pnd");
        Pi8Scheme sc;
        if (scheme == "pnd") sc = Pi8Scheme::Pnd;
        else if (scheme == "snap") sc = Pi8Scheme::Snap;
        else if (scheme == "quartic_kerr") sc = Pi8Scheme::QuarticKerr;
        else throw InvalidArgument("config.scheme: expected pnd, snap or quartic_kerr");
        Pi8Config c = Pi8Config::defaults(sc, r.get("smooth", false));
        if (r.has("drive") || r.has("drive_file")) {
            const DriveDocument d = load_drive(r, opt, nullptr);
            c.params = d.params;
            c.tones = d.drive.tones;
        }
        c.g_r = units::from_khz(r.get("g_r_kHz", units::to_khz(c.g_r)));
        c.t_g = r.get("t_g_us", c.t_g);
        c.qubit_noise.gamma_q = units::from_khz(r.get("gamma_q_kHz", units::to_khz(c.qubit_noise.gamma_q)));
        c.qubit_noise.gamma_phi = units::from_khz(r.get("gamma_phi_kHz", units::to_khz(c.qubit_noise.gamma_phi)));
        c.kappa_scan = kappas(r, c.kappa_scan);
        c.recovery = r.get("recovery", c.recovery);
        c.samples = r.get("samples", c.samples);
        c.steps_per_period = r.get("steps_per_period", c.steps_per_period);
        c.threads = threads;
        r.done();
        return pi8_gate_experiment(c);
    }
    if (experiment == "theta_scan" || experiment == "tg_scan") {
        ThetaScanConfig c = ThetaScanConfig::defaults();
        if (experiment == "theta_scan") c.tg_scale.clear();
        else c.theta.clear();
        if (r.has("drive") || r.has("drive_file")) {
            const DriveDocument d = load_drive(r, opt, nullptr);
            c.params = d.params;
            c.tones = d.drive.tones;
        }
        c.g_r = units::from_khz(r.get("g_r_kHz", units::to_khz(c.g_r)));
        c.gamma_q = units::from_khz(r.get("gamma_q_kHz", units::to_khz(c.gamma_q)));
        c.gamma_phi = units::from_khz(r.get("gamma_phi_kHz", units::to_khz(c.gamma_phi)));
        std::vector<double> th;
        for (double t : c.theta) th.push_back(t / kPi);
        th = r.get("theta_over_pi", th);
        c.theta.clear();
        for (double t : th) c.theta.push_back(t * kPi);
        c.tg_scale = r.get("tg_scale", c.tg_scale);
        c.steps_per_period = r.get("steps_per_period", c.steps_per_period);
        c.threads = threads;
        r.done();
        ExperimentReport rep = theta_scaling_experiment(c);
        rep.name = experiment;
        return rep;
    }
    if (experiment == "kerr_cancel") {
        KerrCancelConfig c = KerrCancelConfig::defaults();
        if (r.has("drive") || r.has("drive_file")) {
            const DriveDocument d = load_drive(r, opt, nullptr);
            c.params = d.params;
            c.tones = d.drive.tones;
        }
        c.alpha = r.get("alpha", c.alpha);
        c.duration = r.get("duration_us", c.duration);
        c.smooth = r.get("smooth", c.smooth);
        c.ramp = r.get("ramp_us", c.ramp);
        c.noise.gamma_q = units::from_khz(r.get("gamma_q_kHz", units::to_khz(c.noise.gamma_q)));
        c.noise.gamma_phi = units::from_khz(r.get("gamma_phi_kHz", units::to_khz(c.noise.gamma_phi)));
        c.noise.kappa_a = units::from_khz(r.get("kappa_kHz", units::to_khz(c.noise.kappa_a)));
        c.check_times = r.get("check_times_us", c.check_times);
        c.wigner_times = r.get("wigner_times_us", c.wigner_times);
        if (r.has("wigner_grid")) {
            Reader g = r.sub("wigner_grid");
            c.grid.x_min = g.get("x_min", c.grid.x_min);
            c.grid.x_max = g.get("x_max", c.grid.x_max);
            c.grid.p_min = g.get("p_min", c.grid.p_min);
            c.grid.p_max = g.get("p_max", c.grid.p_max);
            c.grid.resolution = g.get("resolution", c.grid.resolution);
            g.done();
        }
        c.sample = r.get("sample_us", c.sample);
        c.steps_per_period = r.get("steps_per_period", c.steps_per_period);
        c.threads = threads;
        r.done();
        return kerr_cancel_experiment(c);
    }
    if (experiment == "cphase") {
        CphaseConfig c = CphaseConfig::defaults();
        if (r.has("system")) {
            Reader s = r.sub("system");
            c.params.chi_a = units::from_mhz(s.get("chi_a_MHz", units::to_mhz(c.params.chi_a)));
            c.params.chi_b = units::from_mhz(s.get("chi_b_MHz", units::to_mhz(c.params.chi_b)));
            c.params.chi_c = units::from_mhz(s.get("chi_c_MHz", units::to_mhz(c.params.chi_c)));
            c.params.n_cut_a = s.get("n_cut_a", c.params.n_cut_a);
            c.params.n_cut_b = s.get("n_cut_b", c.params.n_cut_b);
            s.done();
        }
        if (r.has("drives")) {
            const json& arr = r.node("drives");
            if (!arr.is_array()) throw InvalidArgument("config.drives: expected an array of drive objects");
            c.drives.clear();
            for (const auto& d : arr) c.drives.push_back(drive_from_json(d).drive);
        }
        c.g_cr = units::from_khz(r.get("g_cr_kHz", units::to_khz(c.g_cr)));
        c.smooth = r.get("smooth", c.smooth);
        c.gamma_q = units::from_khz(r.get("gamma_q_kHz", units::to_khz(c.gamma_q)));
        c.kappa_scan = kappas(r, c.kappa_scan);
        c.recovery = r.get("recovery", c.recovery);
        c.samples = r.get("samples", c.samples);
        c.steps_per_period = r.get("steps_per_period", c.steps_per_period);
        c.threads = threads;
        r.done();
        return cphase_experiment(c);
    }
    if (experiment == "custom") {
        CustomConfig c;
        const DriveDocument d = load_drive(r, opt, nullptr);
        c.params = d.params;
        c.drive = d.drive;
        c.target = r.has("target_kHz") ? from_khz(r.req<std::vector<double>>("target_kHz")) : std::vector<double>{};
        c.psi0 = r.has("initial_state") ? read_state(r.sub("initial_state"), c.params.n_cut) : kitten_plus(c.params.n_cut);
        c.noise = r.has("noise") ? read_noise(r.sub("noise"), {}) : NoiseParams{};
        c.duration = r.req<double>("duration_us");
        c.samples = r.get("samples", c.samples);
        c.steps_per_period = r.get("steps_per_period", c.steps_per_period);
        r.done();
        return custom_experiment(c);
    }
    throw InvalidArgument("config.experiment: expected pi8, theta_scan, tg_scan, kerr_cancel, cphase or custom");
}

std::string time_tag(double t) {
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) return std::to_string(static_cast<long long>(r));
    return format_number(t);
}

RunOutput cmd_simulate(const json& config, const RunOptions& opt, const Stamp& stamp) {
    Reader r(config, "config");
    const std::string experiment = r.req<std::string>("experiment");
    const std::uint64_t config_seed = r.get<std::uint64_t>("seed", 1);
    const std::uint64_t seed = opt.seed ? *opt.seed : config_seed;
    const ExperimentReport rep = simulate(experiment, r, opt);

    RunOutput out;
    ojson files = ojson::array();
    for (size_t k = 0; k < rep.series.size(); ++k) {
        const auto& s = rep.series[k];
        const std::string name = k == 0 ? "series.csv" : s.name + ".csv";
        out.files.push_back({name, csv(stamp.line(), s.columns, s.rows)});
        files.push_back(name);
    }
    for (const auto& w : rep.wigner) {
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < w.grid.x.size(); ++i)
            for (size_t j = 0; j < w.grid.p.size(); ++j) rows.push_back({w.grid.x[i], w.grid.p[j], w.grid.values(i, j)});
        const std::string name = "wigner_t" + time_tag(w.t) + ".csv";
        out.files.push_back({name, csv(stamp.line(), {"x", "p", "W"}, rows)});
        files.push_back(name);
    }
    ojson rj;
    rj["pnd_version"] = version();
    rj["config_hash"] = stamp.hash;
    rj["command"] = "simulate";
    rj["experiment"] = rep.name;
    rj["seed"] = seed;
    rj["fidelity_convention"] = "sqrt(<psi_T|rho_c|psi_T>)";
    rj["inputs"] = ojson::parse(rep.inputs.dump());
    ojson sc = ojson::object();
    for (const auto& [k, v] : rep.scalars) sc[k] = v;
    rj["scalars"] = sc;
    rj["files"] = files;
    out.files.insert(out.files.begin(), {"report.json", rj.dump(2) + "\n"});
    return out;
}

}  // namespace

// ---------------------------------------------------------------- drive documents

json envelope_to_json(const Envelope& env) {
    return std::visit(
        [](const auto& e) -> json {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Abrupt>) {
                json j = {{"kind", "abrupt"}, {"t_i_us", e.t_i}};
                if (std::isfinite(e.t_f)) j["t_f_us"] = e.t_f;
                return j;
            } else if constexpr (std::is_same_v<T, SineGate>) {
                return {{"kind", "sine"}, {"t_g_us", e.t_g}};
            } else {
                return {{"kind", "ramp"}, {"t_s_us", e.t_s}, {"t_i_us", e.t_i}, {"t_f_us", e.t_f}};
            }
        },
        env);
}

Envelope envelope_from_json(const json& j) {
    Reader r(j, "envelope");
    const std::string kind = r.req<std::string>("kind");
    Envelope env;
    if (kind == "abrupt") {
        env = Abrupt{r.get("t_i_us", 0.0), r.get("t_f_us", std::numeric_limits<double>::infinity())};
    } else if (kind == "sine") {
        const double tg = r.req<double>("t_g_us");
        if (!(tg > 0.0)) throw InvalidArgument("envelope.t_g_us must be positive");
        env = SineGate{tg};
    } else if (kind == "ramp") {
        const RampUpDown e{r.req<double>("t_s_us"), r.get("t_i_us", 0.0), r.req<double>("t_f_us")};
        if (!(e.t_s > 0.0) || !(e.t_f > e.t_i)) throw InvalidArgument("envelope: ramp needs t_s_us > 0 and t_f_us > t_i_us");
        env = e;
    } else {
        throw InvalidArgument("envelope.kind: expected abrupt, sine or ramp");
    }
    r.done();
    return env;
}

DriveDocument drive_from_json(const json& j) {
    Reader r(j, "drive");
    r.ignore({"achieved_kHz", "objective", "residual_kHz", "pnd_version", "config_hash"});
    DriveDocument doc;
    if (r.has("table")) {
        const PublishedTable& t = published_table(r.req<std::string>("table"));
        doc.params = table_params(t);
        doc.drive = table_drive(t, r.has("envelope") ? envelope_from_json(r.node("envelope")) : Envelope{Abrupt{}});
        doc.target = from_khz(r.get("target_kHz", t.target_khz));
        r.done();
        return doc;
    }
    doc.params.chi = units::from_mhz(r.req<double>("chi_MHz"));
    doc.params.kerr = units::from_khz(r.get("kerr_kHz", 0.0));
    doc.params.chi_prime = units::from_khz(r.get("chi_prime_kHz", 0.0));
    doc.drive.target_qubit = r.get<std::string>("qubit", "q");
    const json& tones = r.node("tones");
    if (!tones.is_array()) throw InvalidArgument("drive.tones: expected an array");
    int max_m = 0;
    for (size_t k = 0; k < tones.size(); ++k) {
        Reader t(tones[k], "drive.tones[" + std::to_string(k) + "]");
        DriveTone tone;
        tone.m = t.req<int>("m");
        if (tone.m < 0) throw InvalidArgument("drive.tones: m must be >= 0");
        tone.omega = cplx(t.get("omega_re_over_chi", 0.0), t.get("omega_im_over_chi", 0.0)) * doc.params.chi;
        tone.delta = Rational(t.req<std::int64_t>("delta_num"), t.get<std::int64_t>("delta_den", 1));
        t.done();
        max_m = std::max(max_m, tone.m);
        doc.drive.tones.push_back(tone);
    }
    doc.params.n_cut = r.get("n_cut", std::max(1, max_m));
    if (r.has("envelope")) doc.drive.envelope = envelope_from_json(r.node("envelope"));
    if (r.has("target_kHz")) doc.target = from_khz(r.req<std::vector<double>>("target_kHz"));
    r.done();
    doc.params.validate();
    return doc;
}

ojson drive_to_json(const DriveDocument& doc) {
    ojson j;
    const double chi = doc.params.chi;
    j["chi_MHz"] = units::to_mhz(chi);
    j["kerr_kHz"] = units::to_khz(doc.params.kerr);
    j["chi_prime_kHz"] = units::to_khz(doc.params.chi_prime);
    j["n_cut"] = doc.params.n_cut;
    j["qubit"] = doc.drive.target_qubit;
    j["tones"] = ojson::array();
    for (const auto& t : doc.drive.tones) {
        ojson tj;
        tj["m"] = t.m;
        tj["omega_re_over_chi"] = t.omega.real() / chi;
        tj["omega_im_over_chi"] = t.omega.imag() / chi;
        tj["delta_num"] = t.delta.num();
        tj["delta_den"] = t.delta.den();
        j["tones"].push_back(tj);
    }
    j["envelope"] = ojson::parse(envelope_to_json(doc.drive.envelope).dump());
    if (!doc.target.empty()) j["target_kHz"] = khz(doc.target);
    return j;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::uint64_t config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunOutput run_command(const std::string& command, const json& config, const RunOptions& options) {
    if (!config.is_object()) throw InvalidArgument("config: expected a JSON object");
    if (options.threads < 1) throw InvalidArgument("threads must be >= 1");
    json effective = config;
    if (options.seed) effective["seed"] = *options.seed;
    const Stamp stamp{hash_hex(config_hash(effective))};
    if (command == "optimize") return cmd_optimize(config, options, stamp);
    if (command == "verify") return cmd_verify(config, options, stamp);
    if (command == "simulate") return cmd_simulate(config, options, stamp);
    throw InvalidArgument("unknown command '" + command + "' (expected optimize, verify or simulate)");
}

}  // namespace pnd
