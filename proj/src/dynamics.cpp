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

#include "pnd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pnd/effective.hpp"
#include "pnd/error.hpp"

namespace pnd {

namespace {

constexpr cplx kI(0.0, 1.0);

void check_step(const PropagationConfig& cfg) {
    if (!(cfg.step > 0.0)) throw InvalidArgument("propagation step must be positive");
    if (!(cfg.t_f >= cfg.t_i)) throw InvalidArgument("propagation span must satisfy t_f >= t_i");
    if (cfg.max_phase_rate > 0.0) {
        const double limit = 2.0 * std::numbers::pi / (40.0 * cfg.max_phase_rate);
        if (cfg.step > limit * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "step-size violation: step " << cfg.step << " us exceeds 2pi/(40 x max phase rate) = " << limit << " us";
            throw InvalidArgument(os.str());
        }
    }
}

std::vector<double> schedule(const PropagationConfig& cfg) {
    std::vector<double> rec = cfg.record_times;
    if (rec.empty()) rec.push_back(cfg.t_f);
    std::sort(rec.begin(), rec.end());
    const double slack = 1e-12 * std::max(1.0, std::abs(cfg.t_f));
    for (double t : rec) {
        if (t < cfg.t_i - slack || t > cfg.t_f + slack) throw InvalidArgument("record time outside the propagation span");
    }
    return rec;
}

// Drives `advance(t, h)` in fixed steps and calls `record(t)` at each record
// time. Steps are shrunk uniformly within a segment so record times and
// breakpoints are hit exactly.
template <class Advance, class Record>
void run_schedule(const PropagationConfig& cfg, Advance&& advance, Record&& record) {
    check_step(cfg);
    const auto rec = schedule(cfg);
    std::vector<std::pair<double, bool>> stops;
    for (double t : rec) stops.push_back({t, true});
    for (double t : cfg.breakpoints)
        if (t > cfg.t_i && t < cfg.t_f) stops.push_back({t, false});
    std::stable_sort(stops.begin(), stops.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double t = cfg.t_i;
    for (const auto& [target, is_record] : stops) {
        const double span = target - t;
        if (span > 0.0) {
            const long n = std::max(1L, static_cast<long>(std::ceil(span / cfg.step - 1e-9)));
            const double h = span / n;
            for (long k = 0; k < n; ++k) {
                const double a = t + k * h, b = (k + 1 == n) ? target : t + (k + 1) * h;
                advance(a, b - a, b);
            }
        }
        t = std::max(t, target);
        if (is_record) record(t);
    }
}

// End-of-step stage time, one ulp inside the step.
inline double stage_end(double t, double t_end) { return std::nextafter(t_end, t); }

void check_density(const DenseMatrix& rho, double trace0, double t) {
    const double tr = rho.trace().real();
    if (std::abs(tr - trace0) > 1e-6) {
        std::ostringstream os;
        os << "trace drift " << tr - trace0 << " at t=" << t << " us";
        throw ToleranceError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-6) {
        std::ostringstream os;
        os << "positivity breach: eigenvalue " << es.eigenvalues().minCoeff() << " at t=" << t << " us";
        throw ToleranceError(os.str());
    }
}

void check_norm(const DenseVector& psi, double t) {
    const double dn = std::abs(psi.norm() - 1.0);
    if (dn > 1e-8) {
        std::ostringstream os;
        os << "norm drift " << dn << " at t=" << t << " us";
        throw ToleranceError(os.str());
    }
}

}  // namespace

PropagationConfig default_propagation(const std::vector<DriveTone>& tones, double chi, int n_cut, double t_i, double t_f) {
    PropagationConfig cfg;
    cfg.t_i = t_i;
    cfg.t_f = t_f;
    cfg.step = micromotion_period(tones, chi) / 2000.0;
    cfg.max_phase_rate = (n_cut + 1) * chi;
    return cfg;
}

std::vector<QuantumState> propagate_state(const HamiltonianFn& h, const QuantumState& psi0, const PropagationConfig& config) {
    if (std::abs(psi0.amplitudes.norm() - 1.0) > 1e-10) throw InvalidArgument("propagate_state: psi0 is not normalised");
    DenseVector psi = psi0.amplitudes;
    std::vector<QuantumState> out;
    auto f = [&](double t, const DenseVector& y) -> DenseVector { return -kI * (h(t) * y); };
    run_schedule(
        config,
        [&](double t, double dt, double t_end) {
            DenseVector k1 = f(t, psi);
            DenseVector k2 = f(t + dt / 2, psi + dt / 2 * k1);
            DenseVector k3 = f(t + dt / 2, psi + dt / 2 * k2);
            DenseVector k4 = f(stage_end(t, t_end), psi + dt * k3);
            psi += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        },
        [&](double t) {
            check_norm(psi, t);
            out.push_back({psi0.dims, psi});
        });
    return out;
}

std::vector<DensityMatrix> propagate_lindblad(const HamiltonianFn& h, const DensityMatrix& rho0, const JumpSet& jumps,
                                              const PropagationConfig& config) {
    if (!is_hermitian(rho0.matrix, 1e-10)) throw InvalidArgument("propagate_lindblad: rho0 is not Hermitian");
    const double trace0 = rho0.matrix.trace().real();
    std::vector<DenseMatrix> L, LdL;
    for (const auto& j : jumps) {
        if (j.rate < 0.0) throw InvalidArgument("jump rates must be non-negative");
        require_same_dims(j.op.dims, rho0.dims, "propagate_lindblad");
        L.push_back(std::sqrt(j.rate) * j.op.matrix);
        LdL.push_back(L.back().adjoint() * L.back());
    }
    auto f = [&](double t, const DenseMatrix& r) -> DenseMatrix {
        const DenseMatrix H = h(t);
        DenseMatrix out = -kI * (H * r - r * H);
        for (size_t k = 0; k < L.size(); ++k) {
            out += L[k] * r * L[k].adjoint() - 0.5 * (LdL[k] * r + r * LdL[k]);
        }
        return out;
    };
    DenseMatrix rho = rho0.matrix;
    std::vector<DensityMatrix> out;
    run_schedule(
        config,
        [&](double t, double dt, double t_end) {
            DenseMatrix k1 = f(t, rho);
            DenseMatrix k2 = f(t + dt / 2, rho + dt / 2 * k1);
            DenseMatrix k3 = f(t + dt / 2, rho + dt / 2 * k2);
            DenseMatrix k4 = f(stage_end(t, t_end), rho + dt * k3);
            rho += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rho = 0.5 * (rho + rho.adjoint()).eval();
        },
        [&](double t) {
            check_density(rho, trace0, t);
            out.push_back({rho0.dims, rho});
        });
    return out;
}

BlockModel single_cavity_model(const SystemParams& params, const DriveSpec& spec, const NoiseParams& noise) {
    params.validate();
    noise.validate();
    const int N = params.n_cut;
    BlockModel m;
    m.cavity_dims = HilbertDims("cavity", N + 1);
    m.qubit_dims = HilbertDims("qubit", 2);
    for (int n = 0; n <= N; ++n) {
        DenseMatrix h = DenseMatrix::Zero(2, 2);
        const double kerr = -0.5 * params.kerr * n * (n - 1);
        h(0, 0) = kerr;
        h(1, 1) = kerr - n * params.chi + 0.5 * params.chi_prime * n * (n - 1);
        m.static_h.push_back(h);
    }
    const auto tones = spec.tones;
    const auto env = spec.envelope;
    const double chi = params.chi;
    m.drives.push_back({sigma_minus().matrix, [tones, env, chi](double t) { return drive_amplitude(tones, env, chi, t); }});
    m.envelope = [env](double t) { return envelope_value(env, t); };
    if (noise.gamma_q > 0.0) m.qubit_jumps.push_back({sigma_minus().matrix, noise.gamma_q});
    if (noise.gamma_phi > 0.0) m.qubit_jumps.push_back({projector_excited().matrix, noise.gamma_phi});
    if (noise.kappa_a > 0.0) m.cavity_jumps.push_back({0, noise.kappa_a});
    return m;
}

BlockModel two_cavity_model(const TwoCavityParams& params, const std::vector<DriveSpec>& specs, const TwoCavityNoise& noise) {
    params.validate();
    BlockModel m;
    m.cavity_dims = HilbertDims({{"cavity_a", params.n_cut_a + 1}, {"cavity_b", params.n_cut_b + 1}});
    m.qubit_dims = HilbertDims({{"qubit_a", 2}, {"qubit_b", 2}, {"qubit_c", 2}});
    for (int na = 0; na <= params.n_cut_a; ++na) {
        for (int nb = 0; nb <= params.n_cut_b; ++nb) {
            DenseMatrix h = DenseMatrix::Zero(8, 8);
            for (int r = 0; r < 8; ++r) {
                double e = 0.0;
                if (r & 4) e -= params.chi_a * na;
                if (r & 2) e -= params.chi_b * nb;
                if (r & 1) e -= params.chi_c * (na + nb);
                h(r, r) = e;
            }
            m.static_h.push_back(h);
        }
    }
    const char* names[3] = {"qubit_a", "qubit_b", "qubit_c"};
    auto local = [&](const CompositeOperator& op) { return embed(op, m.qubit_dims).matrix; };
    for (size_t i = 0; i < specs.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (specs[i].target_qubit == specs[j].target_qubit) throw InvalidArgument("two drives target the same qubit");
    for (const auto& spec : specs) {
        const double chi = two_cavity_chi(params, spec.target_qubit);
        const int k = spec.target_qubit == "a" ? 0 : (spec.target_qubit == "b" ? 1 : 2);
        const auto tones = spec.tones;
        const auto env = spec.envelope;
        m.drives.push_back({local(sigma_minus(names[k])), [tones, env, chi](double t) { return drive_amplitude(tones, env, chi, t); }});
        if (!m.envelope) m.envelope = [env](double t) { return envelope_value(env, t); };
    }
    for (int k = 0; k < 3; ++k) {
        if (noise.gamma_q[k] < 0.0 || noise.gamma_phi[k] < 0.0) throw InvalidArgument("noise rates must be non-negative");
        if (noise.gamma_q[k] > 0.0) m.qubit_jumps.push_back({local(sigma_minus(names[k])), noise.gamma_q[k]});
        if (noise.gamma_phi[k] > 0.0) m.qubit_jumps.push_back({local(projector_excited(names[k])), noise.gamma_phi[k]});
    }
    if (noise.kappa_a < 0.0 || noise.kappa_b < 0.0) throw InvalidArgument("noise rates must be non-negative");
    if (noise.kappa_a > 0.0) m.cavity_jumps.push_back({0, noise.kappa_a});
    if (noise.kappa_b > 0.0) m.cavity_jumps.push_back({1, noise.kappa_b});
    return m;
}

BlockModel cavity_only_model(int n_cut, const std::vector<double>& energies, double kappa) {
    if (static_cast<int>(energies.size()) < n_cut + 1) throw InvalidArgument("cavity_only_model: energies shorter than n_cut + 1");
    BlockModel m;
    m.cavity_dims = HilbertDims("cavity", n_cut + 1);
    for (int n = 0; n <= n_cut; ++n) m.static_h.push_back(DenseMatrix::Constant(1, 1, energies[n]));
    if (kappa < 0.0) throw InvalidArgument("noise rates must be non-negative");
    if (kappa > 0.0) m.cavity_jumps.push_back({0, kappa});
    return m;
}

namespace {

struct Triplet {
    int row, col;
    cplx value;
};

std::vector<Triplet> sparse_of(const DenseMatrix& m) {
    std::vector<Triplet> t;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) t.push_back({i, j, m(i, j)});
    return t;
}

// Precomputed structure shared by the block propagators. The diagonal of the
// static blocks is integrated exactly: the integrators carry the state in the
// frame rotating with it, so RK4 only resolves the drive and noise terms.
class BlockEngine {
  public:
    explicit BlockEngine(const BlockModel& m) : m_(m), C_(m.n_configs()), Q_(m.register_dim()) {
        if (static_cast<int>(m.static_h.size()) != C_) throw InvalidArgument("block model: one static block per configuration");
        const auto& subs = m.cavity_dims.subsystems();
        std::vector<int> stride(subs.size(), 1);
        for (int k = static_cast<int>(subs.size()) - 2; k >= 0; --k) stride[k] = stride[k + 1] * subs[k + 1].dim;
        photons_.assign(subs.size(), std::vector<int>(C_));
        up_.assign(subs.size(), std::vector<int>(C_, -1));
        for (int c = 0; c < C_; ++c) {
            for (size_t k = 0; k < subs.size(); ++k) {
                const int n = (c / stride[k]) % subs[k].dim;
                photons_[k][c] = n;
                if (n + 1 < subs[k].dim) up_[k][c] = c + stride[k];
            }
        }
        diag_ = Eigen::VectorXd(C_ * Q_);
        for (int c = 0; c < C_; ++c) {
            if (m.static_h[c].rows() != Q_ || m.static_h[c].cols() != Q_) throw InvalidArgument("block model: static block size mismatch");
            if (!is_hermitian(m.static_h[c], 1e-12)) throw InvalidArgument("block model: static block is not Hermitian");
            diag_.segment(c * Q_, Q_) = m.static_h[c].diagonal().real();
            DenseMatrix off = m.static_h[c];
            off.diagonal().setZero();
            off_.push_back(off);
        }
        for (const auto& d : m.drives) {
            drive_ops_.push_back(d.op);
            drive_adj_.push_back(d.op.adjoint());
        }
        decay_ = DenseMatrix::Zero(Q_, Q_);
        for (const auto& j : m.qubit_jumps) {
            if (j.rate < 0.0) throw InvalidArgument("jump rates must be non-negative");
            const DenseMatrix L = std::sqrt(j.rate) * j.op;
            jumps_.push_back(sparse_of(L));
            decay_ += L.adjoint() * L;
        }
        cav_decay_.assign(C_, 0.0);
        for (const auto& j : m.cavity_jumps) {
            if (j.mode < 0 || j.mode >= static_cast<int>(subs.size())) throw InvalidArgument("cavity jump on unknown mode");
            if (j.rate < 0.0) throw InvalidArgument("jump rates must be non-negative");
            for (int c = 0; c < C_; ++c) cav_decay_[c] += j.rate * photons_[j.mode][c];
        }
    }

    // exp(-i diag t)
    DenseVector phases(double t) const {
        DenseVector u(diag_.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::polar(1.0, -diag_(i) * t);
        return u;
    }

    // Rotating-frame derivative of a stacked block vector.
    void state_rhs(double t, const DenseVector& yt, DenseVector& out) const {
        const DenseVector u = phases(t);
        const DenseVector y = u.cwiseProduct(yt);
        const DenseMatrix hd = drive_part(t);
        for (int c = 0; c < C_; ++c) out.segment(c * Q_, Q_) = -kI * ((off_[c] + hd) * y.segment(c * Q_, Q_));
        out = u.conjugate().cwiseProduct(out);
    }

    void lindblad_rhs(double t, const DenseMatrix& rt, DenseMatrix& out) const {
        const DenseVector u = phases(t);
        const DenseMatrix P = u * u.adjoint();
        rho_ = P.cwiseProduct(rt);
        lab_rhs(t, rho_, out);
        out = P.conjugate().cwiseProduct(out);
    }

    int dim() const { return C_ * Q_; }

  private:
    DenseMatrix drive_part(double t) const {
        DenseMatrix h = DenseMatrix::Zero(Q_, Q_);
        for (size_t d = 0; d < drive_ops_.size(); ++d) {
            const cplx a = m_.drives[d].amplitude(t);
            if (a != 0.0) h += a * drive_ops_[d] + std::conj(a) * drive_adj_[d];
        }
        return h;
    }

    // Lab-frame master equation without the static diagonal.
    void lab_rhs(double t, const DenseMatrix& r, DenseMatrix& out) const {
        const DenseMatrix hd = drive_part(t);
        // Non-Hermitian block generator: H - (i/2) sum L^dag L.
        heff_.resize(C_);
        for (int c = 0; c < C_; ++c) {
            heff_[c] = off_[c] + hd - 0.5 * kI * decay_;
            heff_[c].diagonal().array() -= 0.5 * kI * cav_decay_[c];
        }
        for (int c = 0; c < C_; ++c) out.middleRows(c * Q_, Q_).noalias() = -kI * (heff_[c] * r.middleRows(c * Q_, Q_));
        for (int c = 0; c < C_; ++c) out.middleCols(c * Q_, Q_).noalias() += kI * (r.middleCols(c * Q_, Q_) * heff_[c].adjoint());
        for (const auto& trip : jumps_) {
            for (const auto& a : trip)
                for (const auto& b : trip) {
                    const cplx w = a.value * std::conj(b.value);
                    for (int c = 0; c < C_; ++c)
                        for (int d = 0; d < C_; ++d) out(c * Q_ + a.row, d * Q_ + b.row) += w * r(c * Q_ + a.col, d * Q_ + b.col);
                }
        }
        for (const auto& j : m_.cavity_jumps) {
            const auto& up = up_[j.mode];
            const auto& n = photons_[j.mode];
            for (int c = 0; c < C_; ++c) {
                if (up[c] < 0) continue;
                for (int d = 0; d < C_; ++d) {
                    if (up[d] < 0) continue;
                    const double w = j.rate * std::sqrt((n[c] + 1.0) * (n[d] + 1.0));
                    out.block(c * Q_, d * Q_, Q_, Q_) += w * r.block(up[c] * Q_, up[d] * Q_, Q_, Q_);
                }
            }
        }
    }

    const BlockModel& m_;
    int C_, Q_;
    std::vector<std::vector<int>> photons_, up_;
    Eigen::VectorXd diag_;
    std::vector<DenseMatrix> off_;
    std::vector<DenseMatrix> drive_ops_, drive_adj_;
    std::vector<std::vector<Triplet>> jumps_;
    DenseMatrix decay_;
    std::vector<double> cav_decay_;
    mutable std::vector<DenseMatrix> heff_;
    mutable DenseMatrix rho_;
};

}  // namespace

QuantumState propagate_block_state(const BlockModel& model, const QuantumState& psi0, const PropagationConfig& config,
                                   const StateObserver& observe) {
    const HilbertDims dims = model.full_dims();
    require_same_dims(psi0.dims, dims, "propagate_block_state");
    if (std::abs(psi0.amplitudes.norm() - 1.0) > 1e-10) throw InvalidArgument("propagate_block_state: psi0 is not normalised");
    BlockEngine eng(model);
    const int D = dims.total_dim();
    DenseVector y = eng.phases(config.t_i).conjugate().cwiseProduct(psi0.amplitudes), k1(D), k2(D), k3(D), k4(D);
    run_schedule(
        config,
        [&](double t, double h, double t_end) {
            eng.state_rhs(t, y, k1);
            eng.state_rhs(t + h / 2, y + h / 2 * k1, k2);
            eng.state_rhs(t + h / 2, y + h / 2 * k2, k3);
            eng.state_rhs(stage_end(t, t_end), y + h * k3, k4);
            y += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        },
        [&](double t) {
            check_norm(y, t);
            if (observe) observe(t, {dims, eng.phases(t).cwiseProduct(y)});
        });
    return {dims, eng.phases(std::max(config.t_f, config.t_i)).cwiseProduct(y)};
}

DensityMatrix propagate_block_lindblad(const BlockModel& model, const DensityMatrix& rho0, const PropagationConfig& config,
                                       const DensityObserver& observe) {
    const HilbertDims dims = model.full_dims();
    require_same_dims(rho0.dims, dims, "propagate_block_lindblad");
    if (!is_hermitian(rho0.matrix, 1e-10)) throw InvalidArgument("propagate_block_lindblad: rho0 is not Hermitian");
    BlockEngine eng(model);
    const int D = dims.total_dim();
    const double trace0 = rho0.matrix.trace().real();
    auto lab = [&](double t, const DenseMatrix& rt) -> DenseMatrix {
        const DenseVector u = eng.phases(t);
        return (u * u.adjoint()).cwiseProduct(rt);
    };
    const DenseVector u0 = eng.phases(config.t_i);
    DenseMatrix r = (u0 * u0.adjoint()).conjugate().cwiseProduct(rho0.matrix), k1(D, D), k2(D, D), k3(D, D), k4(D, D), tmp(D, D);
    run_schedule(
        config,
        [&](double t, double h, double t_end) {
            eng.lindblad_rhs(t, r, k1);
            tmp = r + h / 2 * k1;
            eng.lindblad_rhs(t + h / 2, tmp, k2);
            tmp = r + h / 2 * k2;
            eng.lindblad_rhs(t + h / 2, tmp, k3);
            tmp = r + h * k3;
            eng.lindblad_rhs(stage_end(t, t_end), tmp, k4);
            r += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            tmp = 0.5 * (r + r.adjoint());
            r = tmp;
        },
        [&](double t) {
            check_density(r, trace0, t);
            if (observe) observe(t, {dims, lab(t, r)});
        });
    return {dims, lab(std::max(config.t_f, config.t_i), r)};
}

DensityMatrix apply_cavity_loss(const DensityMatrix& rho, const std::string& cavity_label) {
    const int k = rho.dims.index_of(cavity_label);
    if (k < 0) throw InvalidArgument("apply_cavity_loss: unknown label '" + cavity_label + "'");
    const int dim = rho.dims.subsystems()[k].dim;
    const DenseMatrix a = embed(annihilation(dim - 1, cavity_label), rho.dims).matrix;
    DenseMatrix out = a * rho.matrix * a.adjoint();
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw InvalidArgument("apply_cavity_loss: state has no photons to lose");
    return {rho.dims, out / tr};
}

QuantumState evolve_diagonal(const QuantumState& psi, const std::vector<double>& energies, double t) {
    if (psi.dims.size() != 1) throw InvalidArgument("evolve_diagonal: expects a single cavity state");
    if (static_cast<int>(energies.size()) < psi.dims.total_dim()) throw InvalidArgument("evolve_diagonal: not enough energies");
    QuantumState out = psi;
    for (int n = 0; n < psi.dims.total_dim(); ++n) out.amplitudes(n) *= std::polar(1.0, -energies[n] * t);
    return out;
}

FidelityTrace fidelity_trace(const DriveSpec& drive, const SystemParams& params, const std::vector<double>& target_energies,
                             const QuantumState& psi0, const std::optional<NoiseParams>& noise, const PropagationConfig& config) {
    if (psi0.dims.total_dim() != params.n_cut + 1 || psi0.dims.size() != 1) {
        throw InvalidArgument("fidelity_trace: psi0 must be a cavity state of dimension n_cut + 1");
    }
    const QuantumState cav{HilbertDims("cavity", params.n_cut + 1), psi0.amplitudes};
    const BlockModel model = single_cavity_model(params, drive, noise.value_or(NoiseParams{}));
    const QuantumState full = tensor({cav, ground_state()});
    FidelityTrace tr;
    auto record = [&](double t, const DensityMatrix& rc) {
        const QuantumState target = evolve_diagonal(cav, target_energies, t);
        const double f = state_fidelity(rc, target);
        tr.times.push_back(t);
        tr.fidelity.push_back(f);
        tr.root_fidelity.push_back(std::sqrt(f));
        tr.lambda.push_back(envelope_value(drive.envelope, t));
    };
    if (noise && (noise->gamma_q > 0.0 || noise->gamma_phi > 0.0 || noise->kappa_a > 0.0)) {
        propagate_block_lindblad(model, DensityMatrix::pure(full), config,
                                 [&](double t, const DensityMatrix& r) { record(t, partial_trace(r, {"cavity"})); });
    } else {
        propagate_block_state(model, full, config,
                              [&](double t, const QuantumState& s) { record(t, partial_trace(DensityMatrix::pure(s), {"cavity"})); });
    }
    return tr;
}

std::vector<DenseMatrix> kitten_recovery_kraus(int d) {
    if (d < 5) throw InvalidArgument("kitten_recovery: cavity dimension must be >= 5");
    auto ket = [d](std::initializer_list<std::pair<int, double>> entries) {
        DenseVector v = DenseVector::Zero(d);
        for (const auto& [n, c] : entries) v(n) = c;
        return v;
    };
    const double s = 1.0 / std::sqrt(2.0);
    const DenseVector zero_k = ket({{0, s}, {4, s}});
    const DenseVector one_k = ket({{2, 1.0}});
    const DenseVector fail = ket({{0, s}, {4, -s}});
    std::vector<DenseMatrix> k;
    k.push_back(zero_k * zero_k.adjoint() + one_k * one_k.adjoint());
    k.push_back(zero_k * ket({{3, 1.0}}).adjoint() + one_k * ket({{1, 1.0}}).adjoint());
    // Everything orthogonal to the code and single-loss spaces.
    k.push_back(fail * fail.adjoint());
    for (int n = 5; n < d; ++n) k.push_back(fail * ket({{n, 1.0}}).adjoint());
    return k;
}

DensityMatrix kitten_recovery(const DensityMatrix& rho, const std::string& cavity_label) {
    const int idx = rho.dims.index_of(cavity_label);
    if (idx < 0) throw InvalidArgument("kitten_recovery: unknown label '" + cavity_label + "'");
    const int d = rho.dims.subsystems()[idx].dim;
    DenseMatrix out = DenseMatrix::Zero(rho.matrix.rows(), rho.matrix.cols());
    for (const auto& k : kitten_recovery_kraus(d)) {
        const DenseMatrix K = embed({HilbertDims(cavity_label, d), k}, rho.dims).matrix;
        out += K * rho.matrix * K.adjoint();
    }
    return {rho.dims, out};
}

}  // namespace pnd
