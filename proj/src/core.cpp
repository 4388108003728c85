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

#include "pnd/core.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "pnd/error.hpp"

namespace pnd {

namespace {

std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& warning_handler() {
    static WarningHandler h;
    return h;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    warning_handler() = std::move(handler);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    if (warning_handler()) {
        warning_handler()(message);
    } else {
        std::cerr << "pnd: warning: " << message << "\n";
    }
}

HilbertDims::HilbertDims(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
    total_ = 1;
    for (size_t i = 0; i < subsystems_.size(); ++i) {
        if (subsystems_[i].dim < 1) throw InvalidArgument("subsystem '" + subsystems_[i].label + "' has non-positive dimension");
        for (size_t j = 0; j < i; ++j) {
            if (subsystems_[j].label == subsystems_[i].label) {
                throw InvalidArgument("duplicate subsystem label '" + subsystems_[i].label + "'");
            }
        }
        total_ *= subsystems_[i].dim;
    }
}

HilbertDims::HilbertDims(std::string label, int dim) : HilbertDims(std::vector<Subsystem>{{std::move(label), dim}}) {}

int HilbertDims::index_of(const std::string& label) const {
    for (size_t i = 0; i < subsystems_.size(); ++i) {
        if (subsystems_[i].label == label) return static_cast<int>(i);
    }
    return -1;
}

HilbertDims HilbertDims::concat(const HilbertDims& other) const {
    std::vector<Subsystem> all = subsystems_;
    all.insert(all.end(), other.subsystems_.begin(), other.subsystems_.end());
    return HilbertDims(std::move(all));
}

DensityMatrix DensityMatrix::pure(const QuantumState& psi) {
    return DensityMatrix{psi.dims, psi.amplitudes * psi.amplitudes.adjoint()};
}

void require_same_dims(const HilbertDims& a, const HilbertDims& b, const char* where) {
    if (!(a == b)) throw InvalidArgument(std::string(where) + ": dimension mismatch");
}

CompositeOperator annihilation(int n_cut, const std::string& label) {
    if (n_cut < 1) throw InvalidArgument("annihilation: N_cut must be >= 1");
    DenseMatrix a = DenseMatrix::Zero(n_cut + 1, n_cut + 1);
    for (int n = 1; n <= n_cut; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {HilbertDims(label, n_cut + 1), a};
}

CompositeOperator number_operator(int n_cut, const std::string& label) {
    DenseMatrix n = DenseMatrix::Zero(n_cut + 1, n_cut + 1);
    for (int k = 0; k <= n_cut; ++k) n(k, k) = k;
    return {HilbertDims(label, n_cut + 1), n};
}

CompositeOperator sigma_minus(const std::string& label) {
    DenseMatrix s = DenseMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return {HilbertDims(label, 2), s};
}

CompositeOperator sigma_z(const std::string& label) {
    DenseMatrix s = DenseMatrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return {HilbertDims(label, 2), s};
}

CompositeOperator projector_excited(const std::string& label) {
    DenseMatrix s = DenseMatrix::Zero(2, 2);
    s(1, 1) = 1.0;
    return {HilbertDims(label, 2), s};
}

CompositeOperator identity(const std::string& label, int dim) {
    return {HilbertDims(label, dim), DenseMatrix::Identity(dim, dim)};
}

CompositeOperator adjoint(const CompositeOperator& op) { return {op.dims, op.matrix.adjoint()}; }

CompositeOperator multiply(const CompositeOperator& a, const CompositeOperator& b) {
    require_same_dims(a.dims, b.dims, "multiply");
    return {a.dims, a.matrix * b.matrix};
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CompositeOperator tensor(const std::vector<CompositeOperator>& ops) {
    if (ops.empty()) throw InvalidArgument("tensor: empty operator list");
    std::vector<Subsystem> subs;
    DenseMatrix m = DenseMatrix::Identity(1, 1);
    for (const auto& op : ops) {
        if (op.matrix.rows() != op.matrix.cols() || op.matrix.rows() != op.dims.total_dim()) {
            throw InvalidArgument("tensor: operator shape does not match its dims");
        }
        subs.insert(subs.end(), op.dims.subsystems().begin(), op.dims.subsystems().end());
        m = kron(m, op.matrix);
    }
    return {HilbertDims(std::move(subs)), m};
}

namespace {

std::vector<int> strides_of(const HilbertDims& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = dims.size() - 2; k >= 0; --k) s[k] = s[k + 1] * dims.subsystems()[k + 1].dim;
    return s;
}

}  // namespace

CompositeOperator embed(const CompositeOperator& local, const HilbertDims& full) {
    const auto& lsubs = local.dims.subsystems();
    std::vector<int> pos;
    for (const auto& s : lsubs) {
        int k = full.index_of(s.label);
        if (k < 0) throw InvalidArgument("embed: unknown label '" + s.label + "'");
        if (full.subsystems()[k].dim != s.dim) throw InvalidArgument("embed: dimension mismatch on '" + s.label + "'");
        pos.push_back(k);
    }
    const int D = full.total_dim();
    const auto fstr = strides_of(full);
    const auto lstr = strides_of(local.dims);
    // Split each full index into a local part and a spectator part.
    std::vector<int> loc(D), spec(D);
    for (int idx = 0; idx < D; ++idx) {
        int li = 0, rest = idx;
        for (size_t q = 0; q < pos.size(); ++q) {
            int digit = (idx / fstr[pos[q]]) % full.subsystems()[pos[q]].dim;
            li += digit * lstr[q];
            rest -= digit * fstr[pos[q]];
        }
        loc[idx] = li;
        spec[idx] = rest;
    }
    DenseMatrix m = DenseMatrix::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            if (spec[i] == spec[j]) m(i, j) = local.matrix(loc[i], loc[j]);
        }
    }
    return {full, m};
}

QuantumState fock_state(int n, int n_cut, const std::string& label) {
    if (n < 0 || n > n_cut) throw InvalidArgument("fock_state: n outside truncation");
    DenseVector v = DenseVector::Zero(n_cut + 1);
    v(n) = 1.0;
    return {HilbertDims(label, n_cut + 1), v};
}

QuantumState ground_state(const std::string& label) {
    DenseVector v = DenseVector::Zero(2);
    v(0) = 1.0;
    return {HilbertDims(label, 2), v};
}

QuantumState tensor(const std::vector<QuantumState>& states) {
    if (states.empty()) throw InvalidArgument("tensor: empty state list");
    std::vector<Subsystem> subs;
    DenseVector v = DenseVector::Ones(1);
    for (const auto& s : states) {
        subs.insert(subs.end(), s.dims.subsystems().begin(), s.dims.subsystems().end());
        DenseVector next(v.size() * s.amplitudes.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * s.amplitudes.size(), s.amplitudes.size()) = v(i) * s.amplitudes;
        v = next;
    }
    return {HilbertDims(std::move(subs)), v};
}

QuantumState normalized(const QuantumState& psi) {
    double nrm = psi.amplitudes.norm();
    if (nrm == 0.0) throw InvalidArgument("normalized: zero vector");
    return {psi.dims, psi.amplitudes / nrm};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    const auto& dims = rho.dims;
    std::vector<int> kpos;
    for (const auto& lab : keep) {
        int k = dims.index_of(lab);
        if (k < 0) throw InvalidArgument("partial_trace: unknown label '" + lab + "'");
        kpos.push_back(k);
    }
    std::vector<Subsystem> ksubs;
    for (int k : kpos) ksubs.push_back(dims.subsystems()[k]);
    HilbertDims kd(ksubs);
    const int D = dims.total_dim();
    const auto fstr = strides_of(dims);
    const auto kstr = strides_of(kd);
    std::vector<int> kidx(D), tidx(D);
    for (int idx = 0; idx < D; ++idx) {
        int ki = 0, rest = idx;
        for (size_t q = 0; q < kpos.size(); ++q) {
            int digit = (idx / fstr[kpos[q]]) % dims.subsystems()[kpos[q]].dim;
            ki += digit * kstr[q];
            rest -= digit * fstr[kpos[q]];
        }
        kidx[idx] = ki;
        tidx[idx] = rest;
    }
    DenseMatrix out = DenseMatrix::Zero(kd.total_dim(), kd.total_dim());
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            if (tidx[i] == tidx[j]) out(kidx[i], kidx[j]) += rho.matrix(i, j);
        }
    }
    return {kd, out};
}

double state_fidelity(const DensityMatrix& rho, const QuantumState& psi) {
    require_same_dims(rho.dims, psi.dims, "state_fidelity");
    cplx f = psi.amplitudes.dot(rho.matrix * psi.amplitudes);
    if (std::abs(f.imag()) > 1e-10 * std::max(1.0, std::abs(f.real()))) {
        throw InvalidArgument("state_fidelity: density matrix is not Hermitian");
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

double root_fidelity(const DensityMatrix& rho, const QuantumState& psi) { return std::sqrt(state_fidelity(rho, psi)); }

namespace {

// Unnormalised cat coefficients e^{-|a|^2/2} a^n / sqrt(n!) (1 +- (-1)^n).
DenseVector cat_coefficients(cplx alpha, Parity parity, int n_max) {
    DenseVector c(n_max + 1);
    cplx term = std::exp(-0.5 * std::norm(alpha));
    const double sgn = parity == Parity::Even ? 1.0 : -1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
        c(n) = term * (1.0 + sgn * ((n % 2 == 0) ? 1.0 : -1.0));
    }
    return c;
}

}  // namespace

double cat_truncation_leak(cplx alpha, Parity parity, int n_cut) {
    const double a2 = std::norm(alpha);
    const double full = parity == Parity::Even ? 2.0 + 2.0 * std::exp(-2.0 * a2) : 2.0 - 2.0 * std::exp(-2.0 * a2);
    if (full <= 0.0) throw InvalidArgument("cat_state: odd cat with alpha = 0 is the zero vector");
    double kept = cat_coefficients(alpha, parity, n_cut).squaredNorm();
    return std::max(0.0, 1.0 - kept / full);
}

QuantumState cat_state(cplx alpha, Parity parity, int n_cut, const std::string& label) {
    if (n_cut < 1) throw InvalidArgument("cat_state: N_cut must be >= 1");
    double leak = cat_truncation_leak(alpha, parity, n_cut);
    if (leak > 1e-4) {
        std::ostringstream os;
        os << "cat_state: truncation at N_cut=" << n_cut << " discards Fock weight " << leak;
        warn(os.str());
    }
    DenseVector c = cat_coefficients(alpha, parity, n_cut);
    return {HilbertDims(label, n_cut + 1), c / c.norm()};
}

namespace {

double gen_laguerre(int n, int k, double x) {
    if (n == 0) return 1.0;
    double lm1 = 1.0, l = 1.0 + k - x;
    for (int j = 1; j < n; ++j) {
        double next = ((2.0 * j + 1.0 + k - x) * l - (j + k) * lm1) / (j + 1.0);
        lm1 = l;
        l = next;
    }
    return l;
}

}  // namespace

WignerResult wigner(const DensityMatrix& rho, const WignerGrid& grid) {
    if (rho.dims.size() != 1) throw InvalidArgument("wigner: expects a single-subsystem density matrix");
    if (grid.resolution < 2) throw InvalidArgument("wigner: resolution must be >= 2");
    const int M = rho.dims.total_dim();
    WignerResult out;
    out.x.resize(grid.resolution);
    out.p.resize(grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) {
        out.x[i] = grid.x_min + (grid.x_max - grid.x_min) * i / (grid.resolution - 1);
        out.p[i] = grid.p_min + (grid.p_max - grid.p_min) * i / (grid.resolution - 1);
    }
    // sqrt(m!/n!) for n >= m
    Eigen::MatrixXd fr = Eigen::MatrixXd::Zero(M, M);
    for (int m = 0; m < M; ++m) {
        double r = 1.0;
        fr(m, m) = 1.0;
        for (int n = m + 1; n < M; ++n) {
            r /= std::sqrt(static_cast<double>(n));
            fr(m, n) = r;
        }
    }
    out.values.resize(grid.resolution, grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) {
        for (int j = 0; j < grid.resolution; ++j) {
            const cplx A = cplx(out.x[i], out.p[j]) / std::sqrt(2.0);
            const double B = 4.0 * std::norm(A);
            double w = 0.0;
            for (int m = 0; m < M; ++m) {
                const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
                w += sgn * rho.matrix(m, m).real() * gen_laguerre(m, 0, B);
                cplx pw = 1.0;
                for (int n = m + 1; n < M; ++n) {
                    pw *= 2.0 * A;
                    w += 2.0 * sgn * (rho.matrix(m, n) * pw).real() * fr(m, n) * gen_laguerre(m, n - m, B);
                }
            }
            out.values(i, j) = w * std::exp(-B / 2.0) / std::numbers::pi;
        }
    }
    return out;
}

bool is_hermitian(const DenseMatrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    double scale = std::max(m.norm(), 1e-300);
    return (m - m.adjoint()).norm() <= rel_tol * scale;
}

}  // namespace pnd
