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

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pnd {

using cplx = std::complex<double>;
typedef Eigen::MatrixXcd DenseMatrix;
typedef Eigen::VectorXcd DenseVector;

struct Subsystem {
    std::string label;
    int dim = 0;
    bool operator==(const Subsystem&) const = default;
};

// Ordered tensor-factor layout. The first subsystem is the most significant
// index, matching kron(A, B).
class HilbertDims {
  public:
    HilbertDims() = default;
    explicit HilbertDims(std::vector<Subsystem> subsystems);
    HilbertDims(std::string label, int dim);

    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    int total_dim() const { return total_; }
    int size() const { return static_cast<int>(subsystems_.size()); }
    // -1 when absent.
    int index_of(const std::string& label) const;
    HilbertDims concat(const HilbertDims& other) const;
    bool operator==(const HilbertDims& other) const { return subsystems_ == other.subsystems_; }

  private:
    std::vector<Subsystem> subsystems_;
    int total_ = 1;
};

struct CompositeOperator {
    HilbertDims dims;
    DenseMatrix matrix;
};

struct QuantumState {
    HilbertDims dims;
    DenseVector amplitudes;
};

struct DensityMatrix {
    HilbertDims dims;
    DenseMatrix matrix;

    static DensityMatrix pure(const QuantumState& psi);
};

// Qubit basis ordering is (g, e).
CompositeOperator annihilation(int n_cut, const std::string& label = "cavity");
CompositeOperator number_operator(int n_cut, const std::string& label = "cavity");
CompositeOperator sigma_minus(const std::string& label = "qubit");
// |e><e| - |g><g|, so <g|sigma_z|g> = -1.
CompositeOperator sigma_z(const std::string& label = "qubit");
CompositeOperator projector_excited(const std::string& label = "qubit");
CompositeOperator identity(const std::string& label, int dim);
CompositeOperator adjoint(const CompositeOperator& op);
CompositeOperator multiply(const CompositeOperator& a, const CompositeOperator& b);

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);
CompositeOperator tensor(const std::vector<CompositeOperator>& ops);
// Lift an operator on a subset of factors (given by its own dims labels, in
// order) to the full space; identities elsewhere.
CompositeOperator embed(const CompositeOperator& local, const HilbertDims& full);

QuantumState fock_state(int n, int n_cut, const std::string& label = "cavity");
QuantumState ground_state(const std::string& label = "qubit");
QuantumState tensor(const std::vector<QuantumState>& states);
QuantumState normalized(const QuantumState& psi);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

// <psi|rho|psi>. Real part; throws if the imaginary part is not negligible.
double state_fidelity(const DensityMatrix& rho, const QuantumState& psi);
// sqrt(<psi|rho|psi>), the convention used for all experiment reports.
double root_fidelity(const DensityMatrix& rho, const QuantumState& psi);

enum class Parity { Even, Odd };

// (|alpha> +- |-alpha>) / norm truncated at n_cut and renormalised. Emits a
// warning when the discarded Fock weight exceeds 1e-4.
QuantumState cat_state(cplx alpha, Parity parity, int n_cut, const std::string& label = "cavity");
// Fraction of the untruncated cat's weight above n_cut.
double cat_truncation_leak(cplx alpha, Parity parity, int n_cut);

struct WignerGrid {
    double x_min = -4.0, x_max = 4.0;
    double p_min = -4.0, p_max = 4.0;
    int resolution = 81;
};

// W(x, p) with x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)) and
// integral W dx dp = 1. values(i, j) = W(x[i], p[j]).
struct WignerResult {
    std::vector<double> x;
    std::vector<double> p;
    Eigen::MatrixXd values;
};

WignerResult wigner(const DensityMatrix& rho, const WignerGrid& grid);

bool is_hermitian(const DenseMatrix& m, double rel_tol = 1e-12);
void require_same_dims(const HilbertDims& a, const HilbertDims& b, const char* where);

}  // namespace pnd
