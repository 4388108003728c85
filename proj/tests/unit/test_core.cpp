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


#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "pnd/core.hpp"
#include "pnd/error.hpp"

using namespace pnd;

namespace {

constexpr double kPi = std::numbers::pi;

DenseMatrix random_density(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    DenseMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(n01(rng), n01(rng));
    DenseMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Independent Wigner oracle: (1/pi) Tr[rho D(beta) P D(beta)^dag] with the
// displacement built from an eigendecomposition in a larger Fock space.
double wigner_oracle(const DenseMatrix& rho, double x, double p, int big = 60) {
    const cplx beta(x / std::sqrt(2.0), p / std::sqrt(2.0));
    DenseMatrix a = DenseMatrix::Zero(big, big);
    for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    // D = exp(beta a^dag - beta* a) = exp(-i K) with K Hermitian.
    const DenseMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
    const DenseMatrix k = cplx(0, 1) * gen;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(k);
    const DenseVector ph = (-cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
    const DenseMatrix d = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    DenseMatrix parity = DenseMatrix::Zero(big, big);
    for (int n = 0; n < big; ++n) parity(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    DenseMatrix r = DenseMatrix::Zero(big, big);
    r.topLeftCorner(rho.rows(), rho.cols()) = rho;
    return (r * d * parity * d.adjoint()).trace().real() / kPi;
}

}  // namespace

TEST_CASE("annihilation operator matrix elements") {
    const auto a1 = annihilation(1);
    CHECK(a1.matrix.rows() == 2);
    CHECK(std::abs(a1.matrix(0, 1) - 1.0) == 0.0);
    CHECK(std::abs(a1.matrix(0, 0)) + std::abs(a1.matrix(1, 0)) + std::abs(a1.matrix(1, 1)) == 0.0);
    const auto a2 = annihilation(2);
    CHECK(a2.matrix(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const auto n = multiply(adjoint(a2), a2);
    for (int k = 0; k <= 2; ++k) CHECK(n.matrix(k, k).real() == doctest::Approx(k));
}

TEST_CASE("ladder commutator is the identity below the truncation edge") {
    const int N = 7;
    const auto a = annihilation(N).matrix;
    const DenseMatrix c = a * a.adjoint() - a.adjoint() * a;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) CHECK(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
}

TEST_CASE("Pauli algebra on the qubit factor") {
    const auto sm = sigma_minus().matrix;
    const DenseMatrix sp = sm.adjoint();
    const DenseMatrix comm = sp * sm - sm * sp;
    CHECK((comm - sigma_z().matrix).norm() < 1e-15);
    // <g|sigma_z|g> = -1 with basis (g, e).
    CHECK(sigma_z().matrix(0, 0).real() == -1.0);
    CHECK(projector_excited().matrix(1, 1).real() == 1.0);
}

TEST_CASE("tensor products") {
    const auto i4 = tensor({identity("q1", 2), identity("q2", 2)});
    CHECK(i4.dims.total_dim() == 4);
    CHECK((i4.matrix - DenseMatrix::Identity(4, 4)).norm() == 0.0);
    const auto t = tensor({annihilation(1), sigma_z()});
    CHECK(t.dims.total_dim() == 4);
    CHECK(t.dims.size() == 2);

    // (a x I)(I x s-) equals a x s- entry by entry; oracle is an explicit loop.
    const auto a = annihilation(2);
    const auto sm = sigma_minus();
    const auto lhs = multiply(tensor({a, identity("qubit", 2)}), tensor({identity("cavity", 3), sm}));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    CHECK(std::abs(lhs.matrix(2 * i + k, 2 * j + l) - a.matrix(i, j) * sm.matrix(k, l)) < 1e-15);
}

TEST_CASE("embed lifts local operators") {
    const HilbertDims full({{"cavity", 3}, {"qubit", 2}});
    const auto lifted = embed(sigma_minus(), full);
    const auto ref = tensor({identity("cavity", 3), sigma_minus()});
    CHECK((lifted.matrix - ref.matrix).norm() < 1e-15);
}

TEST_CASE("partial trace") {
    SUBCASE("product state") {
        std::mt19937_64 rng(3);
        const DenseMatrix ra = random_density(3, rng);
        DensityMatrix rho{HilbertDims({{"cavity", 3}, {"qubit", 2}}), kron(ra, DensityMatrix::pure(ground_state()).matrix)};
        const auto red = partial_trace(rho, {"cavity"});
        CHECK((red.matrix - ra).norm() < 1e-14);
    }
    SUBCASE("Bell state marginal") {
        DenseVector v = DenseVector::Zero(4);
        v(0) = v(3) = 1.0 / std::sqrt(2.0);
        const auto rho = DensityMatrix::pure({HilbertDims({{"a", 2}, {"b", 2}}), v});
        const auto red = partial_trace(rho, {"b"});
        CHECK((red.matrix - 0.5 * DenseMatrix::Identity(2, 2)).norm() < 1e-15);
    }
    SUBCASE("trace preserved on random inputs") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            DensityMatrix rho{HilbertDims({{"a", 3}, {"b", 2}, {"c", 2}}), random_density(12, rng)};
            for (const auto& keep : std::vector<std::vector<std::string>>{{"a"}, {"b"}, {"a", "c"}, {"b", "c"}}) {
                const auto red = partial_trace(rho, keep);
                CHECK(std::abs(red.matrix.trace() - rho.matrix.trace()) < 1e-12);
            }
        }
    }
    SUBCASE("unknown label") { CHECK_THROWS_AS(partial_trace(DensityMatrix::pure(ground_state()), {"nope"}), InvalidArgument); }
}

TEST_CASE("state fidelity") {
    const auto psi = normalized({HilbertDims("cavity", 3), DenseVector::Ones(3)});
    CHECK(state_fidelity(DensityMatrix::pure(psi), psi) == doctest::Approx(1.0).epsilon(1e-14));
    DenseVector perp(3);
    perp << 1.0, -1.0, 0.0;
    const auto psi_perp = normalized({psi.dims, perp});
    CHECK(std::abs(state_fidelity(DensityMatrix::pure(psi_perp), psi)) < 1e-15);
    DensityMatrix mix{psi.dims, 0.5 * DensityMatrix::pure(psi).matrix + 0.5 * DensityMatrix::pure(psi_perp).matrix};
    CHECK(state_fidelity(mix, psi) == doctest::Approx(0.5).epsilon(1e-14));
    // Global phase invariance.
    QuantumState rotated{psi.dims, psi.amplitudes * std::polar(1.0, 0.7)};
    CHECK(state_fidelity(mix, rotated) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(root_fidelity(mix, psi) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK_THROWS(state_fidelity(mix, fock_state(0, 3)));
}

TEST_CASE("cat states") {
    const auto zero = cat_state(0.0, Parity::Even, 4);
    CHECK(std::abs(std::abs(zero.amplitudes(0)) - 1.0) < 1e-15);

    std::vector<std::string> warnings;
    set_warning_handler([&](const std::string& w) { warnings.push_back(w); });
    const auto c = cat_state(std::sqrt(2.0), Parity::Even, 6);
    set_warning_handler({});
    CHECK(warnings.size() == 1);  // 0.18% of the weight sits above n = 6
    CHECK(cat_truncation_leak(std::sqrt(2.0), Parity::Even, 6) == doctest::Approx(0.0018).epsilon(0.05));
    for (int n = 1; n <= 6; n += 2) CHECK(std::abs(c.amplitudes(n)) == 0.0);
    CHECK(c.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-14));

    // <n> of the even cat against alpha^2 tanh(alpha^2), far from truncation.
    for (double alpha : {0.5, 1.0, std::sqrt(2.0), 2.0}) {
        const auto big = cat_state(alpha, Parity::Even, 40);
        double mean = 0.0;
        for (int n = 0; n <= 40; ++n) mean += n * std::norm(big.amplitudes(n));
        CHECK(mean == doctest::Approx(alpha * alpha * std::tanh(alpha * alpha)).epsilon(1e-12));
    }
    // Odd cat: alpha^2 coth(alpha^2).
    const auto odd = cat_state(1.0, Parity::Odd, 40);
    double mean = 0.0;
    for (int n = 0; n <= 40; ++n) mean += n * std::norm(odd.amplitudes(n));
    CHECK(mean == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-12));
}

TEST_CASE("Wigner function") {
    WignerGrid g{-1.0, 1.0, -1.0, 1.0, 3};
    const auto vac = wigner(DensityMatrix::pure(fock_state(0, 4)), g);
    CHECK(vac.values(1, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(vac.values(2, 1) == doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-12));
    const auto one = wigner(DensityMatrix::pure(fock_state(1, 4)), g);
    CHECK(one.values(1, 1) == doctest::Approx(-1.0 / kPi).epsilon(1e-12));

    SUBCASE("cat against the displaced-parity oracle") {
        const double alpha = std::sqrt(2.0);
        set_warning_handler([](const std::string&) {});
        const auto rho = DensityMatrix::pure(cat_state(alpha, Parity::Even, 6));
        set_warning_handler({});
        const auto w = wigner(rho, WignerGrid{-3.0, 3.0, -3.0, 3.0, 7});
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) CHECK(w.values(i, j) == doctest::Approx(wigner_oracle(rho.matrix, w.x[i], w.p[j])).epsilon(1e-8));
    }
    SUBCASE("cat fringes along p at the origin") {
        // Even cat along x: W(0, p) = W(0, 0) e^{-p^2} cos(2 sqrt(2) alpha p),
        // so the fringe period is pi / (sqrt(2) alpha).
        const double alpha = 3.0;
        const auto rho = DensityMatrix::pure(cat_state(alpha, Parity::Even, 60));
        const double period = kPi / (std::sqrt(2.0) * alpha);
        const auto w = wigner(rho, WignerGrid{0.0, 0.0, 0.0, period, 9});
        for (int j = 0; j < 9; ++j) {
            const double p = w.p[j];
            CHECK(w.values(0, j) * std::exp(p * p) / w.values(0, 0) ==
                  doctest::Approx(std::cos(2.0 * std::sqrt(2.0) * alpha * p)).epsilon(1e-6));
        }
    }
    SUBCASE("normalisation") {
        const auto rho = DensityMatrix::pure(normalized({HilbertDims("cavity", 5), DenseVector::Ones(5)}));
        const auto w = wigner(rho, WignerGrid{-6.0, 6.0, -6.0, 6.0, 121});
        const double dx = 0.1;
        CHECK(w.values.sum() * dx * dx == doctest::Approx(1.0).epsilon(0.02));
    }
    CHECK_THROWS(wigner(DensityMatrix::pure(tensor({fock_state(0, 2), ground_state()})), g));
}

TEST_CASE("dims bookkeeping") {
    const HilbertDims d({{"cavity", 7}, {"qubit", 2}});
    CHECK(d.total_dim() == 14);
    CHECK(d.index_of("qubit") == 1);
    CHECK(d.index_of("missing") == -1);
    CHECK_THROWS(HilbertDims({{"x", 0}}));
    CHECK(is_hermitian(sigma_z().matrix));
    CHECK_FALSE(is_hermitian(sigma_minus().matrix));
}
