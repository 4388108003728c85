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

#include "doctest.h"
#include "pnd/effective.hpp"
#include "pnd/error.hpp"
#include "pnd/optimizer.hpp"
#include "pnd/presets.hpp"
#include "pnd/units.hpp"

using namespace pnd;

namespace {

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

void check_khz(const std::vector<double>& w, const std::vector<double>& expect_khz, double tol = 1e-9) {
    REQUIRE(w.size() == expect_khz.size());
    for (size_t n = 0; n < w.size(); ++n) CHECK(units::to_khz(w[n]) == doctest::Approx(expect_khz[n]).epsilon(tol).scale(1.0));
}

OptimizerConfig quick(std::uint64_t seed = 1, int assignments = 40) {
    OptimizerConfig c;
    c.seed = seed;
    c.n_assignments = assignments;
    return c;
}

}  // namespace

TEST_CASE("target patterns") {
    TargetSpec s;
    s.n_max = 6;
    s.kind = ThreePhoton{units::from_khz(0.5)};
    check_khz(make_target(s).at("cavity"), {0, 0, 0, 3, 12, 30, 60});
    s.kind = ParityTarget{units::from_khz(20.0)};
    check_khz(make_target(s).at("cavity"), {-20, 20, -20, 20, -20, 20, -20});
    s.kind = ZRotation{units::from_khz(20.0), 2};
    check_khz(make_target(s).at("cavity"), {20, -20, -20, 20, 20, -20, -20});
    s.kind = KerrCancel{units::from_khz(3.0)};
    check_khz(make_target(s).at("cavity"), {0, 0, 3, 9, 18, 30, 45});
    s.n_max = 4;
    s.kind = CPhase{units::from_khz(20.0), 2, 2};
    const auto m = make_target(s);
    check_khz(m.at("a"), {5, -5, -5, 5, 5});
    check_khz(m.at("b"), {5, -5, -5, 5, 5});
    check_khz(m.at("c"), {-10, 0, 0, -10, -10, 0, 0, -10, -10});
    s.kind = CPhase{units::from_khz(20.0), 0, 2};
    CHECK_THROWS_AS(make_target(s), InvalidArgument);
}

TEST_CASE("solve_amplitudes") {
    SUBCASE("zero target") {
        const auto p = SystemParams::from_mhz(2.56, 0.0, 0.0, 4);
        const std::vector<Rational> a(5, Rational(1, 2));
        const auto om = solve_amplitudes(a, std::vector<double>(5, 0.0), p, OptimizerConfig{});
        for (double x : om) CHECK(x == 0.0);
    }
    SUBCASE("Table I assignment") {
        const auto& t = published_table("I");
        const auto p = table_params(t);
        const auto target = from_khz(t.target_khz);
        const auto om = solve_amplitudes(t.delta, target, p, OptimizerConfig{});
        const auto e = khz(spectrum_order4(p, make_tones(t.delta, om)).energies);
        for (size_t n = 0; n < e.size(); ++n) CHECK(std::abs(e[n] - t.target_khz[n]) <= 0.5);
        for (double x : om) CHECK(std::abs(x) / p.chi <= 0.2);
    }
    SUBCASE("order 2 only is a coupled solve") {
        const auto& t = published_table("I");
        const auto p = table_params(t);
        OptimizerConfig c;
        c.include_order4 = false;
        const auto target = from_khz(t.target_khz);
        const auto om = solve_amplitudes(t.delta, target, p, c);
        const auto e = khz(spectrum_order2(p, make_tones(t.delta, om)).energies);
        for (size_t n = 0; n < e.size(); ++n) CHECK(std::abs(e[n] - t.target_khz[n]) <= 0.5);
    }
}

TEST_CASE("optimize_drives") {
    SUBCASE("parity at 40 kHz on the Table IV assignment") {
        const auto& t = published_table("IV");
        const auto p = table_params(t);
        TargetSpec s;
        s.kind = ParityTarget{units::from_khz(40.0)};
        const auto target = make_target(s).at("cavity");
        const auto om = solve_amplitudes(t.delta, target, p, OptimizerConfig{});
        const auto tones = make_tones(t.delta, om);
        const auto e = khz(spectrum_order4(p, tones).energies);
        for (size_t n = 0; n < e.size(); ++n) CHECK(std::abs(e[n] - units::to_khz(target[n])) <= 0.5);
        for (double x : om) CHECK(std::abs(x) / p.chi <= 0.2);
    }
    SUBCASE("sampled search returns a guarded drive") {
        const auto p = SystemParams::from_mhz(2.56, 0.0, 0.0, 6);
        TargetSpec s;
        s.kind = ParityTarget{units::from_khz(10.0)};
        const auto d = optimize_drives(make_target(s).at("cavity"), p, quick());
        CHECK(units::to_khz(d.residual) <= 0.25);
        for (const auto& tone : d.drive.tones) CHECK(std::abs(tone.omega) / p.chi <= 0.2);
        CHECK_NOTHROW(spectrum_order4(p, d.drive.tones));
    }
    SUBCASE("infeasible target") {
        const auto p = SystemParams::from_mhz(2.0, 0.0, 0.0, 3);
        std::vector<double> target(4, 0.5 * p.chi);
        try {
            optimize_drives(target, p, quick());
            FAIL("expected infeasibility");
        } catch (const InfeasibleError& e) {
            CHECK(std::string(e.what()).find("chi/8") != std::string::npos);
        }
    }
    SUBCASE("determinism and thread invariance") {
        const auto& t = published_table("III");
        const auto p = table_params(t);
        const auto target = from_khz(t.target_khz);
        auto c1 = quick(99);
        auto c4 = quick(99);
        c4.threads = 4;
        const auto a = optimize_drives(target, p, c1);
        const auto b = optimize_drives(target, p, c4);
        const auto again = optimize_drives(target, p, c1);
        REQUIRE(a.drive.tones.size() == b.drive.tones.size());
        for (size_t k = 0; k < a.drive.tones.size(); ++k) {
            CHECK(a.drive.tones[k].omega == b.drive.tones[k].omega);
            CHECK(a.drive.tones[k].delta == b.drive.tones[k].delta);
            CHECK(a.drive.tones[k].omega == again.drive.tones[k].omega);
        }
        CHECK(a.objective == b.objective);
    }
    SUBCASE("objective grows with the target") {
        const auto p = SystemParams::from_mhz(2.56, 0.0, 0.0, 6);
        std::vector<TargetSpec> specs(3);
        specs[0].kind = ThreePhoton{units::from_khz(0.5)};
        specs[1].kind = ParityTarget{units::from_khz(10.0)};
        specs[2].kind = ZRotation{units::from_khz(10.0), 2};
        for (const auto& s : specs) {
            auto target = make_target(s).at("cavity");
            const double single = optimize_drives(target, p, quick()).objective;
            for (auto& x : target) x *= 2.0;
            CHECK(optimize_drives(target, p, quick()).objective >= single);
        }
    }
}

TEST_CASE("optimizer config validation") {
    OptimizerConfig c;
    CHECK_NOTHROW(c.validate());
    c.detuning_menu = {Rational(0)};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.detuning_menu = {Rational(3, 4)};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = OptimizerConfig{};
    c.amp_bound = 0.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(units::to_khz(OptimizerConfig{}.tolerance()) == doctest::Approx(0.25));
}
