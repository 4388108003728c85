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


#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pnd/pnd.h"

namespace {

std::string read_config(const std::string& name) {
    std::ifstream in(std::string(PND_TEST_CONFIGS) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code = -1;
    int status = -1;
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> diagnostics;
    std::string error;

    const std::string& file(const std::string& name) const {
        for (const auto& f : files)
            if (f.first == name) return f.second;
        FAIL("missing output file " << name);
        static const std::string empty;
        return empty;
    }
};

Run run(const char* command, const std::string& config, const pnd_run_options* opts = nullptr) {
    Run r;
    pnd_result* res = nullptr;
    r.code = pnd_run(command, config.c_str(), opts, &res);
    r.error = pnd_last_error();
    if (res) {
        r.status = pnd_result_status(res);
        for (size_t i = 0; i < pnd_result_file_count(res); ++i) {
            size_t n = 0;
            const char* data = pnd_result_file_data(res, i, &n);
            r.files.emplace_back(pnd_result_file_name(res, i), std::string(data, n));
        }
        for (size_t i = 0; i < pnd_result_diagnostic_count(res); ++i) r.diagnostics.push_back(pnd_result_diagnostic(res, i));
        pnd_result_free(res);
    }
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("C API basics") {
    CHECK(std::strlen(pnd_version()) > 0);
    pnd_result* res = nullptr;
    CHECK(pnd_run(nullptr, "{}", nullptr, &res) == PND_ERR_GENERAL);
    CHECK(std::strlen(pnd_last_error()) > 0);
    CHECK(pnd_run("verify", "{}", nullptr, nullptr) == PND_ERR_GENERAL);
    CHECK(pnd_run("launch", "{}", nullptr, &res) == PND_ERR_GENERAL);
    CHECK(std::string(pnd_last_error()).find("launch") != std::string::npos);
    pnd_result_free(res);
    pnd_result_free(nullptr);
    pnd_drive_free(nullptr);
    CHECK(pnd_run("verify", "{not json", nullptr, &res) == PND_ERR_GENERAL);
    pnd_result_free(res);
}

TEST_CASE("C API verify") {
    const auto r = run("verify", read_config("verify_table_v.json"));
    REQUIRE(r.code == PND_OK);
    CHECK(r.status == PND_OK);
    const auto csv = lines(r.file("verify.csv"));
    REQUIRE(csv.size() >= 2);
    CHECK(csv[0].rfind("# pnd ", 0) == 0);
    CHECK(csv[0].find("config_hash=") != std::string::npos);
    CHECK(csv[1].rfind("n,E_order2_kHz,E_order4_kHz", 0) == 0);
    CHECK(csv.size() == 2 + 7);
    const auto report = nlohmann::json::parse(r.file("verify.json"));
    CHECK(report.at("t_m_us").get<double>() == doctest::Approx(1.5625));
    CHECK(report.at("max_residual_kHz").get<double>() <= 0.5);
    CHECK(report.at("pass").get<bool>());
    CHECK(!r.file("dephasing.csv").empty());
}

TEST_CASE("C API error codes") {
    SUBCASE("unknown key") {
        const auto r = run("verify", R"({"drive": {"table": "V"}, "tolerance_kHz": 0.5, "colour": 1})");
        CHECK(r.code == PND_ERR_GENERAL);
        CHECK(r.error.find("colour") != std::string::npos);
    }
    SUBCASE("resonance") {
        const auto r = run("verify", read_config("verify_resonance.json"));
        CHECK(r.code == PND_ERR_RESONANCE);
        CHECK(r.error.find("n=0") != std::string::npos);
    }
    SUBCASE("infeasible target") {
        const auto r = run("optimize", read_config("optimize_too_strong.json"));
        CHECK(r.code == PND_ERR_INFEASIBLE);
        CHECK(r.error.find("chi/8") != std::string::npos);
    }
    SUBCASE("search exhausted") {
        const auto r = run("optimize", R"({"system": {"chi_MHz": 2.56, "n_cut": 4},
            "target": {"kind": "parity", "p_kHz": 10.0},
            "optimizer": {"detuning_menu": ["1/2"], "n_assignments": 5}})");
        CHECK(r.code == PND_ERR_INFEASIBLE);
        REQUIRE(r.diagnostics.size() == 1);
        CHECK(r.diagnostics[0].find("sign") != std::string::npos);
    }
    SUBCASE("mismatch is a verdict, not an error") {
        const auto r = run("verify", R"({"drive": {"table": "V"}, "target_kHz": [0, 0, 0, 0, 0, 0, 0]})");
        CHECK(r.code == PND_OK);
        CHECK(r.status == PND_ERR_GENERAL);
        CHECK_FALSE(nlohmann::json::parse(r.file("verify.json")).at("pass").get<bool>());
    }
}

TEST_CASE("C API determinism and seeds") {
    const std::string cfg = read_config("optimize_three_photon.json");
    const auto a = run("optimize", cfg);
    REQUIRE(a.code == PND_OK);
    pnd_run_options opts{0, 0, 4, nullptr};
    const auto b = run("optimize", cfg, &opts);
    REQUIRE(b.code == PND_OK);
    REQUIRE(a.files.size() == b.files.size());
    for (size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == b.files[i]);

    pnd_run_options seeded{1, 11, 1, nullptr};
    const auto c = run("optimize", cfg, &seeded);
    REQUIRE(c.code == PND_OK);
    const auto header_a = lines(a.file("spectrum.csv")).at(0);
    const auto header_c = lines(c.file("spectrum.csv")).at(0);
    CHECK(header_a != header_c);
    CHECK(nlohmann::json::parse(c.file("drive.json")).at("config_hash") != nlohmann::json::parse(a.file("drive.json")).at("config_hash"));
}

TEST_CASE("C API concurrent runs") {
    const std::string cfg = read_config("verify_table_v.json");
    const auto ref = run("verify", cfg);
    std::vector<Run> out(4);
    std::vector<std::thread> pool;
    for (auto& o : out) pool.emplace_back([&o, &cfg] { o = run("verify", cfg); });
    for (auto& t : pool) t.join();
    for (const auto& o : out) {
        CHECK(o.code == PND_OK);
        CHECK(o.files == ref.files);
    }
}

TEST_CASE("C API drive handles") {
    pnd_drive* d = nullptr;
    REQUIRE(pnd_drive_create(2.56, 0.0, 0.0, 6, &d) == PND_OK);
    CHECK(pnd_drive_add_tone(d, 0, 0.05, 0.0, 1, 2) == PND_OK);
    CHECK(pnd_drive_add_tone(d, 0, 0.05, 0.0, 1, 0) == PND_ERR_GENERAL);
    CHECK(pnd_drive_add_tone(nullptr, 0, 0.05, 0.0, 1, 2) == PND_ERR_GENERAL);

    std::vector<double> e(7);
    size_t count = 0;
    REQUIRE(pnd_drive_spectrum(d, 2, e.data(), e.size(), &count) == PND_OK);
    CHECK(count == 7);
    // n = 0: |0.05 chi|^2 / (chi / 2) with chi / 2 pi = 2560 kHz.
    CHECK(e[0] == doctest::Approx(0.005 * 2560.0).epsilon(1e-12));
    CHECK(pnd_drive_spectrum(d, 4, e.data(), 3, &count) == PND_ERR_GENERAL);
    CHECK(count == 7);
    CHECK(pnd_drive_spectrum(d, 3, e.data(), e.size(), &count) == PND_ERR_GENERAL);

    double t_m = 0.0;
    REQUIRE(pnd_drive_micromotion_period(d, &t_m) == PND_OK);
    // gcd(1/2, 1) = 1/2, T_M = 2 pi / (chi / 2) = 2 / (2.56 MHz).
    CHECK(t_m == doctest::Approx(2.0 / 2.56));
    pnd_drive_free(d);

    pnd_drive* r = nullptr;
    REQUIRE(pnd_drive_from_json(
                R"({"chi_MHz": 2.0, "n_cut": 3, "tones": [{"m": 1, "omega_re_over_chi": 0.05, "delta_num": 1, "delta_den": 1}]})", &r) ==
            PND_OK);
    CHECK(pnd_drive_spectrum(r, 2, e.data(), e.size(), &count) == PND_ERR_RESONANCE);
    pnd_drive_free(r);
    CHECK(pnd_drive_from_json("[]", &r) == PND_ERR_GENERAL);
}
