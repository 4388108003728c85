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


#include "pnd/pnd.h"

#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pnd/config.hpp"
#include "pnd/effective.hpp"
#include "pnd/error.hpp"
#include "pnd/units.hpp"

struct pnd_result {
    pnd::RunOutput output;
};

struct pnd_drive {
    pnd::DriveDocument doc;
};

namespace {

thread_local std::string last_error;

// The warning sink is process-wide, so runs take turns.
std::mutex run_mutex;

void set_error(const std::string& msg) { last_error = msg; }

// Maps the active exception to a status code and records its message.
int translate(pnd_result* result = nullptr) {
    try {
        throw;
    } catch (const pnd::InfeasibleError& e) {
        set_error(e.what());
        if (result)
            for (const auto& d : e.details()) result->output.diagnostics.push_back(d);
        return PND_ERR_INFEASIBLE;
    } catch (const pnd::Error& e) {
        set_error(e.what());
        return static_cast<int>(e.kind());
    } catch (const nlohmann::json::exception& e) {
        set_error(std::string("json: ") + e.what());
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
    } catch (const std::exception& e) {
        set_error(e.what());
    } catch (...) {
        set_error("unknown error");
    }
    return PND_ERR_GENERAL;
}

int null_arg(const char* what) {
    set_error(std::string(what) + " is NULL");
    return PND_ERR_GENERAL;
}

}  // namespace

extern "C" {

PND_API const char* pnd_version(void) {
    static const std::string v = pnd::version();
    return v.c_str();
}

PND_API const char* pnd_last_error(void) { return last_error.c_str(); }

PND_API int pnd_run(const char* command, const char* config_json, const pnd_run_options* options, pnd_result** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!command) return null_arg("command");
    if (!config_json) return null_arg("config_json");
    auto* result = new (std::nothrow) pnd_result;
    if (!result) {
        set_error("out of memory");
        return PND_ERR_GENERAL;
    }
    *out = result;
    last_error.clear();
    try {
        pnd::RunOptions opt;
        if (options) {
            if (options->has_seed) opt.seed = options->seed;
            opt.threads = options->threads > 0 ? options->threads : 1;
            if (options->base_dir) opt.base_dir = options->base_dir;
        }
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw pnd::InvalidArgument(std::string("config is not valid JSON: ") + e.what());
        }
        std::lock_guard<std::mutex> lock(run_mutex);
        std::vector<std::string> warnings;
        pnd::set_warning_handler([&](const std::string& w) { warnings.push_back("warning: " + w); });
        try {
            result->output = pnd::run_command(command, config, opt);
        } catch (...) {
            pnd::set_warning_handler({});
            result->output.diagnostics = warnings;
            throw;
        }
        pnd::set_warning_handler({});
        result->output.diagnostics.insert(result->output.diagnostics.begin(), warnings.begin(), warnings.end());
        return PND_OK;
    } catch (...) {
        return translate(result);
    }
}

PND_API int pnd_result_status(const pnd_result* result) { return result ? result->output.status : PND_ERR_GENERAL; }

PND_API size_t pnd_result_file_count(const pnd_result* result) { return result ? result->output.files.size() : 0; }

PND_API const char* pnd_result_file_name(const pnd_result* result, size_t index) {
    if (!result || index >= result->output.files.size()) return nullptr;
    return result->output.files[index].name.c_str();
}

PND_API const char* pnd_result_file_data(const pnd_result* result, size_t index, size_t* size) {
    if (!result || index >= result->output.files.size()) {
        if (size) *size = 0;
        return nullptr;
    }
    const auto& f = result->output.files[index];
    if (size) *size = f.data.size();
    return f.data.c_str();
}

PND_API size_t pnd_result_diagnostic_count(const pnd_result* result) { return result ? result->output.diagnostics.size() : 0; }

PND_API const char* pnd_result_diagnostic(const pnd_result* result, size_t index) {
    if (!result || index >= result->output.diagnostics.size()) return nullptr;
    return result->output.diagnostics[index].c_str();
}

PND_API void pnd_result_free(pnd_result* result) { delete result; }

PND_API int pnd_drive_create(double chi_mhz, double kerr_khz, double chi_prime_khz, int n_cut, pnd_drive** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    try {
        auto d = std::make_unique<pnd_drive>();
        d->doc.params = pnd::SystemParams::from_mhz(chi_mhz, kerr_khz * 1e-3, chi_prime_khz * 1e-3, n_cut);
        d->doc.params.validate();
        *out = d.release();
        return PND_OK;
    } catch (...) {
        return translate();
    }
}

PND_API int pnd_drive_from_json(const char* drive_json, pnd_drive** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!drive_json) return null_arg("drive_json");
    try {
        auto d = std::make_unique<pnd_drive>();
        d->doc = pnd::drive_from_json(nlohmann::json::parse(drive_json));
        *out = d.release();
        return PND_OK;
    } catch (...) {
        return translate();
    }
}

PND_API int pnd_drive_add_tone(pnd_drive* drive, int m, double omega_re_over_chi, double omega_im_over_chi, int64_t delta_num,
                               int64_t delta_den) {
    if (!drive) return null_arg("drive");
    try {
        if (m < 0 || m > drive->doc.params.n_cut) throw pnd::InvalidArgument("tone index m outside 0..n_cut");
        const double chi = drive->doc.params.chi;
        pnd::DriveTone t{m, pnd::cplx(omega_re_over_chi, omega_im_over_chi) * chi, pnd::Rational(delta_num, delta_den)};
        auto tones = drive->doc.drive;
        tones.tones.push_back(t);
        tones.validate(chi);
        drive->doc.drive = std::move(tones);
        return PND_OK;
    } catch (...) {
        return translate();
    }
}

PND_API int pnd_drive_spectrum(const pnd_drive* drive, int order, double* energies_khz, size_t capacity, size_t* count) {
    if (!drive) return null_arg("drive");
    try {
        if (order != 2 && order != 4) throw pnd::InvalidArgument("order must be 2 or 4");
        const auto& p = drive->doc.params;
        const auto s = order == 2 ? pnd::spectrum_order2(p, drive->doc.drive.tones) : pnd::spectrum_order4(p, drive->doc.drive.tones);
        if (count) *count = s.energies.size();
        if (!energies_khz || capacity < s.energies.size()) throw pnd::InvalidArgument("output buffer too small");
        for (size_t n = 0; n < s.energies.size(); ++n) energies_khz[n] = pnd::units::to_khz(s.energies[n]);
        return PND_OK;
    } catch (...) {
        return translate();
    }
}

PND_API int pnd_drive_micromotion_period(const pnd_drive* drive, double* t_m_us) {
    if (!drive) return null_arg("drive");
    if (!t_m_us) return null_arg("t_m_us");
    try {
        *t_m_us = pnd::micromotion_period(drive->doc.drive.tones, drive->doc.params.chi);
        return PND_OK;
    } catch (...) {
        return translate();
    }
}

PND_API void pnd_drive_free(pnd_drive* drive) { delete drive; }

}  // extern "C"
