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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnd/experiments.hpp"
#include "pnd/models.hpp"

namespace pnd {

std::string version();

// A drive document as stored in drive.json. Energies in rad/us.
struct DriveDocument {
    SystemParams params;
    DriveSpec drive;
    std::vector<double> target;  // empty when undeclared
};

// Unknown keys are rejected. Output-only keys written by `optimize`
// (achieved_kHz, objective, residual_kHz, provenance) are accepted and ignored.
DriveDocument drive_from_json(const nlohmann::json& j);
nlohmann::ordered_json drive_to_json(const DriveDocument& doc);

nlohmann::json envelope_to_json(const Envelope& env);
Envelope envelope_from_json(const nlohmann::json& j);

// 9 significant digits, '.' separator, independent of the C locale.
std::string format_number(double v);

// FNV-1a over the compact dump of the config (object keys sorted).
std::uint64_t config_hash(const nlohmann::json& config);
std::string hash_hex(std::uint64_t h);

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the config's "seed"
    int threads = 1;
    std::string base_dir;  // relative paths inside the config resolve here
};

struct OutputFile {
    std::string name;
    std::string data;
};

struct RunOutput {
    std::vector<OutputFile> files;
    std::vector<std::string> diagnostics;
    int status = 0;  // command verdict; verify uses 1 for a residual over tolerance
};

// command is "optimize", "verify" or "simulate". Throws pnd::Error.
RunOutput run_command(const std::string& command, const nlohmann::json& config, const RunOptions& options);

}  // namespace pnd
