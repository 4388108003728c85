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

#include <string>
#include <vector>

#include "pnd/models.hpp"

namespace pnd {

// Published drive tables. Energies are E/2pi in kHz, amplitudes Omega/chi.
struct PublishedTable {
    std::string name;
    double chi_mhz = 0.0;
    double kerr_khz = 0.0;
    double chi_prime_khz = 0.0;
    std::string qubit = "q";  // "a", "b", "c" for the two-cavity tables
    std::vector<Rational> delta;
    std::vector<double> omega_over_chi;
    std::vector<double> target_khz;      // the requested pattern
    std::vector<double> engineered_khz;  // as printed
};

std::vector<std::string> published_table_names();
// Throws InvalidArgument for unknown names.
const PublishedTable& published_table(const std::string& name);

SystemParams table_params(const PublishedTable& table);
DriveSpec table_drive(const PublishedTable& table, const Envelope& envelope = Abrupt{});

// Two-cavity parameters shared by Tables IX to XI.
TwoCavityParams cphase_params();

}  // namespace pnd
