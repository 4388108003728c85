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

#include "pnd/presets.hpp"

#include "pnd/error.hpp"
#include "pnd/units.hpp"

namespace pnd {

namespace {

using R = Rational;

const std::vector<PublishedTable>& tables() {
    static const std::vector<PublishedTable> t = {
        {"I", 2.56, 0, 0, "q",
         {R(1, 2), R(1, 2), R(1, 2), R(1, 2), R(1, 2), R(1, 4), R(1, 2)},
         {0.0946, 0.0694, 0.0637, 0.0640, 0.0661, 0.0704, 0.0859},
         {0, 0, 0, 3, 12, 30, 60},
         {0, 0, 0, 3, 12, 30, 60}},
        {"II", 2.56, 0, 0, "q",
         {R(1, 2), R(1, 2), R(1, 2), R(1, 2), R(1, 4), R(1, 2), R(1, 2)},
         {0.1422, 0.1025, 0.0935, 0.0917, 0.0995, 0.1337, 0.1172},
         {0, 0, 0, 6, 24, 60, 120},
         {0, 0, -1, 8, 25, 61, 122}},
        {"III", 2.56, 0, 0, "q",
         {R(-1, 4), R(1, 4), R(-1, 2), R(1, 4), R(-1, 4), R(1, 4), R(-1, 2)},
         {0.00682, 0.0568, 0.0553, 0.0349, 0.0427, 0.0427, 0.0786},
         {-20, 20, -20, 20, -20, 20, -20},
         {-20, 20, -20, 20, -20, 20, -20}},
        {"IV", 2.56, 0, 0, "q",
         {R(-1, 2), R(1, 4), R(-1, 2), R(1, 4), R(-1, 4), R(1, 2), R(-1, 4)},
         {0.0232, 0.0799, 0.0826, 0.0463, 0.0469, 0.0820, 0.0816},
         {-40, 40, -40, 40, -40, 40, -40},
         {-40.5, 40.5, -40.5, 40.5, -40.5, 40.5, -40.5}},
        {"V", 2.56, 0, 0, "q",
         {R(1, 2), R(-1, 2), R(-1, 2), R(1, 4), R(1, 2), R(-1, 4), R(-1, 2)},
         {0.0862, 0.0531, 0.0753, 0.0240, 0.0554, 0.0489, 0.0893},
         {20, -20, -20, 20, 20, -20, -20},
         {20, -20, -20, 20, 20, -20, -20}},
        {"VI", 2.56, 0, 0, "q",
         {R(1, 2), R(-1, 4), R(-1, 2), R(1, 4), R(1, 4), R(-1, 4), R(-1, 2)},
         {0.1166, 0.0600, -0.0961, 0.0308, 0.0629, 0.0678, 0.1214},
         {40, -40, -40, 40, 40, -40, -40},
         {40, -41, -41, 40, 40, -41, -40}},
        {"VII", 2.0, 3, 6, "q",
         {R(1, 2), R(1, 2), R(1, 2), R(1, 2), R(1, 2), R(1, 4), R(1, 4)},
         {0.0883, 0.0658, 0.0635, 0.0639, 0.0620, 0.0534, 0.0606},
         {0, 0, 3, 9, 18, 30, 45},
         {0, 0, 3, 9, 18, 30.25, 46.25}},
        {"VIII", 2.0, 3, 6, "q",
         {R(1, 2), R(-1, 2), R(-1, 4), R(1, 2), R(1, 4), R(1, 2), R(1, 2)},
         {0.0949, 0.0659, 0.0344, 0.0838, 0.0588, 0.0257, 0.0527},
         {20, -20, -17, 29, 38, 10, 25},
         {20, -20, -17, 29, 38, 9, 24}},
        {"IX", 2.56, 0, 0, "a",
         {R(1, 2), R(-1, 4), R(-1, 2), R(-1, 2), R(-1, 2)},
         {0.0393, 0.0212, 0.0365, 0.0243, 0.0175},
         {5, -5, -5, 5, 5},
         {5, -5, -5, 5, 5}},
        {"X", 2.56, 0, 0, "b",
         {R(1, 2), R(-1, 4), R(-1, 2), R(-1, 2), R(-1, 2)},
         {0.0393, 0.0212, 0.0365, 0.0243, 0.0175},
         {5, -5, -5, 5, 5},
         {5, -5, -5, 5, 5}},
        {"XI", 2.56, 0, 0, "c",
         {R(-1, 2), R(1, 4), R(1, 2), R(-1, 4), R(-1, 2), R(-1, 4), R(-1, 4), R(-1, 2), R(-1, 2)},
         {0.0280, 0.0197, 0.0268, 0.0245, 0.0421, 0.0257, 0.00486, 0.0379, 0.0633},
         {-10, 0, 0, -10, -10, 0, 0, -10, -10},
         {-10, 0, 0, -10, -10, 0, 0, -10, -10}},
    };
    return t;
}

}  // namespace

std::vector<std::string> published_table_names() {
    std::vector<std::string> names;
    for (const auto& t : tables()) names.push_back(t.name);
    return names;
}

const PublishedTable& published_table(const std::string& name) {
    for (const auto& t : tables())
        if (t.name == name) return t;
    throw InvalidArgument("unknown table '" + name + "'");
}

SystemParams table_params(const PublishedTable& table) {
    return SystemParams::from_mhz(table.chi_mhz, table.kerr_khz * 1e-3, table.chi_prime_khz * 1e-3,
                                  static_cast<int>(table.delta.size()) - 1);
}

DriveSpec table_drive(const PublishedTable& table, const Envelope& envelope) {
    DriveSpec spec;
    const double chi = units::from_mhz(table.chi_mhz);
    for (size_t m = 0; m < table.delta.size(); ++m) {
        spec.tones.push_back({static_cast<int>(m), table.omega_over_chi[m] * chi, table.delta[m]});
    }
    spec.envelope = envelope;
    spec.target_qubit = table.qubit;
    return spec;
}

TwoCavityParams cphase_params() {
    TwoCavityParams p;
    p.chi_a = p.chi_b = p.chi_c = units::from_mhz(2.56);
    p.n_cut_a = p.n_cut_b = 4;
    return p;
}

}  // namespace pnd
