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


// pnd command-line tool. Everything goes through the C API.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pnd/pnd.h"

namespace fs = std::filesystem;

namespace {

struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
};

int run(const std::string& command, const Args& args, bool has_seed) {
    std::ifstream in(args.config, std::ios::binary);
    if (!in) {
        std::cerr << "pnd: error: cannot open config '" << args.config << "'\n";
        return PND_ERR_GENERAL;
    }
    std::ostringstream text;
    text << in.rdbuf();

    const std::string base = fs::absolute(args.config).parent_path().string();
    pnd_run_options opt{};
    opt.has_seed = has_seed ? 1 : 0;
    opt.seed = args.seed;
    opt.threads = args.threads;
    opt.base_dir = base.c_str();

    pnd_result* result = nullptr;
    const int rc = pnd_run(command.c_str(), text.str().c_str(), &opt, &result);
    for (size_t i = 0; i < pnd_result_diagnostic_count(result); ++i) std::cerr << "pnd: " << pnd_result_diagnostic(result, i) << "\n";
    if (rc != PND_OK) {
        std::cerr << "pnd: error: " << pnd_last_error() << "\n";
        pnd_result_free(result);
        return rc;
    }

    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) {
        std::cerr << "pnd: error: cannot create '" << args.out << "': " << ec.message() << "\n";
        pnd_result_free(result);
        return PND_ERR_GENERAL;
    }
    for (size_t i = 0; i < pnd_result_file_count(result); ++i) {
        size_t size = 0;
        const char* data = pnd_result_file_data(result, i, &size);
        const fs::path path = fs::path(args.out) / pnd_result_file_name(result, i);
        std::ofstream f(path, std::ios::binary);
        f.write(data, static_cast<std::streamsize>(size));
        if (!f) {
            std::cerr << "pnd: error: cannot write '" << path.string() << "'\n";
            pnd_result_free(result);
            return PND_ERR_GENERAL;
        }
    }
    const int status = pnd_result_status(result);
    pnd_result_free(result);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-number-dependent Hamiltonian engineering"};
    app.set_version_flag("--version", std::string("pnd ") + pnd_version());
    app.require_subcommand(1);

    Args args;
    const char* commands[3][2] = {{"optimize", "Design a drive for a target spectrum"},
                                  {"verify", "Check a drive against its declared spectrum"},
                                  {"simulate", "Run a time-domain experiment"}};
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", args.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "Output directory")->required();
        sub->add_option("--seed", args.seed, "Seed, overrides the config");
        sub->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : PND_ERR_GENERAL;
    }
    CLI::App* sub = app.get_subcommands().front();
    return run(sub->get_name(), args, sub->count("--seed") > 0);
}
