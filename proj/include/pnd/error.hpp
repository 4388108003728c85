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

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnd {

// Error categories double as CLI exit codes (see tools/pnd_cli.cpp).
enum class ErrorKind {
    General = 1,
    Infeasible = 2,
    Resonance = 3,
    Tolerance = 4,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::General, what) {}
};

// A perturbative denominator fell under the resonance guard.
class ResonanceError : public Error {
  public:
    explicit ResonanceError(const std::string& what) : Error(ErrorKind::Resonance, what) {}
};

// No drive realises the requested spectrum. `details` carries one line per
// rejected candidate so callers can surface them.
class InfeasibleError : public Error {
  public:
    InfeasibleError(const std::string& what, std::vector<std::string> details = {})
        : Error(ErrorKind::Infeasible, what), details_(std::move(details)) {}
    const std::vector<std::string>& details() const noexcept { return details_; }

  private:
    std::vector<std::string> details_;
};

// Integrator invariants (trace, positivity, norm) broke.
class ToleranceError : public Error {
  public:
    explicit ToleranceError(const std::string& what) : Error(ErrorKind::Tolerance, what) {}
};

// Warnings go through a process-wide sink; stderr unless replaced.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace pnd
