// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace secwave {

// Machine-readable error category, printed by the CLI as the `code` field.
enum class ErrorCode {
    validation,
    dimension,
    definiteness,
    no_transmit,
    numerical,
    infeasible,
    not_converged,
    io,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::dimension: return "dimension";
        case ErrorCode::definiteness: return "definiteness";
        case ErrorCode::no_transmit: return "no_transmit";
        case ErrorCode::numerical: return "numerical";
        case ErrorCode::infeasible: return "infeasible";
        case ErrorCode::not_converged: return "not_converged";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorCode::validation, w) {}
};
struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error(ErrorCode::dimension, w) {}
};
struct DefinitenessError : Error {
    explicit DefinitenessError(const std::string& w) : Error(ErrorCode::definiteness, w) {}
};
/// Bob's SINR target cannot be met inside the energy budget; Alice does not transmit.
struct NoTransmitError : Error {
    explicit NoTransmitError(const std::string& w) : Error(ErrorCode::no_transmit, w) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorCode::numerical, w) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& w) : Error(ErrorCode::infeasible, w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error(ErrorCode::not_converged, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

}  // namespace secwave
