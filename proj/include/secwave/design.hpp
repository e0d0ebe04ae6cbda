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

#include <cmath>
#include <string>

#include "secwave/kernel.hpp"

namespace secwave {

/// Which design routine produced a waveform.
enum class DesignBranch { eigen, bisection, min_energy, sdr };

inline const char* to_string(DesignBranch b) {
    switch (b) {
        case DesignBranch::eigen: return "eigen";
        case DesignBranch::bisection: return "bisection";
        case DesignBranch::min_energy: return "min-energy";
        case DesignBranch::sdr: return "sdr";
    }
    return "unknown";
}

/// Unit-norm chip waveform s (length L) sent with energy E per bit.
struct WaveformDesign {
    CVector waveform;
    double energy = 0.0;
    DesignBranch branch = DesignBranch::eigen;

    Index chips() const { return waveform.size(); }

    /// SINR at the output of the max-SINR filter of a receiver with effective
    /// matrix q: E s^H Q s.
    double sinr(const HermitianMatrix& q) const { return energy * kernel::quad_form(q, waveform); }

    void validate(double e_max) const {
        if (std::abs(waveform.norm() - 1.0) > 1e-10) {
            throw ValidationError("waveform is not unit norm (|s| = " + std::to_string(waveform.norm()) + ")");
        }
        if (!(energy > 0.0) || energy > e_max * (1.0 + 1e-9)) {
            throw ValidationError("energy " + std::to_string(energy) + " outside (0, " + std::to_string(e_max) + "]");
        }
    }
};

}  // namespace secwave
