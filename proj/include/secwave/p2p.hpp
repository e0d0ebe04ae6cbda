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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "secwave/design.hpp"
#include "secwave/errors.hpp"
#include "secwave/kernel.hpp"

// Known-eavesdropper design for one intended receiver:
//
//   minimize  E s^H Q_e s   s.t.  E s^H Q_b s >= gamma,  |s| = 1,  E <= E_max.
//
// The SINR constraint is active at the optimum, so E = gamma / (s^H Q_b s) and
// the waveform minimizes the generalized Rayleigh quotient s^H Q_e s / s^H Q_b s
// subject to s^H Q_b s >= gamma / E_max.

namespace secwave::p2p {

inline constexpr double default_epsilon = 1e-8;
inline constexpr double bisection_upper = 1.0 - 1e-9;
inline constexpr int bisection_max_iterations = 200;

struct P2pProblem {
    HermitianMatrix q_bob;
    HermitianMatrix q_eve;
    double gamma = 1.0;  // linear scale
    double e_max = 1.0;
    double epsilon = default_epsilon;

    /// gamma / E_max: the least s^H Q_b s a waveform may have.
    double gain_floor() const { return gamma / e_max; }

    void validate() const {
        if (q_bob.dim() == 0 || q_bob.dim() != q_eve.dim()) throw DimensionError("Q_b and Q_e dimensions differ");
        auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!pos(gamma) || !pos(e_max) || !pos(epsilon)) {
            throw ValidationError("gamma, E_max and epsilon must be finite and positive");
        }
    }
};

inline bool check_feasibility(const P2pProblem& p) {
    p.validate();
    return kernel::max_eigenvalue(p.q_bob) >= p.gain_floor();
}

/**
 * Smallest generalized eigenpair of (A, Q_b).
 *
 * When the smallest eigenvalue is repeated, the returned vector is the one in
 * that eigenspace with the largest s^H Q_b s (i.e. the least energy), found by
 * a second eigenproblem restricted to the eigenspace.
 */
inline kernel::EigenPair min_generalized_pair(const HermitianMatrix& a, const HermitianMatrix& q_bob) {
    const kernel::EigenPairSet all = kernel::generalized_eig(a, q_bob);
    const Index n = all.values.size();
    const double lmin = all.values(n - 1);
    const double scale = std::max(std::abs(all.values(0)), std::abs(lmin));
    Index first = n - 1;
    while (first > 0 && all.values(first - 1) - lmin <= 1e-10 * scale) --first;
    if (first == n - 1) return {lmin, all.vectors.col(n - 1)};

    const CMatrix basis = all.vectors.rightCols(n - first);
    const HermitianMatrix gain(basis.adjoint() * q_bob.matrix() * basis);
    const HermitianMatrix gram(basis.adjoint() * basis);
    CVector s = basis * kernel::generalized_eig_extremes(gain, gram).max.vector;
    s.normalize();
    kernel::normalize_phase(s);
    return {lmin, s};
}

/**
 * Generalized-eigenvector design s = p_L of (Q_e, Q_b), E = gamma / (s^H Q_b s).
 *
 * Returns nullopt when that energy would exceed E_max, in which case the
 * bisection branch is required.
 */
inline std::optional<WaveformDesign> eigen_design(const P2pProblem& p) {
    if (!check_feasibility(p)) throw NoTransmitError("lambda_max(Q_b) < gamma / E_max");
    const kernel::EigenPair pl = min_generalized_pair(p.q_eve, p.q_bob);
    const double gain = kernel::quad_form(p.q_bob, pl.vector);
    if (gain < p.gain_floor()) return std::nullopt;
    return WaveformDesign{pl.vector, p.gamma / gain, DesignBranch::eigen};
}

struct BisectionResult {
    WaveformDesign design;
    double mu_tilde = 0.0;  // mu / (1 + mu), in [0, 1)
    double beta = 0.0;      // multiplier of the SINR constraint
    int iterations = 0;

    double mu() const { return mu_tilde / (1.0 - mu_tilde); }
};

/// q_L(mu~) and beta(mu~): the smallest generalized eigenpair of
/// ((1 - mu~) Q_e + mu~ I, (1 - mu~) Q_b), computed as (Q_e + mu I, Q_b).
inline kernel::EigenPair bisection_pencil_pair(const P2pProblem& p, double mu_tilde) {
    if (!(mu_tilde >= 0.0 && mu_tilde < 1.0)) throw ValidationError("mu~ must lie in [0, 1)");
    const double mu = mu_tilde / (1.0 - mu_tilde);
    const Index n = p.q_eve.dim();
    return min_generalized_pair(HermitianMatrix(p.q_eve.matrix() + mu * CMatrix::Identity(n, n)), p.q_bob);
}

/**
 * Energy-capped branch: bisection on mu~ until q_L(mu~)^H Q_b q_L(mu~) lies in
 * [gamma/E_max, gamma/E_max + epsilon).
 *
 * The map is increasing in mu~, so the upper bracket end always satisfies the
 * floor; the returned waveform comes from it and E = gamma / (s^H Q_b s), which
 * keeps Bob's SINR exactly at gamma and puts E within E_max * epsilon /
 * (gamma / E_max) below the cap.
 */
inline BisectionResult kkt_bisection(const P2pProblem& p) {
    if (!check_feasibility(p)) throw NoTransmitError("lambda_max(Q_b) < gamma / E_max");
    const double target = p.gain_floor();
    kernel::EigenPair lo_pair = bisection_pencil_pair(p, 0.0);
    if (kernel::quad_form(p.q_bob, lo_pair.vector) >= target) {
        throw ValidationError("bisection precondition violated: eigen design already meets the energy cap");
    }
    double lo = 0.0;
    double hi = bisection_upper;
    kernel::EigenPair hi_pair = bisection_pencil_pair(p, hi);
    double f_hi = kernel::quad_form(p.q_bob, hi_pair.vector);
    if (f_hi < target) {
        throw NumericalError("bisection does not bracket: f(" + std::to_string(hi) + ") = " + std::to_string(f_hi) +
                             " < " + std::to_string(target));
    }
    int it = 0;
    while (f_hi - target >= p.epsilon) {
        if (++it > bisection_max_iterations) {
            throw NumericalError("bisection did not converge: bracket [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "], gap " + std::to_string(f_hi - target));
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            throw NumericalError("bisection bracket collapsed at mu~ = " + std::to_string(mid) + " with gap " +
                                 std::to_string(f_hi - target));
        }
        kernel::EigenPair mid_pair = bisection_pencil_pair(p, mid);
        const double f_mid = kernel::quad_form(p.q_bob, mid_pair.vector);
        if (f_mid >= target) {
            hi = mid;
            f_hi = f_mid;
            hi_pair = std::move(mid_pair);
        } else {
            lo = mid;
        }
    }
    BisectionResult out;
    out.design = WaveformDesign{hi_pair.vector, p.gamma / f_hi, DesignBranch::bisection};
    out.mu_tilde = hi;
    out.beta = hi_pair.value;
    out.iterations = it;
    return out;
}

/// Full pipeline: no-transmit if infeasible, the eigen design if it respects
/// the cap, the bisection design otherwise.
inline WaveformDesign design_p2p(const P2pProblem& p) {
    if (!check_feasibility(p)) throw NoTransmitError("lambda_max(Q_b) < gamma / E_max: Alice does not transmit");
    if (auto d = eigen_design(p)) return *d;
    return kkt_bisection(p).design;
}

}  // namespace secwave::p2p
